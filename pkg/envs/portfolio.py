"""
Single-index portfolio with a cash leg.

State vector layout (window W = 60 by default):
    [0 .. W-1]  past log returns, oldest first
    [W]         log wealth
    [W+1]       current position in [-1, 1]
    [W+2]       time to the next step in years

The action is the new position. The robust part only perturbs the next log
return, so the transport cost between next states is |y - y'| on that one
coordinate.
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from models.environments import PortfolioParams, PortfolioState, SimulatorParams
from models.errors import IngestionError, InputError, NumericalError

from .base import Environment

logger = logging.getLogger(__name__)

DAYS_PER_YEAR = 365.25


def portfolio_reward(state: PortfolioState, a: float, y, params: PortfolioParams,
                     transaction_cost: Optional[float] = None):
    """
    log(1 + a (e^y - 1) + (1 - a)(e^{r_f delta} - 1) - c |a - position|)
    """
    c = params.transaction_cost if transaction_cost is None else transaction_cost
    y = np.asarray(y, dtype=float)
    growth = (1.0 + a * np.expm1(y) + (1.0 - a) * np.expm1(params.risk_free_rate * state.time_delta)
              - c * abs(a - state.position))
    if np.any(growth <= 0):
        raise NumericalError(f"portfolio growth factor {np.min(growth):.6g} <= 0; "
                             "log returns exceed the configured bound")
    out = np.log(growth)
    return float(out) if out.ndim == 0 else out


def portfolio_build_next_state(state: PortfolioState, a: float, y: float, delta_next: float,
                               params: PortfolioParams, transaction_cost: Optional[float] = None) -> PortfolioState:
    reward = portfolio_reward(state, a, y, params, transaction_cost)
    window = np.concatenate([state.window[1:], [y]])
    return PortfolioState(window=window, log_wealth=state.log_wealth + reward, position=a,
                          time_delta=delta_next)


class ReturnSimulator(ABC):
    """Source of next log returns; outputs are clamped to +-bound"""

    def __init__(self, bound: float):
        self.bound = bound
        self.clamped = 0

    def clamp(self, y: float) -> float:
        if abs(y) > self.bound:
            self.clamped += 1
            return float(np.clip(y, -self.bound, self.bound))
        return float(y)

    @abstractmethod
    def initial_window(self, window: int, rng: np.random.Generator) -> Tuple[np.ndarray, float]:
        """A starting return window and time delta"""

    @abstractmethod
    def next_log_return(self, window: np.ndarray, time_delta: float, rng: np.random.Generator) -> float:
        ...

    def next_time_delta(self, time_delta: float) -> float:
        return time_delta


class SyntheticHeavyTail(ReturnSimulator):
    """
    GARCH(1,1) volatility with standardized Student-t innovations.

    The conditional variance is rebuilt from the return window alone, starting
    at the long-run variance, so the simulator keeps no state between calls.
    """

    def __init__(self, params: SimulatorParams, bound: float, time_delta: float = 1.0 / 252.0):
        super().__init__(bound)
        self.params = params
        self.time_delta = time_delta
        self._t_scale = np.sqrt((params.dof - 2.0) / params.dof)

    def conditional_variance(self, window: np.ndarray) -> float:
        p = self.params
        variance = p.long_run_variance
        for r in window:
            variance = p.omega + p.arch * (r - p.mu) ** 2 + p.garch * variance
        return variance

    def _draw(self, variance: float, rng: np.random.Generator) -> float:
        z = rng.standard_t(self.params.dof) * self._t_scale
        return self.clamp(self.params.mu + np.sqrt(variance) * z)

    def initial_window(self, window: int, rng: np.random.Generator) -> Tuple[np.ndarray, float]:
        p = self.params
        variance = p.long_run_variance
        returns = []
        for _ in range(2 * window):
            r = self._draw(variance, rng)
            returns.append(r)
            variance = p.omega + p.arch * (r - p.mu) ** 2 + p.garch * variance
        return np.asarray(returns[-window:]), self.time_delta

    def next_log_return(self, window: np.ndarray, time_delta: float, rng: np.random.Generator) -> float:
        return self._draw(self.conditional_variance(window), rng)

    def next_time_delta(self, time_delta: float) -> float:
        return self.time_delta


class HistoricalReplay(ReturnSimulator):
    """Replays an ingested return series with its calendar gaps, wrapping around at the end"""

    def __init__(self, log_returns: np.ndarray, time_deltas: np.ndarray, bound: float,
                 random_start: bool = True):
        super().__init__(bound)
        self.log_returns = np.asarray(log_returns, dtype=float)
        self.time_deltas = np.asarray(time_deltas, dtype=float)
        if self.log_returns.shape != self.time_deltas.shape:
            raise InputError("log returns and time deltas must have equal length")
        self.random_start = random_start
        self.cursor = 0

    @classmethod
    def from_csv(cls, path: Union[str, Path], bound: float, random_start: bool = True) -> "HistoricalReplay":
        returns, deltas = load_price_csv(path)
        return cls(returns, deltas, bound, random_start)

    def initial_window(self, window: int, rng: np.random.Generator) -> Tuple[np.ndarray, float]:
        n = self.log_returns.size
        if n <= window:
            raise InputError(f"price history has {n} returns, need more than the window of {window}")
        start = int(rng.integers(0, n - window)) if self.random_start else 0
        self.cursor = start + window
        returns = np.array([self.clamp(y) for y in self.log_returns[start:self.cursor]])
        return returns, float(self.time_deltas[self.cursor % n])

    def next_log_return(self, window: np.ndarray, time_delta: float, rng: np.random.Generator) -> float:
        n = self.log_returns.size
        y = self.clamp(self.log_returns[self.cursor % n])
        self.cursor = (self.cursor + 1) % n
        return y

    def next_time_delta(self, time_delta: float) -> float:
        return float(self.time_deltas[self.cursor % self.time_deltas.size])


def load_price_csv(path: Union[str, Path]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Read a `date,close` price file.

    Returns log returns ln(close_t / close_{t-1}) and time deltas equal to the
    calendar-day gap divided by 365.25. Errors carry the 1-based file line
    (the header is line 1).
    """
    path = str(path)
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True)
    except FileNotFoundError:
        raise IngestionError(path, 0, "file not found") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise IngestionError(path, 1, f"unreadable CSV ({e})") from None
    columns = [str(c).strip().lower() for c in frame.columns]
    if columns[:2] != ["date", "close"]:
        raise IngestionError(path, 1, "header must be 'date,close'")
    frame.columns = columns

    dates, closes = [], []
    for i, (raw_date, raw_close) in enumerate(zip(frame["date"], frame["close"])):
        line = i + 2
        try:
            date = pd.Timestamp(str(raw_date).strip())
            close = float(raw_close)
        except (ValueError, TypeError):
            raise IngestionError(path, line, f"unparseable row ({raw_date!r}, {raw_close!r})") from None
        if pd.isna(date) or not np.isfinite(close):
            raise IngestionError(path, line, "missing date or close")
        if close <= 0:
            raise IngestionError(path, line, f"non-positive close {close}")
        if dates and date <= dates[-1]:
            raise IngestionError(path, line, "dates must be strictly ascending")
        dates.append(date)
        closes.append(close)
    if len(closes) < 2:
        raise IngestionError(path, len(closes) + 1, "need at least two prices")

    closes_arr = np.asarray(closes)
    log_returns = np.log(closes_arr[1:] / closes_arr[:-1])
    gaps = np.array([(b - a).days for a, b in zip(dates[:-1], dates[1:])], dtype=float)
    logger.info("Loaded %d returns from %s", log_returns.size, path)
    return log_returns, gaps / DAYS_PER_YEAR


class PortfolioEnv(Environment):
    """
    Trades one index against cash. transaction_cost overrides params for this
    instance, so a training copy can use a higher cost than the evaluation one.
    """

    is_portfolio = True

    def __init__(self, params: PortfolioParams, simulator: ReturnSimulator, rng: np.random.Generator,
                 transaction_cost: Optional[float] = None):
        super().__init__(rng)
        self.params = params
        self.simulator = simulator
        self.transaction_cost = params.transaction_cost if transaction_cost is None else transaction_cost
        self._actions = np.asarray(params.actions, dtype=float)
        self.state: Optional[PortfolioState] = None

    @property
    def state_dim(self) -> int:
        return self.params.state_dim

    @property
    def actions(self) -> np.ndarray:
        return self._actions

    def reset(self) -> np.ndarray:
        window, delta = self.simulator.initial_window(self.params.window, self.rng)
        self.state = PortfolioState(window=window, log_wealth=0.0, position=0.0, time_delta=delta)
        return self.state.to_vector()

    def step(self, action_index: int) -> Tuple[np.ndarray, float]:
        if self.state is None:
            self.reset()
        a = float(self._actions[action_index])
        y = self.simulator.next_log_return(self.state.window, self.state.time_delta, self.rng)
        delta_next = self.simulator.next_time_delta(self.state.time_delta)
        reward = portfolio_reward(self.state, a, y, self.params, self.transaction_cost)
        self.state = portfolio_build_next_state(self.state, a, y, delta_next, self.params, self.transaction_cost)
        return self.state.to_vector(), reward

    def reward(self, state: np.ndarray, action_index: int, next_states: np.ndarray) -> np.ndarray:
        current = PortfolioState.from_vector(state, self.params.window)
        next_states = np.atleast_2d(np.asarray(next_states, dtype=float))
        y = next_states[:, self.params.window - 1]
        return np.atleast_1d(portfolio_reward(current, float(self._actions[action_index]), y,
                                              self.params, self.transaction_cost))

    def lift_nu(self, state: np.ndarray, action_index: int, next_state_ref: np.ndarray,
                nu_points: np.ndarray) -> np.ndarray:
        """Next states that differ from next_state_ref only in the latest log return"""
        y = np.clip(np.asarray(nu_points, dtype=float).reshape(-1), -self.params.log_return_bound,
                    self.params.log_return_bound)
        current = PortfolioState.from_vector(state, self.params.window)
        a = float(self._actions[action_index])
        lifted = np.tile(np.asarray(next_state_ref, dtype=float), (y.size, 1))
        w = self.params.window
        lifted[:, w - 1] = y
        lifted[:, w] = current.log_wealth + portfolio_reward(current, a, y, self.params, self.transaction_cost)
        lifted[:, w + 1] = a
        return lifted

    def nu_cost(self, next_state_ref: np.ndarray, nu_points: np.ndarray) -> np.ndarray:
        y = np.clip(np.asarray(nu_points, dtype=float).reshape(-1), -self.params.log_return_bound,
                    self.params.log_return_bound)
        return np.abs(float(next_state_ref[self.params.window - 1]) - y)
