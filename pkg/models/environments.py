"""
----------------------------------------------------------------------------
 Parameter objects for the gambling game, the worst-case-CDF probe and the
 portfolio environment
----------------------------------------------------------------------------
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from .ambiguity import NuSpec
from .base import BaseModel, build_nested, require


class GamblingMode(Enum):
    TRUE_DIST = "true"
    REFERENCE_DIST = "reference"


@dataclass
class GamblingParams(BaseModel):
    """Beta(alpha', beta') game on [0, 1]; negative rewards scaled by reward_factor"""
    alpha_prime: float = 1.2
    beta_prime: float = 2.0
    reward_factor: float = 5.0
    mode: GamblingMode = GamblingMode.TRUE_DIST

    def __post_init__(self):
        if isinstance(self.mode, str):
            self.mode = GamblingMode(self.mode)
        require(self.alpha_prime > 0, "alpha_prime", "must be positive")
        require(self.beta_prime > 0, "beta_prime", "must be positive")
        require(self.reward_factor > 0, "reward_factor", "must be positive")

    def with_shapes(self, alpha_prime: float, beta_prime: float,
                    mode: GamblingMode = GamblingMode.REFERENCE_DIST) -> "GamblingParams":
        return GamblingParams(alpha_prime=alpha_prime, beta_prime=beta_prime,
                              reward_factor=self.reward_factor, mode=mode)


@dataclass
class CdfProbeParams(BaseModel):
    """Single-action probe with reward 1{x1 <= x0}"""
    reference: List[float] = field(default_factory=lambda: [2.0, 2.0])
    nu: NuSpec = field(default_factory=NuSpec.uniform)
    epsilon: float = 0.5
    deltas: List[float] = field(default_factory=lambda: [10.0, 1.0, 0.1, 0.01])
    discount: float = 0.01
    grid: List[float] = field(default_factory=lambda: np.linspace(0.0, 1.0, 21).tolist())
    n_nu: int = 2000
    n_outer: int = 200

    def __post_init__(self):
        require(len(self.reference) == 2 and min(self.reference) > 0, "reference",
                "must be two positive Beta shape parameters")
        require(self.epsilon >= 0, "epsilon", "must be >= 0")
        require(all(d > 0 for d in self.deltas), "deltas", "must all be positive")
        require(0 <= self.discount < 1, "discount", "must lie in [0, 1)")
        require(all(0.0 <= x <= 1.0 for x in self.grid), "grid", "must lie inside [0, 1]")
        require(self.n_nu >= 1 and self.n_outer >= 1, "n_nu", "sample counts must be >= 1")

    @classmethod
    def from_dict(cls, data) -> "CdfProbeParams":
        data = dict(data)
        if "nu" in data:
            data["nu"] = build_nested("nu", lambda d: NuSpec(**d), data["nu"])
        if "grid_points" in data:
            data["grid"] = np.linspace(0.0, 1.0, int(data.pop("grid_points"))).tolist()
        return cls(**data)


@dataclass
class PortfolioParams(BaseModel):
    """Single-index portfolio with a cash leg"""
    window: int = 60
    transaction_cost: float = 0.0005
    risk_free_rate: float = 0.024
    log_return_bound: float = 0.25
    time_delta: float = 1.0 / 252.0
    actions: List[float] = field(default_factory=lambda: np.linspace(-1.0, 1.0, 9).tolist())

    def __post_init__(self):
        require(self.window >= 1, "window", "must be >= 1")
        require(self.transaction_cost >= 0, "transaction_cost", "must be >= 0")
        require(self.log_return_bound > 0, "log_return_bound", "must be positive")
        require(self.time_delta > 0, "time_delta", "must be positive")
        require(len(self.actions) >= 1 and all(abs(a) <= 1 for a in self.actions), "actions",
                "positions must lie in [-1, 1]")

    @property
    def state_dim(self) -> int:
        return self.window + 3


@dataclass
class PortfolioState(BaseModel):
    """Return window (oldest first), log wealth, current position, time to next step in years"""
    window: np.ndarray
    log_wealth: float = 0.0
    position: float = 0.0
    time_delta: float = 1.0 / 252.0

    def __post_init__(self):
        self.window = np.asarray(self.window, dtype=float)
        if self.window.ndim != 1:
            raise ValueError("window must be one-dimensional")
        if self.time_delta <= 0:
            raise ValueError("time_delta must be positive")

    @property
    def last_return(self) -> float:
        return float(self.window[-1])

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.window, [self.log_wealth, self.position, self.time_delta]])

    @classmethod
    def from_vector(cls, vector: np.ndarray, window: Optional[int] = None) -> "PortfolioState":
        vector = np.asarray(vector, dtype=float)
        window = vector.shape[-1] - 3 if window is None else window
        if vector.shape[-1] != window + 3:
            raise ValueError(f"expected a state of dimension {window + 3}, got {vector.shape[-1]}")
        return cls(window=vector[:window].copy(), log_wealth=float(vector[window]),
                   position=float(vector[window + 1]), time_delta=float(vector[window + 2]))


@dataclass
class SimulatorParams(BaseModel):
    """GARCH(1,1) variance recursion with standardized Student-t innovations"""
    mu: float = 0.0003
    omega: float = 2e-6
    arch: float = 0.08
    garch: float = 0.9
    dof: float = 4.0

    def __post_init__(self):
        require(self.omega > 0, "omega", "must be positive")
        require(self.arch >= 0 and self.garch >= 0, "arch", "coefficients must be >= 0")
        require(self.arch + self.garch < 1, "garch", "arch + garch must be < 1 for stationarity")
        require(self.dof > 2, "dof", "must exceed 2 for a finite variance")

    @property
    def long_run_variance(self) -> float:
        return self.omega / (1.0 - self.arch - self.garch)
