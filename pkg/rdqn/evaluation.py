"""
Greedy-policy evaluation and portfolio risk metrics.

Metrics annualise with 252 periods per year. Sharpe uses no risk-free
subtraction; the downside deviation zeroises positive log returns before
taking the standard deviation.
"""

import logging
from typing import Callable, List, Optional

import numpy as np

from envs.base import Environment
from models.evaluation import EvalStats, PortfolioStats
from models.errors import InputError
from nn.network import QNetwork

from .policy import greedy_action

logger = logging.getLogger(__name__)

PERIODS_PER_YEAR = 252
ANNUAL = np.sqrt(PERIODS_PER_YEAR)

Policy = Callable[[np.ndarray], int]


def wealth_path(log_returns) -> np.ndarray:
    """Wealth starting at 1, one entry per period after it"""
    return np.exp(np.concatenate([[0.0], np.cumsum(np.asarray(log_returns, dtype=float))]))


def max_drawdown(wealth) -> float:
    """Largest peak-to-trough loss of a wealth path, as a negative fraction"""
    wealth = np.asarray(wealth, dtype=float)
    if wealth.size == 0:
        raise InputError("max_drawdown needs a non-empty wealth path")
    return float(np.min(wealth / np.maximum.accumulate(wealth) - 1.0))


def _ratio(numerator: float, denominator: float) -> float:
    return float(numerator / denominator) if denominator > 0 else 0.0


def annualized_volatility(log_returns) -> float:
    return float(np.std(log_returns) * ANNUAL)


def sharpe_ratio(log_returns) -> float:
    r = np.asarray(log_returns, dtype=float)
    return _ratio(r.mean(), r.std()) * ANNUAL


def downside_deviation(log_returns) -> float:
    return float(np.std(np.minimum(np.asarray(log_returns, dtype=float), 0.0)) * ANNUAL)


def sortino_ratio(log_returns) -> float:
    r = np.asarray(log_returns, dtype=float)
    return _ratio(r.mean(), np.std(np.minimum(r, 0.0))) * ANNUAL


def portfolio_stats(log_returns) -> PortfolioStats:
    r = np.asarray(log_returns, dtype=float)
    return PortfolioStats(
        wealth=float(np.exp(r.sum())),
        max_drawdown=max_drawdown(wealth_path(r)),
        volatility=annualized_volatility(r),
        sharpe=sharpe_ratio(r),
        downside_deviation=downside_deviation(r),
        sortino=sortino_ratio(r),
    )


def run_episodes(policy: Policy, env: Environment, episodes: int, steps_per_episode: int,
                 rng: Optional[np.random.Generator] = None) -> EvalStats:
    """Roll out a state -> action-index policy; episodes are truncated, never terminated"""
    if episodes < 1 or steps_per_episode < 1:
        raise InputError("need at least one episode of at least one step")
    if rng is not None:
        env.rng = rng
    means: List[float] = []
    portfolio: List[PortfolioStats] = []
    for _ in range(episodes):
        state = env.reset()
        rewards = np.empty(steps_per_episode)
        for t in range(steps_per_episode):
            state, rewards[t] = env.step(policy(state))
        means.append(float(rewards.mean()))
        if env.is_portfolio:
            portfolio.append(portfolio_stats(rewards))
    stats = EvalStats(episode_means=means, steps_per_episode=steps_per_episode, portfolio=portfolio)
    logger.debug("evaluated %d episodes: mean reward per step %.5f", episodes, stats.mean)
    return stats


def evaluate_policy(net: QNetwork, env: Environment, episodes: int, steps_per_episode: int,
                    rng: Optional[np.random.Generator] = None) -> EvalStats:
    """Statistics of the greedy policy of net (no exploration)"""
    return run_episodes(lambda state: greedy_action(net, state), env, episodes, steps_per_episode, rng)


def evaluate_constant_action(action_index: int, env: Environment, episodes: int, steps_per_episode: int,
                             rng: Optional[np.random.Generator] = None) -> EvalStats:
    """Baseline holding one action throughout, e.g. the fully invested portfolio"""
    if not 0 <= action_index < env.num_actions:
        raise InputError(f"action index {action_index} out of range")
    return run_episodes(lambda state: action_index, env, episodes, steps_per_episode, rng)
