"""
Environments

- base: the Environment interface used by training, targets and evaluation
- gambling: Beta-driven gambling game, method-of-moments fit, benchmark policy
- cdf_probe: indicator-reward probe and the worst-case CDF
- portfolio: index/cash portfolio, return simulators, price CSV ingestion
"""

from .base import Environment
from .gambling import (
    GAMBLING_ACTIONS, BetaFit, GamblingEnv, beta_shapes, sample_beta, gambling_reward, gambling_step,
    fit_beta_mom, gambling_expected_reward, expected_reward_closed_form,
    greedy_expected_reward_policy, simulate_policy,
)
from .cdf_probe import CdfProbeEnv, worst_case_cdf, outer_objective, discretized_probe_instance
from .portfolio import (
    PortfolioEnv, ReturnSimulator, SyntheticHeavyTail, HistoricalReplay,
    portfolio_reward, portfolio_build_next_state, load_price_csv,
)

__all__ = [
    'Environment',
    'GAMBLING_ACTIONS', 'BetaFit', 'GamblingEnv', 'beta_shapes', 'sample_beta', 'gambling_reward',
    'gambling_step', 'fit_beta_mom', 'gambling_expected_reward', 'expected_reward_closed_form',
    'greedy_expected_reward_policy', 'simulate_policy',
    'CdfProbeEnv', 'worst_case_cdf', 'outer_objective', 'discretized_probe_instance',
    'PortfolioEnv', 'ReturnSimulator', 'SyntheticHeavyTail', 'HistoricalReplay',
    'portfolio_reward', 'portfolio_build_next_state', 'load_price_csv',
]
