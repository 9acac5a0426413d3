"""
DQN / Robust DQN training and evaluation

- replay: ring-buffer experience replay with slot ids
- policy: epsilon-greedy and greedy action selection
- trainer: the training loop and the Q loss
- evaluation: greedy rollouts, episode statistics, portfolio metrics
"""

from .replay import ReplayBuffer
from .policy import select_action, greedy_action, greedy_actions
from .trainer import TrainResult, train, q_loss_and_grads
from .evaluation import (
    evaluate_policy, evaluate_constant_action, run_episodes, portfolio_stats, wealth_path,
    max_drawdown, annualized_volatility, sharpe_ratio, downside_deviation, sortino_ratio,
)

__all__ = [
    'ReplayBuffer',
    'select_action', 'greedy_action', 'greedy_actions',
    'TrainResult', 'train', 'q_loss_and_grads',
    'evaluate_policy', 'evaluate_constant_action', 'run_episodes', 'portfolio_stats', 'wealth_path',
    'max_drawdown', 'annualized_volatility', 'sharpe_ratio', 'downside_deviation', 'sortino_ratio',
]
