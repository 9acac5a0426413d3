"""
Robust Bellman targets from the dual of the Sinkhorn-ball problem

- numerics: softplus and stable log-mean-exp
- sampling: stratified / i.i.d. draws from nu
- dual: effective radius, dual objective, lambda ascent
- cache: per-slot lambda warm starts
- targets: batch targets for the trainer
"""

from .numerics import softplus, softplus_grad, inverse_softplus, stable_log_mean_exp
from .sampling import sample_nu, nu_draws, strata
from .dual import (
    euclidean_cost, epsilon_bar, epsilon_bar_from_distances, dual_value_and_grad,
    dual_objective, maximize_dual, solve_lambda, AscentOutcome,
)
from .cache import LambdaCache
from .targets import (
    QFunction, TransitionModel, RewardModel, TargetBatch, NuStreams, robust_target_batch, dqn_target_batch,
)

__all__ = [
    'softplus', 'softplus_grad', 'inverse_softplus', 'stable_log_mean_exp',
    'sample_nu', 'nu_draws', 'strata',
    'euclidean_cost', 'epsilon_bar', 'epsilon_bar_from_distances', 'dual_value_and_grad',
    'dual_objective', 'maximize_dual', 'solve_lambda', 'AscentOutcome',
    'LambdaCache',
    'QFunction', 'TransitionModel', 'RewardModel', 'TargetBatch', 'NuStreams', 'robust_target_batch',
    'dqn_target_batch',
]
