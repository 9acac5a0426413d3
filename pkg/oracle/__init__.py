"""
Brute-force oracles on finite supports

- discrete: Wasserstein / Sinkhorn distances, primal and dual robust values
- checks: strong duality, nesting and delta-limit suites
- loader: JSON fixtures of instances
"""

from .discrete import (
    MAX_LP_POINTS, solve_lp_by_vertices, wasserstein_distance_discrete, wasserstein_robust_value,
    sinkhorn_coupling, sinkhorn_distance_discrete, coupling_cost, exact_epsilon_bar,
    sinkhorn_distance_and_gradient, simplex_grid,
    primal_robust_value, dual_objective_discrete, dual_robust_value_discrete, minimal_epsilon,
)
from .checks import (
    random_instance, generate_instances, limit_instances, check_strong_duality, check_nesting,
    check_delta_limit, run_oracle_suite,
)
from .loader import InstanceLoader

__all__ = [
    'MAX_LP_POINTS', 'solve_lp_by_vertices', 'wasserstein_distance_discrete', 'wasserstein_robust_value',
    'sinkhorn_coupling', 'sinkhorn_distance_discrete', 'coupling_cost', 'exact_epsilon_bar',
    'sinkhorn_distance_and_gradient', 'simplex_grid', 'primal_robust_value', 'dual_objective_discrete',
    'dual_robust_value_discrete',
    'minimal_epsilon',
    'random_instance', 'generate_instances', 'limit_instances', 'check_strong_duality', 'check_nesting',
    'check_delta_limit', 'run_oracle_suite',
    'InstanceLoader',
]
