"""
Worst-case CDF probe.

A single-action environment whose reward is 1{x1 <= x0}. With a discount
close to zero the robust value at threshold x0 is inf P(X1 <= x0) over the
Sinkhorn ball, i.e. the CDF of the worst-case distribution at x0.
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from models.ambiguity import LambdaSolverConfig, NuFamily
from models.environments import CdfProbeParams
from models.errors import InfeasibleError
from models.instance import DiscreteRobustInstance
from sinkhorn_dual.dual import maximize_dual
from sinkhorn_dual.numerics import softplus, softplus_grad
from sinkhorn_dual.sampling import nu_draws, strata
from sinkhorn_dual.targets import QFunction

from .base import Environment
from .gambling import sample_beta

logger = logging.getLogger(__name__)


class CdfProbeEnv(Environment):
    """State is the threshold x0; next states are drawn from the reference Beta"""

    def __init__(self, params: CdfProbeParams, rng: np.random.Generator):
        super().__init__(rng)
        self.params = params
        self.x = 0.5

    @property
    def state_dim(self) -> int:
        return 1

    @property
    def actions(self) -> np.ndarray:
        return np.array([0.0])

    def _draw(self) -> float:
        a, b = self.params.reference
        return sample_beta(a, b, self.rng)

    def reset(self) -> np.ndarray:
        self.x = self._draw()
        return np.array([self.x])

    def step(self, action_index: int) -> Tuple[np.ndarray, float]:
        x_next = self._draw()
        reward = float(x_next <= self.x)
        self.x = x_next
        return np.array([x_next]), reward

    def reward(self, state: np.ndarray, action_index: int, next_states: np.ndarray) -> np.ndarray:
        next_states = np.asarray(next_states, dtype=float).reshape(-1)
        return (next_states <= float(state[0])).astype(float)


def outer_objective(lambda_raw: float, payoffs: np.ndarray, distances: np.ndarray, epsilon: float,
                    delta: float, log_weights: np.ndarray) -> Tuple[float, float]:
    """Dual objective averaged over the rows of distances (one row per reference sample)"""
    lam = softplus(lambda_raw)
    exponents = (-payoffs[None, :] - lam * distances) / (lam * delta) + log_weights[None, :]
    log_means = logsumexp(exponents, axis=1)
    value = -lam * epsilon - lam * delta * float(log_means.mean())
    probs = np.exp(exponents - log_means[:, None])
    grad = -epsilon - delta * float(log_means.mean()) - float((probs @ payoffs).mean()) / lam
    return value, grad * softplus_grad(lambda_raw)


def worst_case_cdf(probe: CdfProbeParams, q_function: Optional[QFunction] = None,
                   solver: Optional[LambdaSolverConfig] = None,
                   rng: Optional[np.random.Generator] = None) -> Dict[float, np.ndarray]:
    """
    Worst-case CDF on probe.grid for every delta in probe.deltas.

    The reference kernel is represented by stratified Beta quantiles and nu by
    its own (stratified) draws. A zero radius returns the reference CDF. When a
    trained q_function is given its discounted continuation is added to the
    indicator payoff.
    """
    solver = solver or LambdaSolverConfig()
    grid = np.asarray(probe.grid, dtype=float)
    a_ref, b_ref = probe.reference
    if probe.epsilon == 0:
        reference = stats.beta.cdf(grid, a_ref, b_ref)
        return {float(delta): reference.copy() for delta in probe.deltas}

    outer = stats.beta.ppf(strata(probe.n_outer), a_ref, b_ref)
    nu_points, weights = nu_draws(probe.nu, probe.n_nu, rng)
    nu_points = np.asarray(nu_points, dtype=float).reshape(-1)
    distances = np.abs(outer[:, None] - nu_points[None, :])
    log_weights = np.log(weights)
    continuation = np.zeros_like(nu_points)
    if q_function is not None:
        continuation = probe.discount * np.asarray(q_function.predict(nu_points[:, None])).max(axis=1)

    curves: Dict[float, np.ndarray] = {}
    for delta in probe.deltas:
        row_log_means = logsumexp(-distances / delta + log_weights[None, :], axis=1)
        eps_bar = probe.epsilon + delta * float(row_log_means.mean())
        if eps_bar < 0:
            raise InfeasibleError(f"epsilon_bar={eps_bar:.4g} < 0 for delta={delta}; enlarge epsilon")
        values = np.empty(grid.size)
        init = None
        for k, x0 in enumerate(grid):
            payoffs = (nu_points <= x0).astype(float) + continuation
            if np.ptp(payoffs) == 0:
                # constant payoff: the supremum f0 is approached as lambda -> 0
                values[k] = payoffs[0]
                continue
            outcome = maximize_dual(
                lambda raw: outer_objective(raw, payoffs, distances, probe.epsilon, delta, log_weights),
                solver, init)
            init = outcome.raw
            values[k] = outcome.value
        logger.info("worst-case CDF for delta=%g: value %.4f at the grid midpoint",
                    delta, values[grid.size // 2])
        curves[float(delta)] = values
    return curves


def discretized_probe_instance(probe: CdfProbeParams, delta: float, x0: float,
                               cells: int = 200) -> DiscreteRobustInstance:
    """The probe at one threshold on `cells` equal cells of [0, 1], masses taken from the CDFs"""
    edges = np.linspace(0.0, 1.0, cells + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    a_ref, b_ref = probe.reference
    p_hat = np.diff(stats.beta.cdf(edges, a_ref, b_ref))
    nu_mass = np.diff(_nu_cdf(probe, edges))
    return DiscreteRobustInstance(
        support=centers,
        p_hat=p_hat / p_hat.sum(),
        nu=nu_mass / nu_mass.sum(),
        payoff=(centers <= x0).astype(float),
        epsilon=probe.epsilon,
        delta=delta,
        note=f"cdf probe x0={x0:g}",
    )


def _nu_cdf(probe: CdfProbeParams, x: np.ndarray) -> np.ndarray:
    nu = probe.nu
    if nu.family is NuFamily.UNIFORM:
        return stats.uniform.cdf(x, nu.lo, nu.hi - nu.lo)
    if nu.family is NuFamily.BETA:
        return stats.beta.cdf(x, nu.a, nu.b)
    raise InfeasibleError(f"cannot discretize nu family {nu.family.value} on [0, 1]")
