"""
Dual of the Sinkhorn-ball robust expectation for one stored transition.

For a multiplier lam > 0, payoffs f_j and transport costs d_j of the nu
samples (weights w_j, 1/N by default):

    V(lam) = -lam * eps - lam * delta * log sum_j w_j exp((-f_j - lam d_j) / (lam delta))

V is concave in lam; its supremum is the worst-case expectation of f over the
ball whenever the effective radius

    eps_bar = eps + delta * log sum_j w_j exp(-d_j / delta)

is nonnegative. The ascent runs on a raw parameter with lam = softplus(raw).
"""

import logging
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from models.ambiguity import AmbiguityConfig, DualSolveResult, LambdaSolverConfig
from models.errors import InputError, NumericalError

from .numerics import softplus, softplus_grad, stable_log_mean_exp

logger = logging.getLogger(__name__)

ObjectiveFn = Callable[[float], Tuple[float, float]]


def euclidean_cost(x_ref: np.ndarray, points: np.ndarray) -> np.ndarray:
    """||x_ref - y_j|| for every row y_j of points"""
    x_ref = np.atleast_1d(np.asarray(x_ref, dtype=float))
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.shape[1] != x_ref.shape[0]:
        raise InputError(f"nu points of dimension {points.shape[1]} cannot be compared "
                         f"with a state of dimension {x_ref.shape[0]}")
    return np.linalg.norm(points - x_ref[None, :], axis=1)


def _log_weights(n: int, weights: Optional[np.ndarray]) -> np.ndarray:
    if weights is None:
        return np.full(n, -np.log(n))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (n,):
        raise InputError("weights must have one entry per nu sample")
    return np.log(weights)


def epsilon_bar_from_distances(distances, epsilon: float, delta: float,
                               weights: Optional[np.ndarray] = None) -> float:
    distances = np.asarray(distances, dtype=float)
    if distances.size == 0:
        raise InputError("epsilon_bar needs at least one nu sample")
    return float(epsilon + delta * stable_log_mean_exp(-distances / delta, weights))


def epsilon_bar(x_next_ref: np.ndarray, nu_samples: np.ndarray, cfg: AmbiguityConfig,
                cost: Callable[[np.ndarray, np.ndarray], np.ndarray] = euclidean_cost,
                weights: Optional[np.ndarray] = None) -> float:
    """Effective radius of the ball for one observed next state"""
    return epsilon_bar_from_distances(cost(x_next_ref, nu_samples), cfg.epsilon, cfg.delta, weights)


def _check_inputs(payoffs, distances) -> Tuple[np.ndarray, np.ndarray]:
    payoffs = np.asarray(payoffs, dtype=float).ravel()
    distances = np.asarray(distances, dtype=float).ravel()
    if payoffs.size == 0 or payoffs.shape != distances.shape:
        raise InputError("payoffs and distances must be non-empty and of equal length")
    return payoffs, distances


def _raise_non_finite(message: str, values: np.ndarray):
    index = int(np.flatnonzero(~np.isfinite(values))[0])
    raise NumericalError(f"{message} at nu sample {index}", sample_index=index)


def dual_value_and_grad(lam: float, payoffs: np.ndarray, distances: np.ndarray, epsilon: float,
                        delta: float, weights: Optional[np.ndarray] = None) -> Tuple[float, float]:
    """V(lam) and dV/dlam for a positive multiplier"""
    payoffs, distances = _check_inputs(payoffs, distances)
    if not lam > 0:
        raise InputError("the dual multiplier must be positive")
    if not np.all(np.isfinite(payoffs)):
        _raise_non_finite("non-finite payoff", payoffs)
    exponents = (-payoffs - lam * distances) / (lam * delta)
    if not np.all(np.isfinite(exponents)):
        _raise_non_finite("non-finite dual exponent", exponents)
    shifted = exponents + _log_weights(payoffs.size, weights)
    log_mean = float(logsumexp(shifted))
    value = -lam * epsilon - lam * delta * log_mean
    probs = np.exp(shifted - log_mean)
    grad = -epsilon - delta * log_mean - float(probs @ payoffs) / lam
    if not (np.isfinite(value) and np.isfinite(grad)):
        raise NumericalError(f"non-finite dual objective at lambda={lam:.6g}")
    return value, grad


def dual_objective(lambda_raw: float, payoffs, distances, cfg: AmbiguityConfig,
                   weights: Optional[np.ndarray] = None) -> Tuple[float, float]:
    """(V(softplus(raw)), dV/draw)"""
    lam = softplus(lambda_raw)
    value, grad = dual_value_and_grad(lam, payoffs, distances, cfg.epsilon, cfg.delta, weights)
    return value, grad * softplus_grad(lambda_raw)


class AscentOutcome(NamedTuple):
    raw: float
    value: float
    iterations: int
    converged: bool


def _bisect_sign_change(objective: ObjectiveFn, lo: float, hi: float, lo_sign: float,
                        solver: LambdaSolverConfig) -> float:
    """Shrink [lo, hi] around the point where the gradient changes sign"""
    for _ in range(solver.refine_iters):
        if abs(hi - lo) <= solver.refine_tol:
            break
        mid = 0.5 * (lo + hi)
        _, grad = objective(mid)
        if grad == 0:
            return mid
        if np.sign(grad) == lo_sign:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def maximize_dual(objective: ObjectiveFn, solver: LambdaSolverConfig,
                  init: Optional[float] = None) -> AscentOutcome:
    """
    Gradient ascent on a raw multiplier with step eta0 * (1 + k / k_sched).

    Stops when the gradient sign differs from the sign at the start, or when the
    gradient vanishes. The last bracket [previous, current] is then bisected on
    the gradient sign. Only ascent steps count as iterations.
    """
    raw = solver.init_raw if init is None else float(init)
    value, grad = objective(raw)
    if abs(grad) <= solver.grad_tol:
        return AscentOutcome(raw, value, 0, True)
    start_sign = np.sign(grad)
    for k in range(solver.max_iters):
        previous = raw
        raw = raw + solver.step_size(k) * grad
        value, grad = objective(raw)
        if abs(grad) <= solver.grad_tol:
            return AscentOutcome(raw, value, k + 1, True)
        if np.sign(grad) != start_sign:
            if solver.refine_iters > 0:
                raw = _bisect_sign_change(objective, previous, raw, start_sign, solver)
                value, _ = objective(raw)
            return AscentOutcome(raw, value, k + 1, True)
    return AscentOutcome(raw, value, solver.max_iters, False)


def solve_lambda(payoffs, distances, cfg: AmbiguityConfig, init: Optional[float] = None,
                 weights: Optional[np.ndarray] = None) -> DualSolveResult:
    """Maximize the dual over lambda for one transition, warm-started from init"""
    payoffs, distances = _check_inputs(payoffs, distances)
    eps_bar = epsilon_bar_from_distances(distances, cfg.epsilon, cfg.delta, weights)

    def objective(raw: float) -> Tuple[float, float]:
        return dual_objective(raw, payoffs, distances, cfg, weights)

    outcome = maximize_dual(objective, cfg.solver, init)
    if not outcome.converged:
        logger.debug("lambda ascent hit max_iters=%d (raw=%.4g)", cfg.solver.max_iters, outcome.raw)
    return DualSolveResult(
        lambda_star=softplus(outcome.raw),
        value=outcome.value,
        epsilon_bar=eps_bar,
        iterations=outcome.iterations,
        from_cache=init is not None,
        converged=outcome.converged,
        lambda_raw=outcome.raw,
    )
