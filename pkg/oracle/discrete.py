"""
Brute-force robust expectations on finite supports.

Everything here works directly on the n x n coupling of a
DiscreteRobustInstance and is written for transparency, not speed:

    sinkhorn_distance_discrete   min over couplings with marginals (p_hat, q) of
                                 <pi, d> + delta * KL(pi | p_hat x nu)
    primal_robust_value          min_q E_q[f] over the ball {q : W_delta(p_hat, q) <= eps}
    dual_robust_value_discrete   max over lambda > 0 of the exact dual objective

The unregularized (delta = 0) problems are linear programs solved by
enumerating basic feasible solutions, so supports are limited to four points
there.
"""

import itertools
import logging
import math
from typing import Tuple

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from models.errors import InfeasibleError, InputError
from models.instance import DiscreteRobustInstance
from utils.optimize import golden_section_maximize, golden_section_maximize_log

logger = logging.getLogger(__name__)

MAX_LP_POINTS = 4
MARGINAL_TOL = 1e-12
SIMPLEX_TOL = 1e-9
LAMBDA_BRACKET = (1e-8, 1e4)
PRIMAL_GRID_STEPS = {3: 16, 4: 8}
PRIMAL_FLOOR = 1e-9
PRIMAL_FEASIBILITY_TOL = 1e-8


# ----------------------------------------------------------------------------
# linear programs by vertex enumeration
# ----------------------------------------------------------------------------

def _independent_rows(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    keep = []
    for i in range(a.shape[0]):
        if np.linalg.matrix_rank(a[keep + [i]]) == len(keep) + 1:
            keep.append(i)
    return a[keep], b[keep]


def solve_lp_by_vertices(c: np.ndarray, a_eq: np.ndarray, b_eq: np.ndarray,
                         tol: float = 1e-12) -> Tuple[float, np.ndarray]:
    """min c.x s.t. a_eq x = b_eq, x >= 0, by checking every basis"""
    a_eq, b_eq = _independent_rows(np.asarray(a_eq, dtype=float), np.asarray(b_eq, dtype=float))
    m, n = a_eq.shape
    best_value, best_x = math.inf, None
    for basis in itertools.combinations(range(n), m):
        a_b = a_eq[:, basis]
        if abs(np.linalg.det(a_b)) < 1e-12:
            continue
        x_b = np.linalg.solve(a_b, b_eq)
        if np.any(x_b < -tol):
            continue
        x = np.zeros(n)
        x[list(basis)] = np.maximum(x_b, 0.0)
        value = float(c @ x)
        if value < best_value:
            best_value, best_x = value, x
    if best_x is None:
        raise InfeasibleError("linear program has no feasible vertex")
    return best_value, best_x


def _check_lp_size(n: int):
    if n > MAX_LP_POINTS:
        raise InputError(f"vertex enumeration supports at most {MAX_LP_POINTS} points, got {n}")


def wasserstein_distance_discrete(p: np.ndarray, q: np.ndarray, cost: np.ndarray) -> float:
    """Transport LP between two weight vectors on the same support"""
    n = p.size
    _check_lp_size(n)
    rows = np.kron(np.eye(n), np.ones((1, n)))          # sum_j pi_ij = p_i
    cols = np.kron(np.ones((1, n)), np.eye(n))          # sum_i pi_ij = q_j
    value, _ = solve_lp_by_vertices(cost.ravel(), np.vstack([rows, cols]), np.concatenate([p, q]))
    return value


def wasserstein_robust_value(inst: DiscreteRobustInstance) -> float:
    """
    min over couplings with first marginal p_hat and <pi, d> <= eps of
    sum_ij pi_ij f_j; a slack variable turns the budget into an equality.
    """
    n = inst.size
    _check_lp_size(n)
    rows = np.kron(np.eye(n), np.ones((1, n)))
    a_eq = np.zeros((n + 1, n * n + 1))
    a_eq[:n, :n * n] = rows
    a_eq[n, :n * n] = inst.cost.ravel()
    a_eq[n, -1] = 1.0
    b_eq = np.concatenate([inst.p_hat, [inst.epsilon]])
    c = np.concatenate([np.tile(inst.payoff, n), [0.0]])
    value, _ = solve_lp_by_vertices(c, a_eq, b_eq)
    return value


# ----------------------------------------------------------------------------
# entropic transport
# ----------------------------------------------------------------------------

def _validate_marginal(inst: DiscreteRobustInstance, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (inst.size,):
        raise InputError(f"candidate weights must have {inst.size} entries")
    if np.any(q < -SIMPLEX_TOL) or abs(q.sum() - 1.0) > SIMPLEX_TOL:
        raise InputError("candidate weights are not on the simplex (infeasible marginals)")
    q = np.maximum(q, 0.0)
    return q / q.sum()


def _sinkhorn_scaling(inst: DiscreteRobustInstance, q: np.ndarray,
                      max_iters: int) -> Tuple[np.ndarray, np.ndarray]:
    """Coupling and column log-potential g (NaN where q_j = 0)"""
    rows = np.flatnonzero(inst.p_hat > 0)
    cols = np.flatnonzero(q > 0)
    log_p = np.log(inst.p_hat[rows])
    log_q = np.log(q[cols])
    log_kernel = (log_p[:, None] + np.log(inst.nu[cols])[None, :]
                  - inst.cost[np.ix_(rows, cols)] / inst.delta)
    f = np.zeros(rows.size)
    g = np.zeros(cols.size)
    for _ in range(max_iters):
        f = log_p - logsumexp(log_kernel + g[None, :], axis=1)
        g = log_q - logsumexp(log_kernel + f[:, None], axis=0)
        log_pi = log_kernel + f[:, None] + g[None, :]
        row_error = np.max(np.abs(np.exp(logsumexp(log_pi, axis=1)) - inst.p_hat[rows]))
        if row_error < MARGINAL_TOL:
            break
    else:
        logger.warning("Sinkhorn scaling stopped at max_iters with marginal error %.3g", row_error)
    pi = np.zeros((inst.size, inst.size))
    pi[np.ix_(rows, cols)] = np.exp(log_pi)
    potential = np.full(inst.size, np.nan)
    potential[cols] = g
    return pi, potential


def sinkhorn_coupling(inst: DiscreteRobustInstance, q: np.ndarray, max_iters: int = 200_000) -> np.ndarray:
    """
    Entropic coupling between p_hat and q relative to p_hat x nu, by
    log-domain Sinkhorn scaling on the positive parts of both marginals.
    """
    pi, _ = _sinkhorn_scaling(inst, q, max_iters)
    return pi


def coupling_cost(inst: DiscreteRobustInstance, pi: np.ndarray) -> float:
    """<pi, d> + delta * KL(pi | p_hat x nu)"""
    transport = float(np.sum(pi * inst.cost))
    if inst.delta == 0:
        return transport
    mask = pi > 0
    reference = np.outer(inst.p_hat, inst.nu)
    entropy = float(np.sum(pi[mask] * np.log(pi[mask] / reference[mask])))
    return transport + inst.delta * entropy


def sinkhorn_distance_discrete(inst: DiscreteRobustInstance, q) -> float:
    q = _validate_marginal(inst, q)
    if inst.delta == 0:
        return wasserstein_distance_discrete(inst.p_hat, q, inst.cost)
    return coupling_cost(inst, sinkhorn_coupling(inst, q))


def sinkhorn_distance_and_gradient(inst: DiscreteRobustInstance, q) -> Tuple[float, np.ndarray]:
    """
    W_delta(p_hat, q) and its gradient in q. The gradient is delta times the
    column potential of the scaling, defined up to a constant shift and only
    where every q_j > 0.
    """
    if inst.delta == 0:
        raise InputError("the unregularized distance has no gradient in q")
    q = _validate_marginal(inst, q)
    if np.any(q == 0):
        raise InputError("the gradient needs strictly positive candidate weights")
    pi, potential = _sinkhorn_scaling(inst, q, 200_000)
    return coupling_cost(inst, pi), inst.delta * potential


# ----------------------------------------------------------------------------
# search over the simplex
# ----------------------------------------------------------------------------

def simplex_grid(n: int, steps: int) -> np.ndarray:
    """Every weight vector on n points whose entries are multiples of 1/steps"""
    points = [np.array(c, dtype=float) / steps
              for c in itertools.product(range(steps + 1), repeat=n - 1) if sum(c) <= steps]
    return np.array([np.append(p, 1.0 - p.sum()) for p in points])


def _interior(q: np.ndarray) -> np.ndarray:
    q = np.clip(q, PRIMAL_FLOOR, None)
    return q / q.sum()


def _slsqp_over_simplex(inst: DiscreteRobustInstance, start: np.ndarray, objective, objective_grad,
                        constrained: bool):
    """SLSQP over the floored simplex, optionally with W_delta(p_hat, q) <= epsilon"""
    memo = {}

    def distance(q):
        key = tuple(q)
        if key not in memo:
            memo[key] = sinkhorn_distance_and_gradient(inst, _interior(q))
        return memo[key]

    constraints = [{"type": "eq", "fun": lambda q: q.sum() - 1.0, "jac": lambda q: np.ones_like(q)}]
    if constrained:
        constraints.append({"type": "ineq", "fun": lambda q: inst.epsilon - distance(q)[0],
                            "jac": lambda q: -distance(q)[1]})
    return optimize.minimize(lambda q: objective(q, distance), _interior(start),
                             jac=lambda q: objective_grad(q, distance), method="SLSQP",
                             bounds=[(PRIMAL_FLOOR, 1.0)] * inst.size, constraints=constraints,
                             options={"ftol": 1e-12, "maxiter": 300})


def _primal_over_simplex(inst: DiscreteRobustInstance) -> float:
    """
    Grid search over the simplex for a feasible start, then SLSQP on the
    linear objective with the Sinkhorn distance as the constraint. When no
    grid point is feasible the distance itself is minimized first.
    """
    grid = simplex_grid(inst.size, PRIMAL_GRID_STEPS[inst.size])
    distances = np.array([sinkhorn_distance_discrete(inst, q) for q in grid])
    values = grid @ inst.payoff
    feasible = np.flatnonzero(distances <= inst.epsilon)
    if feasible.size:
        best = feasible[np.argmin(values[feasible])]
        start, fallback = grid[best], float(values[best])
    else:
        closest = _slsqp_over_simplex(inst, grid[np.argmin(distances)],
                                      lambda q, w: w(q)[0], lambda q, w: w(q)[1], constrained=False)
        start = _interior(closest.x)
        if sinkhorn_distance_discrete(inst, start) > inst.epsilon + PRIMAL_FEASIBILITY_TOL:
            raise InfeasibleError("the Sinkhorn ball is empty (epsilon below the minimal cost)")
        fallback = float(start @ inst.payoff)

    result = _slsqp_over_simplex(inst, start, lambda q, w: float(q @ inst.payoff),
                                 lambda q, w: inst.payoff, constrained=True)
    q = _interior(result.x)
    if sinkhorn_distance_discrete(inst, q) > inst.epsilon + PRIMAL_FEASIBILITY_TOL:
        logger.warning("SLSQP ended outside the ball (%s); keeping the grid value", result.message)
        return fallback
    return min(float(q @ inst.payoff), fallback)


# ----------------------------------------------------------------------------
# robust values
# ----------------------------------------------------------------------------

def exact_epsilon_bar(inst: DiscreteRobustInstance) -> float:
    """eps + delta * sum_i p_i log sum_j nu_j exp(-d_ij / delta)"""
    if inst.delta == 0:
        return inst.epsilon
    rows = inst.p_hat > 0
    inner = logsumexp(-inst.cost[rows] / inst.delta + np.log(inst.nu)[None, :], axis=1)
    return float(inst.epsilon + inst.delta * np.dot(inst.p_hat[rows], inner))


def _primal_two_points(inst: DiscreteRobustInstance, grid_points: int = 201, bisections: int = 60) -> float:
    """
    q = (t, 1 - t): the ball is an interval in t (W_delta is convex in q) and
    the objective is linear, so the optimum is the feasible end closest to
    the cheaper point. A grid locates the interval; bisection sharpens its end.
    """
    f0, f1 = inst.payoff

    def excess(t: float) -> float:
        return sinkhorn_distance_discrete(inst, np.array([t, 1.0 - t])) - inst.epsilon

    grid = np.linspace(0.0, 1.0, grid_points)
    feasible = np.array([excess(t) <= 0 for t in grid])
    if not feasible.any():
        t_best, neg_excess = golden_section_maximize(lambda t: -excess(t), 0.0, 1.0, tol=1e-12)
        if neg_excess < 0:
            raise InfeasibleError("the Sinkhorn ball is empty (epsilon below the minimal cost)")
        return float(t_best * f0 + (1.0 - t_best) * f1)
    if f0 == f1:
        return float(f0)

    idx = np.flatnonzero(feasible)
    # move t toward the point with the smaller payoff
    k, step = (idx[0], -1) if f0 > f1 else (idx[-1], 1)
    inside = grid[k]
    if 0 <= k + step < grid_points:
        outside = grid[k + step]
        for _ in range(bisections):
            mid = 0.5 * (inside + outside)
            if excess(mid) <= 0:
                inside = mid
            else:
                outside = mid
    return float(inside * f0 + (1.0 - inside) * f1)


def primal_robust_value(inst: DiscreteRobustInstance) -> float:
    """
    inf of E_q[f] over the Sinkhorn ball around p_hat.

    delta = 0 is the budgeted transport LP; two-point supports search q
    directly with the Sinkhorn distance; three and four points search the
    simplex on a grid and refine with SLSQP under the distance constraint.
    """
    if inst.delta == 0:
        return wasserstein_robust_value(inst)
    if inst.size == 2:
        return _primal_two_points(inst)
    if inst.size not in PRIMAL_GRID_STEPS:
        raise InputError(f"the primal search handles at most {max(PRIMAL_GRID_STEPS)} support points")
    return _primal_over_simplex(inst)


def dual_objective_discrete(inst: DiscreteRobustInstance, lam: float) -> float:
    """Exact dual objective: the inner expectation is the finite sum under nu"""
    rows = inst.p_hat > 0
    if inst.delta == 0:
        inner = np.min(inst.payoff[None, :] + lam * inst.cost[rows], axis=1)
        return float(-lam * inst.epsilon + np.dot(inst.p_hat[rows], inner))
    exponents = (-inst.payoff[None, :] - lam * inst.cost[rows]) / (lam * inst.delta) + np.log(inst.nu)[None, :]
    inner = logsumexp(exponents, axis=1)
    return float(-lam * inst.epsilon - lam * inst.delta * np.dot(inst.p_hat[rows], inner))


def _wasserstein_dual(inst: DiscreteRobustInstance) -> float:
    """The unregularized dual is piecewise linear in lambda; its maximum sits at a kink"""
    candidates = {0.0}
    f, d = inst.payoff, inst.cost
    for i in np.flatnonzero(inst.p_hat > 0):
        for j, k in itertools.permutations(range(inst.size), 2):
            if d[i, j] != d[i, k]:
                lam = (f[k] - f[j]) / (d[i, j] - d[i, k])
                if lam > 0:
                    candidates.add(float(lam))
    if inst.epsilon == 0:
        candidates.add(LAMBDA_BRACKET[1])
    return max(dual_objective_discrete(inst, lam) for lam in candidates)


def dual_robust_value_discrete(inst: DiscreteRobustInstance, tol: float = 1e-10) -> float:
    """Maximize the dual over lambda in [1e-8, 1e4] by golden-section search on log lambda"""
    eps_bar = exact_epsilon_bar(inst)
    if eps_bar < 0:
        raise InfeasibleError(f"epsilon_bar={eps_bar:.6g} < 0: the dual is not valid for this instance")
    if inst.delta == 0:
        return _wasserstein_dual(inst)
    _, value = golden_section_maximize_log(lambda lam: dual_objective_discrete(inst, lam),
                                           *LAMBDA_BRACKET, tol=tol)
    return value


def minimal_epsilon(inst: DiscreteRobustInstance) -> float:
    """Smallest radius with epsilon_bar >= 0"""
    return inst.epsilon - exact_epsilon_bar(inst)
