"""
Gambling on the unit interval.

The state x is a number in [0, 1]; the gambler bets a in {-1, 0, 1} on the
direction of the next state. Without a bet the next state is drawn from
Beta(alpha', beta'); a bet tilts the shapes to g(alpha' - a x) and
g(beta' + a (1 - x)) with g the softplus, so betting up from a high state is
punished. Losses are multiplied by the reward factor M.
"""

import logging
from typing import Callable, NamedTuple, Sequence, Tuple

import numpy as np
from scipy import integrate, stats

from models.environments import GamblingParams
from models.errors import InputError
from sinkhorn_dual.numerics import softplus

from .base import Environment

logger = logging.getLogger(__name__)

GAMBLING_ACTIONS = np.array([-1.0, 0.0, 1.0])
MOM_MIN_FACTOR = 1e-3


class BetaFit(NamedTuple):
    alpha_hat: float
    beta_hat: float
    degenerate: bool


def beta_shapes(x, a, params: GamblingParams):
    """Shape parameters of the next-state law after action a in state x"""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    alpha = np.where(a == 0, params.alpha_prime, softplus(params.alpha_prime - a * x))
    beta = np.where(a == 0, params.beta_prime, softplus(params.beta_prime + a * (1.0 - x)))
    if alpha.ndim == 0:
        return float(alpha), float(beta)
    return alpha, beta


def sample_beta(alpha, beta, rng: np.random.Generator, size=None):
    """Beta draws as G1 / (G1 + G2) with independent Gamma(alpha), Gamma(beta)"""
    g1 = rng.standard_gamma(alpha, size=size)
    g2 = rng.standard_gamma(beta, size=size)
    total = g1 + g2
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = g1 / total
    # both draws can underflow to 0 for tiny shapes
    fallback = np.asarray(alpha, dtype=float) / (np.asarray(alpha, dtype=float) + np.asarray(beta, dtype=float))
    out = np.where(total > 0, ratio, fallback)
    return float(out) if np.ndim(out) == 0 else out


def gambling_reward(x, a, x_next, reward_factor: float):
    """a (x' - x), multiplied by reward_factor when negative"""
    gain = np.asarray(a, dtype=float) * (np.asarray(x_next, dtype=float) - np.asarray(x, dtype=float))
    out = np.where(gain < 0, reward_factor * gain, gain)
    return float(out) if out.ndim == 0 else out


def gambling_step(x: float, a: float, params: GamblingParams, rng: np.random.Generator) -> Tuple[float, float]:
    if not 0.0 <= x <= 1.0:
        raise InputError(f"gambling state must lie in [0, 1], got {x}")
    alpha, beta = beta_shapes(x, a, params)
    x_next = sample_beta(alpha, beta, rng)
    return x_next, gambling_reward(x, a, x_next, params.reward_factor)


def fit_beta_mom(samples: Sequence[float]) -> BetaFit:
    """
    Method-of-moments Beta fit.

    With mean m and biased variance v the common factor is m(1-m)/v - 1; a
    non-positive factor (v >= m(1-m)) is clamped to 1e-3 and flagged.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size < 2:
        raise InputError("fit_beta_mom needs at least two samples")
    if np.any(samples <= 0) or np.any(samples >= 1):
        raise InputError("Beta samples must lie strictly inside (0, 1)")
    m = float(samples.mean())
    v = float(samples.var())
    degenerate = v <= 0 or v >= m * (1 - m)
    factor = MOM_MIN_FACTOR if degenerate else m * (1 - m) / v - 1.0
    if degenerate:
        logger.warning("Degenerate method-of-moments fit (mean=%.4f, var=%.4g)", m, v)
    return BetaFit(m * factor, (1 - m) * factor, degenerate)


def gambling_expected_reward(x: float, a: float, params: GamblingParams) -> float:
    """E[r | x, a] by adaptive quadrature against the Beta density"""
    if a == 0:
        return 0.0
    alpha, beta = beta_shapes(x, a, params)

    def integrand(y):
        return gambling_reward(x, a, y, params.reward_factor) * stats.beta.pdf(y, alpha, beta)

    interior = [x] if 0.0 < x < 1.0 else None
    value, _ = integrate.quad(integrand, 0.0, 1.0, points=interior, epsabs=1e-8, limit=200)
    return float(value)


def expected_reward_closed_form(x, a: float, params: GamblingParams):
    """
    Same expectation through incomplete Beta functions, vectorized over x.

    With X ~ Beta(alpha, beta), mean m and I the regularized incomplete Beta,
    E[X 1{X < x}] = m I_x(alpha + 1, beta).
    """
    x = np.asarray(x, dtype=float)
    if a == 0:
        return np.zeros_like(x) if x.ndim else 0.0
    alpha, beta = beta_shapes(x, a, params)
    m = alpha / (alpha + beta)
    below = stats.beta.cdf(x, alpha, beta)
    below_mean = m * stats.beta.cdf(x, alpha + 1.0, beta)
    if a > 0:
        # loss when X < x
        loss = a * (below_mean - x * below)
    else:
        # loss when X > x
        loss = a * ((m - below_mean) - x * (1.0 - below))
    out = a * (m - x) + (params.reward_factor - 1.0) * loss
    return float(out) if np.ndim(out) == 0 else out


def greedy_expected_reward_policy(params: GamblingParams,
                                  actions: np.ndarray = GAMBLING_ACTIONS) -> Callable[[np.ndarray], np.ndarray]:
    """Action indices maximizing the one-step expected reward, lowest index on ties"""

    def policy(states: np.ndarray) -> np.ndarray:
        states = np.atleast_1d(np.asarray(states, dtype=float))
        table = np.stack([np.broadcast_to(expected_reward_closed_form(states, a, params), states.shape)
                          for a in actions], axis=-1)
        return np.argmax(table, axis=-1)

    return policy


def simulate_policy(policy: Callable[[np.ndarray], np.ndarray], params: GamblingParams, steps: int,
                    rng: np.random.Generator, chains: int = 1000,
                    actions: np.ndarray = GAMBLING_ACTIONS) -> float:
    """Mean reward per step of a policy over `chains` parallel trajectories"""
    if steps < 1:
        raise InputError("simulate_policy needs steps >= 1")
    chains = min(chains, steps)
    horizon = -(-steps // chains)
    x = sample_beta(np.full(chains, params.alpha_prime), np.full(chains, params.beta_prime), rng)
    total = 0.0
    for _ in range(horizon):
        a = actions[policy(x)]
        alpha, beta = beta_shapes(x, a, params)
        x_next = sample_beta(alpha, beta, rng)
        total += float(np.sum(gambling_reward(x, a, x_next, params.reward_factor)))
        x = x_next
    return total / (horizon * chains)


class GamblingEnv(Environment):
    """One gambler; `params` is the law used for stepping (true or fitted)"""

    def __init__(self, params: GamblingParams, rng: np.random.Generator):
        super().__init__(rng)
        self.params = params
        self.x = 0.5

    @property
    def state_dim(self) -> int:
        return 1

    @property
    def actions(self) -> np.ndarray:
        return GAMBLING_ACTIONS

    def reset(self) -> np.ndarray:
        self.x = sample_beta(self.params.alpha_prime, self.params.beta_prime, self.rng)
        return np.array([self.x])

    def step(self, action_index: int) -> Tuple[np.ndarray, float]:
        self.x, reward = gambling_step(self.x, self.actions[action_index], self.params, self.rng)
        return np.array([self.x]), reward

    def reward(self, state: np.ndarray, action_index: int, next_states: np.ndarray) -> np.ndarray:
        next_states = np.asarray(next_states, dtype=float).reshape(-1)
        return gambling_reward(float(state[0]), self.actions[action_index], next_states,
                               self.params.reward_factor)
