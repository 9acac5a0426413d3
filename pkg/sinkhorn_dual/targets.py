"""
Bellman targets for a batch of stored transitions: robust (dual) and plain DQN.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence, Union

import numpy as np

from models.ambiguity import AmbiguityConfig, EpsilonBarPolicy
from models.errors import EpsilonBarError, InputError, NumericalError
from models.experience import Transition
from utils.seeding import SeedLike, derive_rng

from .cache import LambdaCache
from .dual import epsilon_bar_from_distances, euclidean_cost, solve_lambda
from .sampling import nu_draws

logger = logging.getLogger(__name__)


class QFunction(Protocol):
    def predict(self, states: np.ndarray) -> np.ndarray: ...


class TransitionModel(Protocol):
    """What the robust target needs to know about an environment"""

    def reward(self, state: np.ndarray, action: int, next_states: np.ndarray) -> np.ndarray: ...

    def lift_nu(self, state: np.ndarray, action: int, next_state_ref: np.ndarray,
                nu_points: np.ndarray) -> np.ndarray: ...

    def nu_cost(self, next_state_ref: np.ndarray, nu_points: np.ndarray) -> np.ndarray: ...


@dataclass
class RewardModel:
    """TransitionModel from a plain reward function; nu points are next states"""
    reward_fn: Callable[[np.ndarray, int, np.ndarray], np.ndarray]
    cost_fn: Callable[[np.ndarray, np.ndarray], np.ndarray] = euclidean_cost

    def reward(self, state, action, next_states):
        return np.asarray(self.reward_fn(state, action, next_states), dtype=float)

    def lift_nu(self, state, action, next_state_ref, nu_points):
        points = np.asarray(nu_points, dtype=float)
        return points[:, None] if points.ndim == 1 else points

    def nu_cost(self, next_state_ref, nu_points):
        return self.cost_fn(next_state_ref, nu_points)


@dataclass
class TargetBatch:
    """Per-transition robust targets; dropped rows hold NaN"""
    values: np.ndarray
    lambda_star: np.ndarray
    epsilon_bar: np.ndarray
    dropped: np.ndarray
    non_converged: int = 0
    cache_hits: int = 0

    @property
    def eps_bar_negatives(self) -> int:
        return int(np.count_nonzero(self.epsilon_bar < 0))

    @property
    def mean_lambda(self) -> float:
        kept = self.lambda_star[~self.dropped]
        return float(kept.mean()) if kept.size else float("nan")

    @property
    def mean_target(self) -> float:
        kept = self.values[~self.dropped]
        return float(kept.mean()) if kept.size else float("nan")


@dataclass(frozen=True)
class NuStreams:
    """One nu stream per replay slot and update: derive_rng(seed, slot, update)"""
    seed: SeedLike
    update: int

    def for_slot(self, slot: int) -> np.random.Generator:
        return derive_rng(self.seed, slot, self.update)


def _continuation(q_target: QFunction, next_states: np.ndarray) -> np.ndarray:
    return np.asarray(q_target.predict(next_states), dtype=float).max(axis=1)


def robust_target_batch(transitions: Sequence[Transition], q_target: QFunction, model: TransitionModel,
                        cfg: AmbiguityConfig, cache: Optional[LambdaCache],
                        rng: Union[np.random.Generator, NuStreams], discount: float,
                        slot_ids: Optional[Sequence[int]] = None) -> TargetBatch:
    """
    Robust targets inf over the Sinkhorn ball of r + discount * max_b Q_target.

    Each transition uses its own stored next state as the single sample of the
    reference kernel. Cached lambdas (by slot id) warm-start the ascent and the
    optimized lambdas are written back. With NuStreams each transition draws
    its nu sample from its own slot stream, so targets do not depend on the
    order of the batch.
    """
    if not transitions:
        raise InputError("robust_target_batch needs at least one transition")
    if slot_ids is not None and len(slot_ids) != len(transitions):
        raise InputError("slot_ids must match transitions")
    if isinstance(rng, NuStreams) and slot_ids is None:
        raise InputError("per-slot nu streams need slot_ids")
    if cache is not None:
        cache.bind(cfg)

    n = len(transitions)
    values = np.full(n, np.nan)
    lambdas = np.full(n, np.nan)
    eps_bars = np.zeros(n)
    dropped = np.zeros(n, dtype=bool)
    non_converged = 0
    hits = 0

    for i, tr in enumerate(transitions):
        slot = None if slot_ids is None else int(slot_ids[i])
        stream = rng.for_slot(slot) if isinstance(rng, NuStreams) else rng
        points, weights = nu_draws(cfg.nu, cfg.n_nu, stream)
        distances = np.asarray(model.nu_cost(tr.next_state, points), dtype=float)
        eps_bars[i] = epsilon_bar_from_distances(distances, cfg.epsilon, cfg.delta, weights)
        if eps_bars[i] < 0:
            if cfg.epsilon_bar_policy is EpsilonBarPolicy.ERROR:
                raise EpsilonBarError(i, float(eps_bars[i]))
            logger.warning("epsilon_bar=%.4g < 0 for transition %d, dropping it from the batch",
                           eps_bars[i], i)
            dropped[i] = True
            continue

        next_states = model.lift_nu(tr.state, tr.action, tr.next_state, points)
        payoffs = model.reward(tr.state, tr.action, next_states) + discount * _continuation(q_target, next_states)
        if not np.all(np.isfinite(payoffs)):
            bad = int(np.flatnonzero(~np.isfinite(payoffs))[0])
            raise NumericalError(f"non-finite payoff for transition {i} at nu sample {bad}", sample_index=i)

        init = cache.get(slot) if (cache is not None and slot is not None) else None
        hits += init is not None
        result = solve_lambda(payoffs, distances, cfg, init=init, weights=weights)
        if cache is not None and slot is not None:
            cache.put(slot, result.lambda_raw)
        non_converged += not result.converged
        values[i] = result.value
        lambdas[i] = result.lambda_star

    if non_converged:
        logger.debug("%d of %d lambda solves hit max_iters", non_converged, n)
    return TargetBatch(values=values, lambda_star=lambdas, epsilon_bar=eps_bars, dropped=dropped,
                       non_converged=non_converged, cache_hits=hits)


def dqn_target_batch(transitions: Sequence[Transition], q_target: QFunction, discount: float) -> np.ndarray:
    """r + discount * max_b Q_target(x', b); always bootstraps"""
    if not transitions:
        raise InputError("dqn_target_batch needs at least one transition")
    rewards = np.array([tr.reward for tr in transitions])
    next_states = np.stack([tr.next_state for tr in transitions])
    return rewards + discount * _continuation(q_target, next_states)
