"""
DQN and Robust DQN training loop.

Environments are stepped round-robin, transitions go to a replay buffer, and
every `update_every` steps the network takes `gradient_steps` Adam steps, each
on a fresh batch with targets computed from the target network and held
fixed. Without an ambiguity config the targets are the standard DQN ones and
the robust code path is never entered.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from envs.base import Environment
from models.errors import InputError
from models.experience import Transition
from models.training import TrainConfig, TrainLogRow
from nn.network import QNetwork, backward, forward_batch, sync_target
from nn.optim import AdamState, adam_step
from sinkhorn_dual.cache import LambdaCache
from sinkhorn_dual.targets import NuStreams, dqn_target_batch, robust_target_batch
from utils.seeding import derive_rng, derive_seed_sequence
from utils.tables import write_csv

from .policy import select_action
from .replay import ReplayBuffer

logger = logging.getLogger(__name__)

# stream keys under the training seed
INIT_STREAM, EXPLORE_STREAM, BATCH_STREAM, NU_STREAM = 0, 1, 2, 3


@dataclass
class TrainResult:
    network: QNetwork
    target_network: QNetwork
    log: List[TrainLogRow] = field(default_factory=list)
    gradient_steps: int = 0
    non_converged: int = 0
    dropped: int = 0

    def write_log(self, path: Union[str, Path]) -> Path:
        return write_csv(path, (row.to_dict() for row in self.log), TrainLogRow.CSV_COLUMNS)


def q_loss_and_grads(net: QNetwork, transitions: Sequence[Transition],
                     targets: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    """
    Mean squared error between Q(x_i, a_i) and fixed targets, and its gradient.

    NaN targets (dropped transitions) are left out of both.
    """
    targets = np.asarray(targets, dtype=float)
    keep = ~np.isnan(targets)
    if not np.any(keep):
        raise InputError("every target in the batch was dropped")
    states = np.stack([tr.state for tr, k in zip(transitions, keep) if k])
    actions = np.array([tr.action for tr, k in zip(transitions, keep) if k])
    kept_targets = targets[keep]
    outputs, _ = forward_batch(net, states)
    rows = np.arange(actions.size)
    residual = outputs[rows, actions] - kept_targets
    loss = float(np.mean(residual ** 2))
    output_grads = np.zeros_like(outputs)
    output_grads[rows, actions] = 2.0 * residual / actions.size
    return loss, backward(net, states, output_grads)


def _as_env_list(envs: Union[Environment, Sequence[Environment]]) -> List[Environment]:
    env_list = [envs] if isinstance(envs, Environment) else list(envs)
    if not env_list:
        raise InputError("train needs at least one environment")
    first = env_list[0]
    for env in env_list[1:]:
        if env.state_dim != first.state_dim or env.num_actions != first.num_actions:
            raise InputError("all training environments must share state and action spaces")
    return env_list


def train(envs: Union[Environment, Sequence[Environment]], cfg: TrainConfig,
          network: Optional[QNetwork] = None) -> TrainResult:
    """Train a Q-network; a single environment or a batch stepped round-robin"""
    env_list = _as_env_list(envs)
    first = env_list[0]
    if network is None:
        sizes = [first.state_dim] + list(cfg.hidden_sizes) + [first.num_actions]
        network = QNetwork.initialize(sizes, derive_rng(cfg.seed, INIT_STREAM))
    target = sync_target(network)
    result = TrainResult(network=network, target_network=target)
    if cfg.total_steps == 0:
        return result

    optimizer = AdamState.for_network(network, learning_rate=cfg.learning_rate)
    buffer = ReplayBuffer(cfg.buffer_capacity)
    cache = LambdaCache(cfg.ambiguity) if cfg.robust else None
    explore_rng = derive_rng(cfg.seed, EXPLORE_STREAM)
    batch_rng = derive_rng(cfg.seed, BATCH_STREAM)
    nu_seed = derive_seed_sequence(cfg.seed, NU_STREAM)
    states = [env.reset() for env in env_list]
    warmup = max(cfg.learning_starts, cfg.batch_size)

    window = _LogWindow()
    for step in range(cfg.total_steps):
        k = step % len(env_list)
        explore_eps = cfg.exploration.value(step, cfg.total_steps)
        action = select_action(network, states[k], explore_eps, explore_rng)
        next_state, reward = env_list[k].step(action)
        slot, evicted = buffer.push(Transition(states[k], action, reward, next_state))
        if evicted and cache is not None:
            cache.invalidate(slot)
        states[k] = next_state

        if len(buffer) >= warmup and (step + 1) % cfg.update_every == 0:
            for g in range(cfg.gradient_steps):
                slots, batch = buffer.sample(cfg.batch_size, batch_rng)
                if cfg.robust:
                    streams = NuStreams(nu_seed, step * cfg.gradient_steps + g)
                    targets = robust_target_batch(batch, result.target_network, first, cfg.ambiguity,
                                                  cache, streams, cfg.discount, slot_ids=slots)
                    values = targets.values
                    window.add_robust(targets)
                    result.non_converged += targets.non_converged
                    result.dropped += int(targets.dropped.sum())
                    if targets.dropped.all():
                        continue
                else:
                    values = dqn_target_batch(batch, result.target_network, cfg.discount)
                    window.add_targets(values)
                loss, grads = q_loss_and_grads(network, batch, values)
                adam_step(network, grads, optimizer)
                window.add_loss(loss)
                result.gradient_steps += 1
                if result.gradient_steps % cfg.target_sync_period == 0:
                    result.target_network = sync_target(network)

        if (step + 1) % cfg.log_every == 0 and window.updates:
            row = window.row(step + 1, explore_eps)
            result.log.append(row)
            logger.info("step=%d loss=%.5g mean_lambda=%.4g eps_bar_negatives=%d mean_target=%.4g "
                        "explore_eps=%.3f", row.step, row.loss, row.mean_lambda, row.eps_bar_negatives,
                        row.mean_target, row.explore_eps)
            window = _LogWindow()

    if result.non_converged:
        logger.debug("%d lambda solves hit max_iters during training", result.non_converged)
    return result


class _LogWindow:
    """Running sums between two log rows"""

    def __init__(self):
        self.losses: List[float] = []
        self.lambdas: List[float] = []
        self.targets: List[float] = []
        self.negatives = 0
        self.updates = 0

    def add_loss(self, loss: float):
        self.losses.append(loss)

    def add_targets(self, values: np.ndarray):
        self.targets.extend(values.tolist())
        self.updates += 1

    def add_robust(self, batch):
        kept = ~batch.dropped
        self.targets.extend(batch.values[kept].tolist())
        self.lambdas.extend(batch.lambda_star[kept].tolist())
        self.negatives += batch.eps_bar_negatives
        self.updates += 1

    def row(self, step: int, explore_eps: float) -> TrainLogRow:
        def mean(values: List[float]) -> float:
            return float(np.mean(values)) if values else float("nan")

        return TrainLogRow(step=step, loss=mean(self.losses), mean_lambda=mean(self.lambdas),
                           eps_bar_negatives=self.negatives, mean_target=mean(self.targets),
                           explore_eps=explore_eps)
