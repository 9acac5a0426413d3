"""
Action selection.
"""

import numpy as np

from nn.network import QNetwork, forward


def greedy_action(net: QNetwork, state: np.ndarray) -> int:
    """argmax_a Q(x, a); np.argmax keeps the lowest index on ties"""
    return int(np.argmax(forward(net, state)))


def greedy_actions(net: QNetwork, states: np.ndarray) -> np.ndarray:
    return np.argmax(net.predict(states), axis=1)


def select_action(net: QNetwork, state: np.ndarray, explore_eps: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy; one uniform draw per call keeps the stream aligned across runs"""
    if not 0.0 <= explore_eps <= 1.0:
        raise ValueError("explore_eps must lie in [0, 1]")
    if rng.random() < explore_eps:
        return int(rng.integers(net.num_actions))
    return greedy_action(net, state)
