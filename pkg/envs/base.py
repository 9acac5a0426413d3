"""
Environment interface shared by the trainer, the robust targets and evaluation.

An environment owns its random stream. Besides reset/step it exposes the
pieces the robust target needs: a vectorized reward for hypothetical next
states, a map from nu points to full next states, and the transport cost
between the observed next state and nu points.
"""

from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np

from sinkhorn_dual.dual import euclidean_cost


class Environment(ABC):
    """Infinite-horizon environment with a finite action grid"""

    is_portfolio = False

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    @property
    @abstractmethod
    def state_dim(self) -> int:
        ...

    @property
    @abstractmethod
    def actions(self) -> np.ndarray:
        """Action values; the network works with their indices"""

    @property
    def num_actions(self) -> int:
        return len(self.actions)

    @abstractmethod
    def reset(self) -> np.ndarray:
        ...

    @abstractmethod
    def step(self, action_index: int) -> Tuple[np.ndarray, float]:
        """Advance one step; returns (next_state, reward)"""

    @abstractmethod
    def reward(self, state: np.ndarray, action_index: int, next_states: np.ndarray) -> np.ndarray:
        """r(x, a, x') for every row of next_states"""

    def lift_nu(self, state: np.ndarray, action_index: int, next_state_ref: np.ndarray,
                nu_points: np.ndarray) -> np.ndarray:
        points = np.asarray(nu_points, dtype=float)
        return points.reshape(points.shape[0], self.state_dim)

    def nu_cost(self, next_state_ref: np.ndarray, nu_points: np.ndarray) -> np.ndarray:
        return euclidean_cost(next_state_ref, nu_points)
