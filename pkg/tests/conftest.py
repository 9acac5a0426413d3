"""
Shared fixtures for the test suite
"""

import os
from typing import Tuple

import numpy as np
import pytest

from config import TestingConfig
from envs.base import Environment
from models.ambiguity import AmbiguityConfig, LambdaSolverConfig, NuSpec
from models.experience import Transition
from nn.network import QNetwork


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def settings():
    return TestingConfig


@pytest.fixture
def small_net(rng):
    return QNetwork.initialize([2, 8, 6, 3], rng, activation="tanh")


@pytest.fixture
def uniform_ambiguity():
    return AmbiguityConfig(epsilon=0.3, delta=0.5, nu=NuSpec.uniform(0.0, 1.0), n_nu=64,
                           solver=LambdaSolverConfig())


@pytest.fixture
def slow_enabled():
    if os.environ.get("RDQN_RUN_SLOW") != "1":
        pytest.skip("set RDQN_RUN_SLOW=1 to run long training checks")


class ConstantRewardEnv(Environment):
    """One state, next state always the same; reward per action"""

    def __init__(self, rewards, rng, state_value: float = 0.5):
        super().__init__(rng)
        self.rewards = np.asarray(rewards, dtype=float)
        self.state_value = state_value

    @property
    def state_dim(self) -> int:
        return 1

    @property
    def actions(self) -> np.ndarray:
        return np.arange(self.rewards.size, dtype=float)

    def reset(self) -> np.ndarray:
        return np.array([self.state_value])

    def step(self, action_index: int) -> Tuple[np.ndarray, float]:
        return np.array([self.state_value]), float(self.rewards[action_index])

    def reward(self, state, action_index, next_states):
        next_states = np.asarray(next_states, dtype=float).reshape(-1)
        return np.full(next_states.shape, self.rewards[action_index])


class FlipEnv(Environment):
    """Two states {0, 1}; reward 1 for choosing the action equal to the state, next state flips"""

    def __init__(self, rng):
        super().__init__(rng)
        self.x = 0

    @property
    def state_dim(self) -> int:
        return 1

    @property
    def actions(self) -> np.ndarray:
        return np.array([0.0, 1.0])

    def reset(self) -> np.ndarray:
        self.x = int(self.rng.integers(2))
        return np.array([float(self.x)])

    def step(self, action_index: int) -> Tuple[np.ndarray, float]:
        reward = float(action_index == self.x)
        self.x = 1 - self.x
        return np.array([float(self.x)]), reward

    def reward(self, state, action_index, next_states):
        next_states = np.asarray(next_states, dtype=float).reshape(-1)
        return np.full(next_states.shape, float(action_index == int(round(state[0]))))


@pytest.fixture
def constant_env_factory():
    return ConstantRewardEnv


@pytest.fixture
def flip_env_factory():
    return FlipEnv


def make_transitions(states, actions, rewards, next_states):
    return [Transition(np.atleast_1d(s), a, r, np.atleast_1d(n))
            for s, a, r, n in zip(states, actions, rewards, next_states)]


@pytest.fixture
def transitions_factory():
    return make_transitions
