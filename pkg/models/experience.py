"""
----------------------------------------------------------------------------
 One experience tuple (x, a, r, x') as stored in the replay buffer
----------------------------------------------------------------------------
"""

from dataclasses import dataclass

import numpy as np

from .base import BaseModel


@dataclass
class Transition(BaseModel):
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray

    def __post_init__(self):
        self.state = np.atleast_1d(np.asarray(self.state, dtype=float))
        self.next_state = np.atleast_1d(np.asarray(self.next_state, dtype=float))
        self.action = int(self.action)
        self.reward = float(self.reward)
        if self.state.shape != self.next_state.shape:
            raise ValueError("state and next_state must have the same shape")
        if self.action < 0:
            raise ValueError("action index cannot be negative")
        if not (np.all(np.isfinite(self.state)) and np.all(np.isfinite(self.next_state))
                and np.isfinite(self.reward)):
            raise ValueError("transition entries must be finite")

    def validate_actions(self, num_actions: int) -> bool:
        if self.action >= num_actions:
            raise ValueError(f"action index {self.action} out of range for {num_actions} actions")
        return True
