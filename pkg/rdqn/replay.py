"""
Fixed-capacity experience replay.
"""

from typing import List, Optional, Tuple

import numpy as np

from models.errors import InputError
from models.experience import Transition


class ReplayBuffer:
    """Ring buffer; every stored transition keeps its slot id (used to key cached lambdas)"""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise InputError("replay capacity must be >= 1")
        self.capacity = capacity
        self._slots: List[Optional[Transition]] = [None] * capacity
        self.position = 0
        self.size = 0

    def push(self, transition: Transition) -> Tuple[int, bool]:
        """Store a transition; returns (slot, whether an older transition was overwritten)"""
        slot = self.position
        evicted = self._slots[slot] is not None
        self._slots[slot] = transition
        self.position = (self.position + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)
        return slot, evicted

    def sample(self, batch_size: int, rng: np.random.Generator) -> Tuple[np.ndarray, List[Transition]]:
        """Uniform sample over filled slots, without replacement when the buffer is large enough"""
        if self.size == 0:
            raise InputError("cannot sample from an empty replay buffer")
        slots = rng.choice(self.size, size=batch_size, replace=self.size < batch_size)
        return slots, [self._slots[s] for s in slots]

    def __getitem__(self, slot: int) -> Transition:
        transition = self._slots[slot]
        if transition is None:
            raise IndexError(f"replay slot {slot} is empty")
        return transition

    def __len__(self) -> int:
        return self.size
