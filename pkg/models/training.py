"""
----------------------------------------------------------------------------
 Training configuration and the per-update training log row
----------------------------------------------------------------------------
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .ambiguity import AmbiguityConfig
from .base import BaseModel, build_nested, require


@dataclass
class ExplorationSchedule(BaseModel):
    """Linear epsilon-greedy decay from start to end over decay_fraction of the steps"""
    start: float = 1.0
    end: float = 0.05
    decay_fraction: float = 0.5

    def __post_init__(self):
        require(0.0 <= self.end <= 1.0 and 0.0 <= self.start <= 1.0, "start",
                "exploration rates must lie in [0, 1]")
        require(0.0 < self.decay_fraction <= 1.0, "decay_fraction", "must lie in (0, 1]")

    def value(self, step: int, total_steps: int) -> float:
        decay_steps = max(1.0, self.decay_fraction * total_steps)
        frac = min(1.0, step / decay_steps)
        return self.start + frac * (self.end - self.start)


@dataclass
class TrainConfig(BaseModel):
    """Hyperparameters for DQN / Robust DQN; ambiguity=None means plain DQN"""
    discount: float = 0.9
    batch_size: int = 32
    gradient_steps: int = 1
    target_sync_period: int = 1000
    exploration: ExplorationSchedule = field(default_factory=ExplorationSchedule)
    total_steps: int = 10_000
    seed: int = 0
    ambiguity: Optional[AmbiguityConfig] = None
    hidden_sizes: List[int] = field(default_factory=lambda: [32, 32])
    learning_rate: float = 1e-3
    buffer_capacity: int = 100_000
    learning_starts: int = 100
    update_every: int = 1
    num_envs: int = 1
    log_every: int = 100

    def __post_init__(self):
        require(0.0 < self.discount < 1.0, "discount", "must lie in (0, 1)")
        require(self.batch_size >= 1, "batch_size", "must be >= 1")
        require(self.gradient_steps >= 1, "gradient_steps", "must be >= 1")
        require(self.target_sync_period >= 1, "target_sync_period", "must be >= 1")
        require(self.total_steps >= 0, "total_steps", "must be >= 0")
        require(all(h >= 1 for h in self.hidden_sizes), "hidden_sizes", "layer widths must be >= 1")
        require(self.learning_rate > 0, "learning_rate", "must be positive")
        require(self.buffer_capacity >= self.batch_size, "buffer_capacity",
                "must hold at least one batch")
        require(self.update_every >= 1, "update_every", "must be >= 1")
        require(self.num_envs >= 1, "num_envs", "must be >= 1")
        require(self.log_every >= 1, "log_every", "must be >= 1")

    @property
    def robust(self) -> bool:
        return self.ambiguity is not None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        data = dict(data)
        if "exploration" in data:
            data["exploration"] = build_nested(
                "exploration", lambda d: ExplorationSchedule(**d), data["exploration"])
        if data.get("ambiguity") is not None:
            data["ambiguity"] = build_nested("ambiguity", AmbiguityConfig.from_dict, data["ambiguity"])
        return cls(**data)


@dataclass
class TrainLogRow(BaseModel):
    step: int
    loss: float
    mean_lambda: float
    eps_bar_negatives: int
    mean_target: float
    explore_eps: float

    CSV_COLUMNS = ("step", "loss", "mean_lambda", "eps_bar_negatives", "mean_target", "explore_eps")
