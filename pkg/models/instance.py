"""
----------------------------------------------------------------------------
 Finite-support robust expectation problem used by the brute-force oracles
----------------------------------------------------------------------------
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .base import BaseModel


@dataclass
class DiscreteRobustInstance(BaseModel):
    """inf E_q[f] over q in the Sinkhorn ball around p_hat on a finite support"""
    support: np.ndarray
    p_hat: np.ndarray
    nu: np.ndarray
    payoff: np.ndarray
    epsilon: float
    delta: float
    cost: Optional[np.ndarray] = None
    instance_id: int = 0
    note: str = ""

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=float)
        if self.support.ndim == 1:
            self.support = self.support[:, None]
        self.p_hat = np.asarray(self.p_hat, dtype=float)
        self.nu = np.asarray(self.nu, dtype=float)
        self.payoff = np.asarray(self.payoff, dtype=float)
        n = self.support.shape[0]
        for name in ("p_hat", "nu", "payoff"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} must have one entry per support point ({n})")
        if np.any(self.p_hat < 0) or abs(self.p_hat.sum() - 1.0) > 1e-12:
            raise ValueError("p_hat must lie on the simplex")
        if np.any(self.nu <= 0) or abs(self.nu.sum() - 1.0) > 1e-12:
            raise ValueError("nu must be a strictly positive probability vector")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.cost is None:
            diff = self.support[:, None, :] - self.support[None, :, :]
            self.cost = np.linalg.norm(diff, axis=-1)
        else:
            self.cost = np.asarray(self.cost, dtype=float)
        if self.cost.shape != (n, n):
            raise ValueError("cost must be an n x n matrix")
        if not np.allclose(self.cost, self.cost.T) or np.any(np.diag(self.cost) != 0):
            raise ValueError("cost matrix must be symmetric with zero diagonal")

    @property
    def size(self) -> int:
        return int(self.support.shape[0])

    def replace(self, **changes) -> "DiscreteRobustInstance":
        data = {"support": self.support, "p_hat": self.p_hat, "nu": self.nu,
                "payoff": self.payoff, "epsilon": self.epsilon, "delta": self.delta,
                "cost": self.cost, "instance_id": self.instance_id, "note": self.note}
        data.update(changes)
        return DiscreteRobustInstance(**data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiscreteRobustInstance":
        return cls(**{key: data[key] for key in data if key in cls.__dataclass_fields__})
