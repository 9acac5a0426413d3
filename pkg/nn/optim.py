"""
Adam with bias correction, applied in place to a QNetwork's parameters.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from models.errors import InputError, TrainingError

from .network import QNetwork


@dataclass
class AdamState:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_network(cls, net: QNetwork, learning_rate: float = 1e-3, beta1: float = 0.9,
                    beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        params = net.parameters()
        return cls(learning_rate=learning_rate, beta1=beta1, beta2=beta2, eps=eps, step=0,
                   m=[np.zeros_like(p) for p in params], v=[np.zeros_like(p) for p in params])


def _locate_non_finite(name: str, array: np.ndarray) -> str:
    bad = np.argwhere(~np.isfinite(array))[0]
    return f"{name}[{', '.join(str(int(i)) for i in bad)}]"


def adam_step(net: QNetwork, grads: Sequence[np.ndarray], opt: AdamState) -> Tuple[QNetwork, AdamState]:
    """One bias-corrected Adam update; mutates and returns both arguments"""
    params = net.parameters()
    if len(grads) != len(params):
        raise InputError(f"expected {len(params)} gradient arrays, got {len(grads)}")
    if not opt.m:
        opt.m = [np.zeros_like(p) for p in params]
        opt.v = [np.zeros_like(p) for p in params]
    for name, p, g in zip(net.param_names, params, grads):
        if g.shape != p.shape:
            raise InputError(f"gradient for {name} has shape {g.shape}, expected {p.shape}")
        if not np.all(np.isfinite(g)):
            raise TrainingError("non-finite gradient", location=_locate_non_finite(name, g))

    opt.step += 1
    correction1 = 1.0 - opt.beta1 ** opt.step
    correction2 = 1.0 - opt.beta2 ** opt.step
    for i, (name, p, g) in enumerate(zip(net.param_names, params, grads)):
        opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * g
        opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * g * g
        m_hat = opt.m[i] / correction1
        v_hat = opt.v[i] / correction2
        p -= opt.learning_rate * m_hat / (np.sqrt(v_hat) + opt.eps)
        if not np.all(np.isfinite(p)):
            raise TrainingError("non-finite parameter after update", location=_locate_non_finite(name, p))
    return net, opt
