"""
Overflow-safe scalar helpers for the dual objective.
"""

from typing import Optional, Union

import numpy as np
from scipy.special import expit, logsumexp

from models.errors import InputError

ArrayLike = Union[float, np.ndarray]


def softplus(x: ArrayLike) -> ArrayLike:
    """log(1 + e^x) as max(x, 0) + log1p(e^-|x|)"""
    x = np.asarray(x, dtype=float)
    out = np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
    return float(out) if out.ndim == 0 else out


def softplus_grad(x: ArrayLike) -> ArrayLike:
    """d softplus / dx, the logistic sigmoid"""
    out = expit(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def inverse_softplus(y: float) -> float:
    """Raw parameter whose softplus is y > 0"""
    if y <= 0:
        raise InputError("inverse_softplus needs a positive argument")
    # log(e^y - 1) = y + log(1 - e^-y)
    return float(y + np.log(-np.expm1(-y)))


def stable_log_mean_exp(values, weights: Optional[np.ndarray] = None) -> float:
    """
    log((1/N) sum_i e^{v_i}), or log(sum_i w_i e^{v_i}) when weights are given.

    The maximum is subtracted before exponentiating, so finite inputs never
    overflow.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise InputError("stable_log_mean_exp needs at least one value")
    if weights is None:
        return float(logsumexp(values) - np.log(values.size))
    weights = np.asarray(weights, dtype=float).ravel()
    if weights.shape != values.shape:
        raise InputError("weights must match values")
    return float(logsumexp(values, b=weights))
