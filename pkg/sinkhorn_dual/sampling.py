"""
Samples from the sampling measure nu.

Stratified draws place the i-th point at the quantile F^-1(i/(n+1)), which
makes the inner expectation of the dual deterministic for a fixed n.
"""

from typing import Optional, Tuple

import numpy as np
from scipy import stats

from models.ambiguity import NuFamily, NuSpec
from models.errors import ConfigError, InputError


def strata(n: int) -> np.ndarray:
    """Probability levels i/(n+1), i = 1..n"""
    return np.arange(1, n + 1, dtype=float) / (n + 1)


def _empirical_arrays(spec: NuSpec) -> Tuple[np.ndarray, np.ndarray]:
    support = np.asarray(spec.support, dtype=float)
    if spec.weights is None:
        weights = np.full(support.shape[0], 1.0 / support.shape[0])
    else:
        weights = np.asarray(spec.weights, dtype=float)
    return support, weights


def _squeeze(points: np.ndarray) -> np.ndarray:
    return points[:, 0] if points.ndim == 2 and points.shape[1] == 1 else points


def sample_nu(spec: NuSpec, n: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    n points from nu: shape (n,) for one-dimensional nu, (n, dim) otherwise.

    Stratified sampling needs an invertible CDF, so it is available for the
    continuous families and for one-dimensional Empirical measures; i.i.d.
    draws need an rng.
    """
    if n < 1:
        raise InputError("sample_nu needs n >= 1")
    family = spec.family
    if family is NuFamily.POINT_MASS:
        return _squeeze(np.tile(np.asarray(spec.point, dtype=float), (n, 1)))

    if spec.stratified:
        q = strata(n)
        if family is NuFamily.UNIFORM:
            return spec.lo + (spec.hi - spec.lo) * q
        if family is NuFamily.BETA:
            return stats.beta.ppf(q, spec.a, spec.b)
        if family is NuFamily.STUDENT_T:
            return spec.loc + spec.scale * stats.t.ppf(q, spec.dof)
        if family is NuFamily.EMPIRICAL:
            support, weights = _empirical_arrays(spec)
            if support.shape[1] != 1:
                raise ConfigError("nu.stratified",
                                  "stratified sampling of a multivariate Empirical measure is not supported")
            order = np.argsort(support[:, 0], kind="stable")
            cdf = np.cumsum(weights[order])
            idx = np.minimum(np.searchsorted(cdf, q, side="left"), len(order) - 1)
            return support[order[idx], 0]
        raise ConfigError("nu.family", f"no stratified sampler for {family.value}")

    if rng is None:
        raise InputError("i.i.d. sampling of nu needs an rng")
    if family is NuFamily.UNIFORM:
        return rng.uniform(spec.lo, spec.hi, size=n)
    if family is NuFamily.BETA:
        return rng.beta(spec.a, spec.b, size=n)
    if family is NuFamily.STUDENT_T:
        return spec.loc + spec.scale * rng.standard_t(spec.dof, size=n)
    if family is NuFamily.EMPIRICAL:
        support, weights = _empirical_arrays(spec)
        return _squeeze(support[rng.choice(support.shape[0], size=n, p=weights)])
    raise ConfigError("nu.family", f"unsupported nu family {family.value}")


def nu_draws(spec: NuSpec, n: int, rng: Optional[np.random.Generator] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Points and quadrature weights for the inner expectation under nu.

    A stratified Empirical measure is used exactly: its whole support with its
    own weights, whatever n is. Every other case gives n samples of weight 1/n.
    """
    if spec.family is NuFamily.EMPIRICAL and spec.stratified:
        support, weights = _empirical_arrays(spec)
        return _squeeze(support.copy()), weights
    points = sample_nu(spec, n, rng)
    return points, np.full(points.shape[0], 1.0 / points.shape[0])
