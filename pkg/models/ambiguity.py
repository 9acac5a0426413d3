"""
----------------------------------------------------------------------------
 Ambiguity-set configuration: the Sinkhorn ball radius, its entropic
 regularization, the sampling measure nu and the lambda solver settings.
----------------------------------------------------------------------------
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import math

from .base import BaseModel, build_nested, require
from .errors import ConfigError


class NuFamily(Enum):
    UNIFORM = "uniform"
    BETA = "beta"
    STUDENT_T = "student_t"
    POINT_MASS = "point_mass"
    EMPIRICAL = "empirical"


class EpsilonBarPolicy(Enum):
    ERROR = "error"
    WARN_AND_DROP = "warn_and_drop"


@dataclass
class NuSpec(BaseModel):
    """Sampling measure nu; only the parameters of `family` are read"""
    family: NuFamily = NuFamily.UNIFORM
    lo: float = 0.0
    hi: float = 1.0
    a: float = 1.0
    b: float = 1.0
    loc: float = 0.0
    scale: float = 1.0
    dof: float = 2.0
    point: List[float] = field(default_factory=lambda: [0.0])
    support: List[List[float]] = field(default_factory=list)
    weights: Optional[List[float]] = None
    stratified: bool = True

    def __post_init__(self):
        if isinstance(self.family, str):
            try:
                self.family = NuFamily(self.family)
            except ValueError:
                raise ConfigError("family", f"unsupported nu family {self.family!r}") from None
        if self.family is NuFamily.UNIFORM:
            require(self.hi > self.lo, "hi", "Uniform requires hi > lo")
        elif self.family is NuFamily.BETA:
            require(self.a > 0 and self.b > 0, "a", "Beta requires a, b > 0")
        elif self.family is NuFamily.STUDENT_T:
            require(self.scale > 0, "scale", "StudentT requires scale > 0")
            require(self.dof > 0, "dof", "StudentT requires dof > 0")
        elif self.family is NuFamily.POINT_MASS:
            self.point = [float(v) for v in _as_list(self.point)]
            require(len(self.point) >= 1, "point", "PointMass requires a point")
        elif self.family is NuFamily.EMPIRICAL:
            self.support = [[float(v) for v in _as_list(row)] for row in self.support]
            require(len(self.support) >= 1, "support", "Empirical requires a non-empty support")
            dims = {len(row) for row in self.support}
            require(len(dims) == 1, "support", "Empirical support points must share one dimension")
            if self.weights is not None:
                require(len(self.weights) == len(self.support), "weights",
                        "weights must match the support length")
                require(all(w > 0 for w in self.weights), "weights",
                        "weights must be strictly positive")
                require(abs(sum(self.weights) - 1.0) < 1e-9, "weights", "weights must sum to 1")

    @property
    def dimension(self) -> int:
        if self.family is NuFamily.POINT_MASS:
            return len(self.point)
        if self.family is NuFamily.EMPIRICAL:
            return len(self.support[0])
        return 1

    @classmethod
    def uniform(cls, lo: float = 0.0, hi: float = 1.0, stratified: bool = True) -> "NuSpec":
        return cls(family=NuFamily.UNIFORM, lo=lo, hi=hi, stratified=stratified)

    @classmethod
    def beta(cls, a: float, b: float, stratified: bool = True) -> "NuSpec":
        return cls(family=NuFamily.BETA, a=a, b=b, stratified=stratified)

    @classmethod
    def student_t(cls, loc: float, scale: float, dof: float, stratified: bool = True) -> "NuSpec":
        return cls(family=NuFamily.STUDENT_T, loc=loc, scale=scale, dof=dof, stratified=stratified)

    @classmethod
    def point_mass(cls, y) -> "NuSpec":
        return cls(family=NuFamily.POINT_MASS, point=list(_as_list(y)))

    @classmethod
    def empirical(cls, support, weights=None, stratified: bool = True) -> "NuSpec":
        rows = [list(_as_list(row)) for row in support]
        return cls(family=NuFamily.EMPIRICAL, support=rows,
                   weights=None if weights is None else [float(w) for w in weights],
                   stratified=stratified)

    def label(self) -> str:
        """Short name used in output file names"""
        if self.family is NuFamily.UNIFORM:
            return f"uniform_{self.lo:g}_{self.hi:g}"
        if self.family is NuFamily.BETA:
            return f"beta_{self.a:g}_{self.b:g}"
        if self.family is NuFamily.STUDENT_T:
            return f"t_{self.loc:g}_{self.scale:g}_{self.dof:g}"
        if self.family is NuFamily.POINT_MASS:
            return "point_mass"
        return f"empirical_{len(self.support)}"


@dataclass
class LambdaSolverConfig(BaseModel):
    """Gradient ascent on the raw dual multiplier with a growing step size"""
    init_raw: float = 1.0
    eta0: float = 0.05
    k_sched: float = 50.0
    max_iters: int = 500
    refine_iters: int = 60
    refine_tol: float = 1e-12
    grad_tol: float = 1e-10

    def __post_init__(self):
        require(math.isfinite(self.init_raw), "init_raw", "must be finite")
        require(self.eta0 > 0, "eta0", "must be positive")
        require(self.k_sched > 0, "k_sched", "must be positive")
        require(self.max_iters >= 1, "max_iters", "must be >= 1")
        require(self.refine_iters >= 0, "refine_iters", "must be >= 0")
        require(self.grad_tol >= 0, "grad_tol", "must be >= 0")

    def step_size(self, k: int) -> float:
        return self.eta0 * (1.0 + k / self.k_sched)


@dataclass
class AmbiguityConfig(BaseModel):
    """Sinkhorn ball B_{epsilon,delta} around the reference kernel"""
    epsilon: float
    delta: float
    nu: NuSpec = field(default_factory=NuSpec)
    n_nu: int = 32
    epsilon_bar_policy: EpsilonBarPolicy = EpsilonBarPolicy.ERROR
    solver: LambdaSolverConfig = field(default_factory=LambdaSolverConfig)

    def __post_init__(self):
        if isinstance(self.epsilon_bar_policy, str):
            try:
                self.epsilon_bar_policy = EpsilonBarPolicy(self.epsilon_bar_policy)
            except ValueError:
                raise ConfigError(
                    "epsilon_bar_policy", f"must be one of {[p.value for p in EpsilonBarPolicy]}"
                ) from None
        require(self.epsilon >= 0, "epsilon", "must be >= 0")
        require(self.delta > 0, "delta", "must be > 0")
        require(self.n_nu >= 1, "n_nu", "must be >= 1")

    def cache_key(self) -> Tuple[Any, ...]:
        """Identity used to invalidate cached lambdas when the ball changes"""
        return (self.epsilon, self.delta, self.nu.to_json(), self.n_nu)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AmbiguityConfig":
        data = dict(data)
        if "nu" in data:
            data["nu"] = build_nested("nu", lambda d: NuSpec(**d), data["nu"])
        if "solver" in data:
            data["solver"] = build_nested("solver", lambda d: LambdaSolverConfig(**d), data["solver"])
        return cls(**data)


@dataclass
class DualSolveResult(BaseModel):
    """Outcome of maximizing the dual over lambda for one transition"""
    lambda_star: float
    value: float
    epsilon_bar: float
    iterations: int
    from_cache: bool = False
    converged: bool = True
    lambda_raw: float = 0.0

    def __post_init__(self):
        if not self.lambda_star > 0:
            raise ValueError("lambda_star must be positive")


def _as_list(value) -> list:
    if hasattr(value, "tolist"):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]
