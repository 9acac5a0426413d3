"""
----------------------------------------------------------------------------
 Experiment file schema: one YAML document per experiment, parsed into
 dataclasses with dotted error paths
----------------------------------------------------------------------------
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from .ambiguity import AmbiguityConfig
from .base import BaseModel, build_nested, require
from .environments import CdfProbeParams, GamblingMode, GamblingParams, PortfolioParams, SimulatorParams
from .errors import ConfigError
from .training import TrainConfig


class ExperimentKind(Enum):
    TRAIN = "train"
    EVAL = "eval"
    CDF_PROBE = "cdf-probe"
    ORACLE_CHECK = "oracle-check"


class EnvironmentName(Enum):
    GAMBLING = "gambling"
    PORTFOLIO = "portfolio"


@dataclass
class EnvironmentSpec(BaseModel):
    name: EnvironmentName = EnvironmentName.GAMBLING
    gambling: GamblingParams = field(default_factory=GamblingParams)
    reference_samples: int = 5
    portfolio: PortfolioParams = field(default_factory=PortfolioParams)
    simulator: SimulatorParams = field(default_factory=SimulatorParams)
    train_transaction_cost: Optional[float] = None
    price_csv: Optional[str] = None
    episode_length: int = 252

    def __post_init__(self):
        if isinstance(self.name, str):
            try:
                self.name = EnvironmentName(self.name)
            except ValueError:
                raise ConfigError("name", f"must be one of {[e.value for e in EnvironmentName]}") from None
        require(self.reference_samples >= 2, "reference_samples", "must be >= 2")
        require(self.train_transaction_cost is None or self.train_transaction_cost >= 0,
                "train_transaction_cost", "must be >= 0")
        require(self.episode_length >= 1, "episode_length", "must be >= 1")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EnvironmentSpec":
        data = dict(data)
        if "gambling" in data:
            data["gambling"] = build_nested("gambling", lambda d: GamblingParams(**d), data["gambling"])
        if "portfolio" in data:
            data["portfolio"] = build_nested("portfolio", lambda d: PortfolioParams(**d), data["portfolio"])
        if "simulator" in data:
            data["simulator"] = build_nested("simulator", lambda d: SimulatorParams(**d), data["simulator"])
        return cls(**data)


@dataclass
class EvaluationSettings(BaseModel):
    episodes: Optional[int] = None
    steps_per_episode: Optional[int] = None
    mode: GamblingMode = GamblingMode.TRUE_DIST
    checkpoints: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.mode, str):
            try:
                self.mode = GamblingMode(self.mode)
            except ValueError:
                raise ConfigError("mode", "must be 'true' or 'reference'") from None
        require(self.episodes is None or self.episodes >= 1, "episodes", "must be >= 1")
        require(self.steps_per_episode is None or self.steps_per_episode >= 1,
                "steps_per_episode", "must be >= 1")


@dataclass
class OracleCheckSettings(BaseModel):
    instances: int = 50
    min_points: int = 2
    max_points: int = 4
    duality_tolerance: float = 1e-3
    limit_deltas: List[float] = field(default_factory=lambda: [1e-1, 1e-2, 1e-3])
    limit_tolerance: float = 5e-3
    fixture: Optional[str] = None

    def __post_init__(self):
        require(self.instances >= 1, "instances", "must be >= 1")
        require(2 <= self.min_points <= self.max_points <= 4, "max_points",
                "supports must have between 2 and 4 points")
        require(self.duality_tolerance > 0 and self.limit_tolerance > 0, "duality_tolerance",
                "tolerances must be positive")
        require(all(d > 0 for d in self.limit_deltas), "limit_deltas", "must be positive")


@dataclass
class ExperimentConfig(BaseModel):
    kind: ExperimentKind
    environment: EnvironmentSpec = field(default_factory=EnvironmentSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    evaluation: EvaluationSettings = field(default_factory=EvaluationSettings)
    cdf_probe: CdfProbeParams = field(default_factory=CdfProbeParams)
    oracle_check: OracleCheckSettings = field(default_factory=OracleCheckSettings)
    output_dir: str = "runs"
    seed: int = 0
    repetitions: Optional[int] = None
    workers: int = 1
    overwrite: bool = False
    name: str = ""

    def __post_init__(self):
        if isinstance(self.kind, str):
            try:
                self.kind = ExperimentKind(self.kind)
            except ValueError:
                raise ConfigError("kind", f"must be one of {[k.value for k in ExperimentKind]}") from None
        require(self.repetitions is None or self.repetitions >= 1, "repetitions", "must be >= 1")
        require(self.workers >= 1, "workers", "must be >= 1")
        if self.kind is ExperimentKind.EVAL:
            require(bool(self.evaluation.checkpoints), "evaluation.checkpoints",
                    "required for eval experiments")
        if self.environment.price_csv:
            require(Path(self.environment.price_csv).exists(), "environment.price_csv",
                    f"file not found: {self.environment.price_csv}")

    @property
    def ambiguity(self) -> Optional[AmbiguityConfig]:
        return self.train.ambiguity

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("", "experiment file must contain a mapping")
        data = dict(data)
        require("kind" in data, "kind", "is required")
        sections = {
            "environment": EnvironmentSpec.from_dict,
            "train": TrainConfig.from_dict,
            "evaluation": lambda d: EvaluationSettings(**d),
            "cdf_probe": CdfProbeParams.from_dict,
            "oracle_check": lambda d: OracleCheckSettings(**d),
        }
        for key, factory in sections.items():
            if data.get(key) is not None:
                data[key] = build_nested(key, factory, data[key])
        # a top-level ambiguity section is shorthand for train.ambiguity
        if data.get("ambiguity") is not None:
            ambiguity = build_nested("ambiguity", AmbiguityConfig.from_dict, data.pop("ambiguity"))
            train = data.get("train") or TrainConfig()
            train.ambiguity = ambiguity
            data["train"] = train
        else:
            data.pop("ambiguity", None)
        return build_nested("", lambda d: cls(**d), data)
