"""
Data models for the Sinkhorn robust DQN toolkit

This package contains:
- dataclass domain types (BaseModel subclasses with __post_init__ validation)
- the exception hierarchy shared by every package
- the experiment file schema
"""

from .base import BaseModel
from .errors import (
    RDQNError, InputError, ConfigError, NumericalError, EpsilonBarError,
    TrainingError, InfeasibleError, IngestionError,
)
from .ambiguity import (
    NuFamily, NuSpec, EpsilonBarPolicy, LambdaSolverConfig, AmbiguityConfig, DualSolveResult,
)
from .experience import Transition
from .training import ExplorationSchedule, TrainConfig, TrainLogRow
from .environments import (
    GamblingMode, GamblingParams, CdfProbeParams, PortfolioParams, PortfolioState, SimulatorParams,
)
from .evaluation import EvalStats, PortfolioStats, GameResult, GameSummary, SUMMARY_COLUMNS
from .instance import DiscreteRobustInstance
from .oracle_check import CheckStatus, CheckResult, CheckReport
from .experiment import (
    ExperimentKind, EnvironmentName, EnvironmentSpec, EvaluationSettings,
    OracleCheckSettings, ExperimentConfig,
)

__all__ = [
    'BaseModel',
    'RDQNError', 'InputError', 'ConfigError', 'NumericalError', 'EpsilonBarError',
    'TrainingError', 'InfeasibleError', 'IngestionError',
    'NuFamily', 'NuSpec', 'EpsilonBarPolicy', 'LambdaSolverConfig', 'AmbiguityConfig',
    'DualSolveResult',
    'Transition',
    'ExplorationSchedule', 'TrainConfig', 'TrainLogRow',
    'GamblingMode', 'GamblingParams', 'CdfProbeParams', 'PortfolioParams', 'PortfolioState',
    'SimulatorParams',
    'EvalStats', 'PortfolioStats', 'GameResult', 'GameSummary', 'SUMMARY_COLUMNS',
    'DiscreteRobustInstance',
    'CheckStatus', 'CheckResult', 'CheckReport',
    'ExperimentKind', 'EnvironmentName', 'EnvironmentSpec', 'EvaluationSettings',
    'OracleCheckSettings', 'ExperimentConfig',
]
