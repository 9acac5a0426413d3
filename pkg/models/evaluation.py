"""
--------------------------------------------------------------------------------
    Evaluation statistics: per-episode results of one trained agent and the
    across-game summary table
--------------------------------------------------------------------------------
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .base import BaseModel

SUMMARY_COLUMNS = ("game", "mean", "std", "min", "q05", "q10", "q50", "max")


@dataclass
class PortfolioStats(BaseModel):
    """Risk metrics of one log-return path, annualised with 252 periods"""
    wealth: float
    max_drawdown: float
    volatility: float
    sharpe: float
    downside_deviation: float
    sortino: float

    @classmethod
    def mean_of(cls, items: List["PortfolioStats"]) -> "PortfolioStats":
        if not items:
            raise ValueError("Cannot average an empty list of portfolio stats")
        return cls(**{name: float(np.mean([getattr(item, name) for item in items]))
                      for name in cls.__dataclass_fields__})


@dataclass
class EvalStats(BaseModel):
    """Per-episode mean rewards of a greedy policy and their distribution"""
    episode_means: List[float]
    steps_per_episode: int
    mean: float = 0.0
    std: float = 0.0
    min: float = 0.0
    q05: float = 0.0
    q10: float = 0.0
    q50: float = 0.0
    max: float = 0.0
    portfolio: List[PortfolioStats] = field(default_factory=list)

    def __post_init__(self):
        if not self.episode_means:
            raise ValueError("EvalStats needs at least one episode")
        if self.steps_per_episode < 1:
            raise ValueError("steps_per_episode must be >= 1")
        means = np.asarray(self.episode_means, dtype=float)
        # equal episode lengths: mean of means is the mean reward per step
        self.mean = float(means.mean())
        self.std = float(means.std())
        self.min = float(means.min())
        self.q05, self.q10, self.q50 = (float(q) for q in np.quantile(means, [0.05, 0.10, 0.50]))
        self.max = float(means.max())

    @property
    def portfolio_mean(self) -> Optional[PortfolioStats]:
        return PortfolioStats.mean_of(self.portfolio) if self.portfolio else None


@dataclass
class GameResult(BaseModel):
    """One repetition of the game: fitted reference, evaluation mean reward per step"""
    game: int
    mean_reward: float
    alpha_hat: Optional[float] = None
    beta_hat: Optional[float] = None
    degenerate_fit: bool = False
    checkpoint: Optional[str] = None
    eval_stats: Optional[EvalStats] = None

    def __post_init__(self):
        if self.game < 0:
            raise ValueError("Game index cannot be negative")
        if not np.isfinite(self.mean_reward):
            raise ValueError("mean_reward must be finite")


@dataclass
class GameSummary(BaseModel):
    """Statistics over a set of games, computed over the per-game mean rewards"""
    results: Dict[int, GameResult] = field(default_factory=dict)

    def add_result(self, result: GameResult):
        if result.game in self.results:
            raise ValueError(f"Game {result.game} already recorded")
        self.results[result.game] = result

    def ordered(self) -> List[GameResult]:
        """Results sorted by game index, independent of completion order"""
        return [self.results[game] for game in sorted(self.results)]

    def rows(self) -> List[Dict[str, float]]:
        """One row per game, columns as in SUMMARY_COLUMNS"""
        rows = []
        for result in self.ordered():
            stats = result.eval_stats
            if stats is None:
                rows.append({"game": result.game, "mean": result.mean_reward, "std": 0.0,
                             "min": result.mean_reward, "q05": result.mean_reward,
                             "q10": result.mean_reward, "q50": result.mean_reward,
                             "max": result.mean_reward})
            else:
                rows.append({"game": result.game, "mean": stats.mean, "std": stats.std,
                             "min": stats.min, "q05": stats.q05, "q10": stats.q10,
                             "q50": stats.q50, "max": stats.max})
        return rows

    def across_games(self) -> Dict[str, float]:
        """Mean, Std, Min, 5%, 10%, 50%, Max of the per-game mean rewards"""
        if not self.results:
            raise ValueError("No games recorded")
        means = np.asarray([r.mean_reward for r in self.ordered()], dtype=float)
        q05, q10, q50 = np.quantile(means, [0.05, 0.10, 0.50])
        return {"games": int(means.size), "mean": float(means.mean()), "std": float(means.std()),
                "min": float(means.min()), "q05": float(q05), "q10": float(q10),
                "q50": float(q50), "max": float(means.max())}
