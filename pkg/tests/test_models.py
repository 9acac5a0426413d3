from pathlib import Path

import numpy as np
import pytest

from cli.common import load_experiment
from models.ambiguity import AmbiguityConfig, EpsilonBarPolicy, LambdaSolverConfig, NuFamily, NuSpec
from models.environments import CdfProbeParams, GamblingMode, PortfolioState
from models.errors import ConfigError
from models.evaluation import EvalStats, GameResult, GameSummary
from models.experience import Transition
from models.experiment import EnvironmentName, ExperimentConfig, ExperimentKind
from models.oracle_check import CheckReport, CheckResult, CheckStatus
from models.training import ExplorationSchedule, TrainConfig

EXPERIMENTS = Path(__file__).resolve().parents[1] / "config" / "experiments"


# ----------------------------------------------------------------------------
# experiment files
# ----------------------------------------------------------------------------

def _kind_for(path: Path) -> str:
    if path.stem.startswith("cdf_probe"):
        return "cdf-probe"
    if path.stem.startswith("oracle"):
        return "oracle-check"
    return "train"


@pytest.mark.parametrize("path", sorted(EXPERIMENTS.glob("*.yaml")), ids=lambda p: p.stem)
def test_shipped_experiments_load(path, settings):
    cfg = load_experiment(str(path), _kind_for(path), settings)
    assert cfg.kind.value == _kind_for(path)
    assert cfg.name
    assert cfg.output_dir == str(settings.OUTPUT_DIR)


def test_robust_experiment_carries_ambiguity(settings):
    cfg = load_experiment(str(EXPERIMENTS / "gambling_rdqn.yaml"), "train", settings, seed=99, workers=2)
    assert cfg.seed == 99
    assert cfg.workers == 2
    assert cfg.environment.name is EnvironmentName.GAMBLING
    assert cfg.train.robust
    assert cfg.ambiguity.epsilon == pytest.approx(0.1)
    assert cfg.ambiguity.nu.family is NuFamily.UNIFORM

    plain = load_experiment(str(EXPERIMENTS / "gambling_dqn.yaml"), "train", settings)
    assert plain.ambiguity is None


def test_portfolio_experiment_uses_drop_policy(settings):
    cfg = load_experiment(str(EXPERIMENTS / "portfolio_rdqn.yaml"), "train", settings)
    assert cfg.environment.name is EnvironmentName.PORTFOLIO
    assert cfg.ambiguity.epsilon_bar_policy is EpsilonBarPolicy.WARN_AND_DROP
    assert cfg.ambiguity.nu.family is NuFamily.STUDENT_T
    assert cfg.environment.portfolio.state_dim == 63


@pytest.mark.parametrize("data, path", [
    ({"kind": "train", "train": {"discount": 1.0}}, "train.discount"),
    ({"kind": "train", "train": {"exploration": {"decay_fraction": 0.0}}}, "train.exploration.decay_fraction"),
    ({"kind": "train", "train": {"ambiguity": {"epsilon": -0.1, "delta": 0.1}}}, "train.ambiguity.epsilon"),
    ({"kind": "train", "ambiguity": {"epsilon": 0.1, "delta": 0.1, "nu": {"family": "beta", "a": -1.0}}},
     "ambiguity.nu.a"),
    ({"kind": "train", "ambiguity": {"epsilon": 0.1, "delta": 0.1, "solver": {"eta0": 0.0}}},
     "ambiguity.solver.eta0"),
    ({"kind": "train", "environment": {"portfolio": {"actions": [0.0, 2.0]}}}, "environment.portfolio.actions"),
    ({"kind": "cdf-probe", "cdf_probe": {"discount": 1.0}}, "cdf_probe.discount"),
    ({"kind": "oracle-check", "oracle_check": {"max_points": 6}}, "oracle_check.max_points"),
    ({"kind": "eval"}, "evaluation.checkpoints"),
    ({"kind": "evaluate"}, "kind"),
    ({"kind": "train", "repetitions": 0}, "repetitions"),
])
def test_config_errors_carry_dotted_paths(data, path):
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig.from_dict(data)
    assert excinfo.value.path == path
    assert str(excinfo.value).startswith(f"{path}: ")


def test_unknown_keys_name_their_section():
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig.from_dict({"kind": "train", "train": {"learning_rte": 0.1}})
    assert excinfo.value.path == "train"
    assert "learning_rte" in str(excinfo.value)


def test_experiment_round_trips_through_dict():
    cfg = ExperimentConfig.from_dict({
        "kind": "train", "seed": 4,
        "ambiguity": {"epsilon": 0.2, "delta": 0.01, "nu": {"family": "uniform"}},
        "evaluation": {"mode": "reference", "episodes": 3},
    })
    data = cfg.to_dict()
    assert data["kind"] == "train"
    assert data["evaluation"]["mode"] == "reference"
    again = ExperimentConfig.from_dict(data)
    assert again.ambiguity.cache_key() == cfg.ambiguity.cache_key()
    assert again.evaluation.mode is GamblingMode.REFERENCE_DIST
    assert again.kind is ExperimentKind.TRAIN


# ----------------------------------------------------------------------------
# ambiguity and training settings
# ----------------------------------------------------------------------------

def test_nu_spec_validation():
    with pytest.raises(ConfigError, match="hi > lo"):
        NuSpec.uniform(1.0, 1.0)
    with pytest.raises(ConfigError, match="family"):
        NuSpec(family="cauchy")
    with pytest.raises(ConfigError, match="sum to 1"):
        NuSpec.empirical([[0.0], [1.0]], weights=[0.5, 0.6])
    with pytest.raises(ConfigError, match="one dimension"):
        NuSpec.empirical([[0.0], [1.0, 2.0]])
    with pytest.raises(ConfigError, match="scale"):
        NuSpec.student_t(0.0, 0.0, 3.0)


def test_nu_spec_dimension_and_label():
    assert NuSpec.point_mass([0.1, 0.2]).dimension == 2
    assert NuSpec.empirical([[0.0, 1.0], [1.0, 0.0]]).dimension == 2
    assert NuSpec.uniform().dimension == 1
    assert NuSpec.uniform().label() == "uniform_0_1"
    assert NuSpec.beta(1.0, 5.0).label() == "beta_1_5"


def test_cache_key_follows_the_ball():
    base = AmbiguityConfig(epsilon=0.1, delta=0.01)
    assert base.cache_key() == AmbiguityConfig(epsilon=0.1, delta=0.01).cache_key()
    assert base.cache_key() != AmbiguityConfig(epsilon=0.2, delta=0.01).cache_key()
    assert base.cache_key() != AmbiguityConfig(epsilon=0.1, delta=0.01, nu=NuSpec.beta(2.0, 2.0)).cache_key()
    with pytest.raises(ConfigError, match="epsilon_bar_policy"):
        AmbiguityConfig(epsilon=0.1, delta=0.01, epsilon_bar_policy="ignore")


def test_solver_step_size_grows_linearly():
    solver = LambdaSolverConfig(eta0=0.5, k_sched=10)
    assert solver.step_size(0) == pytest.approx(0.5)
    assert solver.step_size(10) == pytest.approx(1.0)
    assert solver.step_size(30) == pytest.approx(2.0)


def test_train_config_limits():
    with pytest.raises(ConfigError) as excinfo:
        TrainConfig(batch_size=64, buffer_capacity=32)
    assert excinfo.value.path == "buffer_capacity"
    assert not TrainConfig().robust
    schedule = ExplorationSchedule(start=1.0, end=0.1, decay_fraction=0.5)
    assert schedule.value(0, 100) == 1.0
    assert schedule.value(25, 100) == pytest.approx(0.55)
    assert schedule.value(80, 100) == pytest.approx(0.1)


def test_probe_grid_points_expand_to_a_grid():
    probe = CdfProbeParams.from_dict({"grid_points": 5})
    assert probe.grid == [0.0, 0.25, 0.5, 0.75, 1.0]
    with pytest.raises(ConfigError) as excinfo:
        CdfProbeParams.from_dict({"nu": {"family": "uniform", "lo": 2.0, "hi": 1.0}})
    assert excinfo.value.path == "nu.hi"


# ----------------------------------------------------------------------------
# records
# ----------------------------------------------------------------------------

def test_transition_validation():
    tr = Transition([0.2], 1, 0.5, [0.3])
    assert tr.validate_actions(2)
    with pytest.raises(ValueError, match="out of range"):
        tr.validate_actions(1)
    with pytest.raises(ValueError, match="same shape"):
        Transition([0.2], 0, 0.0, [0.3, 0.4])
    with pytest.raises(ValueError, match="negative"):
        Transition([0.2], -1, 0.0, [0.3])
    with pytest.raises(ValueError, match="finite"):
        Transition([0.2], 0, float("nan"), [0.3])


def test_portfolio_state_vector_layout():
    state = PortfolioState(window=[0.01, -0.02, 0.03], log_wealth=0.1, position=-0.5, time_delta=0.01)
    vector = state.to_vector()
    np.testing.assert_allclose(vector, [0.01, -0.02, 0.03, 0.1, -0.5, 0.01])
    again = PortfolioState.from_vector(vector, 3)
    assert again.position == -0.5
    assert again.last_return == pytest.approx(0.03)
    with pytest.raises(ValueError):
        PortfolioState(window=[0.0], time_delta=0.0)


def test_eval_stats_quantiles():
    stats = EvalStats(episode_means=[5.0, 1.0, 3.0, 2.0, 4.0], steps_per_episode=10)
    assert stats.mean == pytest.approx(3.0)
    assert stats.std == pytest.approx(np.sqrt(2.0))
    assert (stats.min, stats.max) == (1.0, 5.0)
    assert stats.q05 == pytest.approx(1.2)
    assert stats.q10 == pytest.approx(1.4)
    assert stats.q50 == pytest.approx(3.0)
    assert stats.portfolio_mean is None
    with pytest.raises(ValueError):
        EvalStats(episode_means=[], steps_per_episode=10)


def test_game_summary_orders_by_game_index():
    summary = GameSummary()
    for game, reward in ((2, 0.3), (0, 0.1), (1, 0.2)):
        summary.add_result(GameResult(game=game, mean_reward=reward))
    assert [row["game"] for row in summary.rows()] == [0, 1, 2]
    across = summary.across_games()
    assert across["games"] == 3
    assert across["mean"] == pytest.approx(0.2)
    assert across["q50"] == pytest.approx(0.2)
    with pytest.raises(ValueError, match="already recorded"):
        summary.add_result(GameResult(game=1, mean_reward=0.0))
    with pytest.raises(ValueError):
        GameSummary().across_games()
    with pytest.raises(ValueError, match="finite"):
        GameResult(game=3, mean_reward=float("inf"))


def test_check_results_and_report():
    with pytest.raises(ValueError, match="Tolerance"):
        CheckResult(check="nesting", instance_id=1, status=CheckStatus.PASSED, tolerance=-1.0)
    report = CheckReport(results=[
        CheckResult(check="nesting", instance_id=1, status=CheckStatus.PASSED, tolerance=0.0),
        CheckResult(check="nesting", instance_id=2, status=CheckStatus.FAILED, tolerance=0.0, error=0.1),
    ])
    assert not report.passed()
    assert [r.instance_id for r in report.failures()] == [2]
    assert report.counts()["nesting"]["passed"] == 1
    assert report.to_dict()["results"][1]["status"] == "failed"
