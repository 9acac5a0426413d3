"""
eval: greedy evaluation of saved checkpoints, one game per checkpoint
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
import numpy as np

from models.environments import GamblingMode
from models.errors import InputError
from models.evaluation import SUMMARY_COLUMNS, EvalStats, GameResult, GameSummary
from models.experiment import EnvironmentName, ExperimentConfig
from nn.checkpoint import load_checkpoint_with_metadata
from nn.network import QNetwork
from rdqn.evaluation import evaluate_constant_action, evaluate_policy
from utils.output import make_run_dir, write_json
from utils.seeding import derive_rng
from utils.tables import format_table, write_csv

from .common import checkpoint_paths, domain_errors, experiment_options, gambling_env, load_experiment, \
    map_tasks, portfolio_env, run_name

logger = logging.getLogger(__name__)

# stream keys under (seed, game)
EVAL_STREAM = 3
BASELINE_STREAM = 4


def eval_sizes(cfg: ExperimentConfig, settings) -> Tuple[int, int]:
    """Episodes and steps per episode: experiment file first, then the settings class"""
    episodes = cfg.evaluation.episodes or settings.EVAL_EPISODES
    if cfg.evaluation.steps_per_episode:
        steps = cfg.evaluation.steps_per_episode
    elif cfg.environment.name is EnvironmentName.PORTFOLIO:
        steps = cfg.environment.episode_length
    else:
        steps = settings.EVAL_STEPS_PER_EPISODE
    return episodes, steps


def evaluate_game(net: QNetwork, cfg: ExperimentConfig, game: int, metadata: Dict[str, Any],
                  episodes: int, steps: int) -> EvalStats:
    """
    Evaluate one trained agent. The evaluation mode only chooses the law the
    environment is stepped with; the random stream is the same in both modes.
    """
    rng = derive_rng(cfg.seed, game, EVAL_STREAM)
    reference = cfg.evaluation.mode is GamblingMode.REFERENCE_DIST
    spec = cfg.environment
    if spec.name is EnvironmentName.GAMBLING:
        params = spec.gambling
        if reference:
            if "alpha_hat" not in metadata:
                raise InputError(f"game {game}: checkpoint has no fitted reference for reference-mode evaluation")
            params = params.with_shapes(metadata["alpha_hat"], metadata["beta_hat"])
        env = gambling_env(params, rng)
    else:
        env = portfolio_env(spec, rng, reference=reference)
    return evaluate_policy(net, env, episodes, steps)


def portfolio_baseline(cfg: ExperimentConfig, episodes: int, steps: int) -> Optional[Dict[str, float]]:
    """Fully invested buy-and-hold over the same evaluation environment"""
    spec = cfg.environment
    if spec.name is not EnvironmentName.PORTFOLIO:
        return None
    actions = np.asarray(spec.portfolio.actions, dtype=float)
    if not np.any(np.isclose(actions, 1.0)):
        return None
    rng = derive_rng(cfg.seed, BASELINE_STREAM)
    env = portfolio_env(spec, rng, reference=cfg.evaluation.mode is GamblingMode.REFERENCE_DIST)
    stats = evaluate_constant_action(int(np.argmax(np.isclose(actions, 1.0))), env, episodes, steps)
    return stats.portfolio_mean.to_dict()


def _eval_task(args) -> GameResult:
    cfg, path, index, episodes, steps = args
    net, metadata = load_checkpoint_with_metadata(path)
    game = int(metadata.get("game", index))
    stats = evaluate_game(net, cfg, game, metadata, episodes, steps)
    logger.info("game %d: mean reward per step %.5f (%s)", game, stats.mean, Path(path).name)
    return GameResult(game=game, mean_reward=stats.mean, alpha_hat=metadata.get("alpha_hat"),
                      beta_hat=metadata.get("beta_hat"), checkpoint=str(path), eval_stats=stats)


def write_summary(run_dir: Path, cfg: ExperimentConfig, summary: GameSummary, prefix: str,
                  extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """<prefix>.csv with one row per game and <prefix>.json with the across-game statistics"""
    write_csv(run_dir / f"{prefix}.csv", summary.rows(), SUMMARY_COLUMNS)
    ambiguity = cfg.ambiguity
    payload = {
        "kind": cfg.kind.value,
        "environment": cfg.environment.name.value,
        "evaluation_mode": cfg.evaluation.mode.value,
        "seed": cfg.seed,
        "reward_factor": cfg.environment.gambling.reward_factor,
        "epsilon": None if ambiguity is None else ambiguity.epsilon,
        "delta": None if ambiguity is None else ambiguity.delta,
        "across_games": summary.across_games(),
        "games": [result.to_dict() for result in summary.ordered()],
    }
    payload.update(extra or {})
    write_json(run_dir / f"{prefix}.json", payload)
    return payload


def run_eval(cfg: ExperimentConfig, settings) -> Tuple[Path, Dict[str, Any]]:
    """Evaluate every checkpoint under cfg.evaluation.checkpoints; aggregation is by game index"""
    paths = checkpoint_paths(cfg.evaluation.checkpoints)
    missing = [str(p) for p in paths if not p.exists()]
    if not paths or missing:
        listed = ", ".join(missing) or cfg.evaluation.checkpoints
        raise InputError(f"no checkpoints found: {listed}")
    episodes, steps = eval_sizes(cfg, settings)
    run_dir = make_run_dir(cfg.output_dir, run_name(cfg), cfg.overwrite)

    results = map_tasks(_eval_task, [(cfg, p, i, episodes, steps) for i, p in enumerate(paths)], cfg.workers)
    summary = GameSummary()
    for result in results:
        summary.add_result(result)
    payload = write_summary(run_dir, cfg, summary, "eval_summary",
                            {"baseline": portfolio_baseline(cfg, episodes, steps)})
    return run_dir, payload


@click.command("eval")
@experiment_options
@click.option("--checkpoints", type=click.Path(exists=True), default=None,
              help="Checkpoint file, or a train run directory")
@click.option("--mode", type=click.Choice([m.value for m in GamblingMode]), default=None,
              help="Evaluate under the true or the fitted reference distribution")
@click.pass_obj
@domain_errors
def eval_command(settings, config_path, seed, out, overwrite, workers, checkpoints, mode):
    """Evaluate trained checkpoints and write per-game statistics"""
    cfg = load_experiment(config_path, "eval", settings, seed, out, overwrite, workers,
                          sections={"evaluation": {"checkpoints": checkpoints, "mode": mode}})
    run_dir, payload = run_eval(cfg, settings)
    click.echo(format_table([payload["across_games"]]))
    click.echo(f"Results written to {run_dir}")
