"""
train: repeated games of fit -> train -> checkpoint -> evaluate

Gambling games draw a handful of samples from the true initial law, fit the
reference Beta by the method of moments and train on the fitted game; every
game has its own derived seed. Portfolio "games" are independent agents
trained on the synthetic simulator.
"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Tuple

import click

from envs.gambling import fit_beta_mom, sample_beta
from models.evaluation import GameResult, GameSummary
from models.experiment import EnvironmentName, ExperimentConfig
from nn.checkpoint import save_checkpoint
from rdqn.trainer import train
from utils.output import make_run_dir, write_json
from utils.seeding import derive_int_seed, derive_rng
from utils.tables import format_table

from .common import domain_errors, experiment_options, load_experiment, map_tasks, run_name, training_envs
from .eval_commands import eval_sizes, evaluate_game, portfolio_baseline, write_summary

logger = logging.getLogger(__name__)

# stream keys under (seed, game)
REFERENCE_STREAM = 0
TRAIN_STREAM = 1
ENV_STREAM = 2


def fit_reference(cfg: ExperimentConfig, game: int) -> Dict[str, Any]:
    """Fitted Beta shapes of one game, or nothing for environments without a fit"""
    spec = cfg.environment
    if spec.name is not EnvironmentName.GAMBLING:
        return {}
    rng = derive_rng(cfg.seed, game, REFERENCE_STREAM)
    true = spec.gambling
    samples = sample_beta(true.alpha_prime, true.beta_prime, rng, size=spec.reference_samples)
    fit = fit_beta_mom(samples)
    logger.debug("game %d: fitted Beta(%.4f, %.4f) from %d samples", game, fit.alpha_hat, fit.beta_hat,
                 spec.reference_samples)
    return {"alpha_hat": fit.alpha_hat, "beta_hat": fit.beta_hat, "degenerate_fit": fit.degenerate}


def train_game(cfg: ExperimentConfig, game: int, run_dir: Path, episodes: int, steps: int) -> GameResult:
    spec = cfg.environment
    fitted = fit_reference(cfg, game)
    params = None
    if fitted:
        params = spec.gambling.with_shapes(fitted["alpha_hat"], fitted["beta_hat"])
    train_cfg = replace(cfg.train, seed=derive_int_seed(cfg.seed, game, TRAIN_STREAM))
    envs = training_envs(spec, params, train_cfg.num_envs,
                         lambda k: derive_rng(cfg.seed, game, ENV_STREAM, k))
    result = train(envs, train_cfg)

    ambiguity = cfg.ambiguity
    metadata = {
        "game": game,
        "environment": spec.name.value,
        "reward_factor": spec.gambling.reward_factor,
        "epsilon": None if ambiguity is None else ambiguity.epsilon,
        "delta": None if ambiguity is None else ambiguity.delta,
        "gradient_steps": result.gradient_steps,
        **fitted,
    }
    checkpoint = save_checkpoint(result.network, run_dir / "checkpoints" / f"game_{game:03d}.npz", metadata)
    result.write_log(run_dir / "logs" / f"game_{game:03d}.csv")

    stats = evaluate_game(result.network, cfg, game, metadata, episodes, steps)
    logger.info("game %d: %d gradient steps, mean reward per step %.5f", game, result.gradient_steps,
                stats.mean)
    return GameResult(game=game, mean_reward=stats.mean, alpha_hat=fitted.get("alpha_hat"),
                      beta_hat=fitted.get("beta_hat"), degenerate_fit=fitted.get("degenerate_fit", False),
                      checkpoint=str(checkpoint), eval_stats=stats)


def _train_task(args) -> GameResult:
    return train_game(*args)


def run_train(cfg: ExperimentConfig, settings) -> Tuple[Path, Dict[str, Any]]:
    """
    Train cfg.repetitions games (settings.REPETITIONS when unset). Outputs:
    checkpoints/game_NNN.npz, logs/game_NNN.csv, summary.csv, summary.json.
    """
    games = cfg.repetitions or settings.REPETITIONS
    episodes, steps = eval_sizes(cfg, settings)
    run_dir = make_run_dir(cfg.output_dir, run_name(cfg), cfg.overwrite)
    write_json(run_dir / "experiment.json", cfg.to_dict())

    results = map_tasks(_train_task, [(cfg, game, run_dir, episodes, steps) for game in range(games)],
                        cfg.workers)
    summary = GameSummary()
    for result in results:
        summary.add_result(result)
    payload = write_summary(run_dir, cfg, summary, "summary",
                            {"baseline": portfolio_baseline(cfg, episodes, steps)})
    return run_dir, payload


@click.command("train")
@experiment_options
@click.option("--repetitions", type=click.IntRange(min=1), default=None, help="Number of independent games")
@click.pass_obj
@domain_errors
def train_command(settings, config_path, seed, out, overwrite, workers, repetitions):
    """Train one agent per game, checkpoint it and evaluate it"""
    cfg = load_experiment(config_path, "train", settings, seed, out, overwrite, workers)
    if repetitions is not None:
        cfg.repetitions = repetitions
    run_dir, payload = run_train(cfg, settings)
    click.echo(format_table([payload["across_games"]]))
    click.echo(f"Results written to {run_dir}")
