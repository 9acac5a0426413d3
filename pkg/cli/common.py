"""
Shared pieces of the subcommands: experiment loading with flag overrides,
environment construction, the worker pool and error conversion.
"""

import functools
import logging
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional

import click
import numpy as np
import yaml

from envs.base import Environment
from envs.gambling import GamblingEnv
from envs.portfolio import HistoricalReplay, PortfolioEnv, SyntheticHeavyTail
from models.environments import GamblingParams
from models.errors import ConfigError, RDQNError
from models.experiment import EnvironmentName, EnvironmentSpec, ExperimentConfig

logger = logging.getLogger(__name__)


def load_experiment(path: Optional[str], kind: str, settings=None, seed: Optional[int] = None,
                    out: Optional[str] = None, overwrite: bool = False, workers: Optional[int] = None,
                    sections: Optional[Dict[str, Dict[str, Any]]] = None) -> ExperimentConfig:
    """
    Parse a YAML experiment file. Flags given on the command line win over
    file values, which win over the settings class (OUTPUT_DIR, WORKERS,
    REPETITIONS). `sections` merges flag values into nested sections, e.g.
    {"evaluation": {"mode": "reference"}}. The subcommand decides the kind,
    so a train file can be reused for eval.
    """
    data: dict = {}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except FileNotFoundError:
            raise ConfigError("config", f"file not found: {path}") from None
        except yaml.YAMLError as e:
            raise ConfigError("config", f"{path}: invalid YAML ({e})") from None
        if not isinstance(data, dict):
            raise ConfigError("config", f"{path}: experiment file must contain a mapping")
    data = dict(data)
    if data.get("kind", kind) != kind:
        logger.info("running %s as a %s experiment", path, kind)
    data["kind"] = kind
    if settings is not None:
        data.setdefault("output_dir", str(settings.OUTPUT_DIR))
        data.setdefault("workers", settings.WORKERS)
        data.setdefault("repetitions", settings.REPETITIONS)
    flags = {"seed": seed, "output_dir": out, "workers": workers, "overwrite": overwrite or None}
    data.update({key: value for key, value in flags.items() if value is not None})
    for section, values in (sections or {}).items():
        merged = dict(data.get(section) or {})
        merged.update({key: value for key, value in values.items() if value is not None})
        data[section] = merged
    return ExperimentConfig.from_dict(data)


def experiment_options(func: Callable) -> Callable:
    """--config/--seed/--out/--overwrite/--workers, shared by every subcommand"""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                     help="YAML experiment file"),
        click.option("--seed", type=int, default=None, help="Override the experiment seed"),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory"),
        click.option("--overwrite", is_flag=True, default=False,
                     help="Reuse <out>/<name> instead of a fresh timestamped directory"),
        click.option("--workers", type=int, default=None, help="Worker processes for game repetitions"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def domain_errors(func: Callable) -> Callable:
    """Turn domain errors into a one-line ClickException (non-zero exit)"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except RDQNError as e:
            logger.debug("command failed", exc_info=True)
            raise click.ClickException(str(e)) from e

    return wrapper


def run_name(cfg: ExperimentConfig) -> str:
    return cfg.name or cfg.kind.value


def gambling_env(params: GamblingParams, rng: np.random.Generator) -> GamblingEnv:
    return GamblingEnv(params, rng)


def portfolio_env(spec: EnvironmentSpec, rng: np.random.Generator, reference: bool,
                  transaction_cost: Optional[float] = None) -> PortfolioEnv:
    """
    Reference environments run the synthetic simulator; the true one replays
    the price file when there is one.
    """
    params = spec.portfolio
    if reference or not spec.price_csv:
        simulator = SyntheticHeavyTail(spec.simulator, params.log_return_bound, params.time_delta)
    else:
        simulator = HistoricalReplay.from_csv(spec.price_csv, params.log_return_bound)
    return PortfolioEnv(params, simulator, rng, transaction_cost=transaction_cost)


def training_envs(spec: EnvironmentSpec, gambling_params: Optional[GamblingParams], count: int,
                  rng_for: Callable[[int], np.random.Generator]) -> List[Environment]:
    """`count` independent training copies stepped round-robin by the trainer"""
    if spec.name is EnvironmentName.GAMBLING:
        return [gambling_env(gambling_params, rng_for(k)) for k in range(count)]
    cost = spec.train_transaction_cost
    return [portfolio_env(spec, rng_for(k), reference=True, transaction_cost=cost) for k in range(count)]


def map_tasks(task: Callable[[Any], Any], args: Iterable[Any], workers: int) -> List[Any]:
    """Pool.map over argument tuples; a single worker stays in process"""
    args = list(args)
    if workers <= 1 or len(args) <= 1:
        return [task(a) for a in args]
    with Pool(min(workers, len(args))) as pool:
        return pool.map(task, args)


def checkpoint_paths(directory: str) -> List[Path]:
    root = Path(directory)
    if root.is_file():
        return [root]
    return sorted(root.glob("checkpoints/*.npz")) or sorted(root.glob("*.npz"))
