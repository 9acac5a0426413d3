"""
cdf-probe: worst-case CDF curves, one CSV of (x0, value) rows per delta
"""

import logging
from pathlib import Path
from typing import Dict, Tuple

import click
import numpy as np

from envs.cdf_probe import worst_case_cdf
from models.experiment import ExperimentConfig
from utils.output import make_run_dir, write_json
from utils.seeding import derive_rng
from utils.tables import write_csv

from .common import domain_errors, experiment_options, load_experiment, run_name

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ("x0", "value")


def curve_filename(delta: float, nu_label: str) -> str:
    return f"cdf_delta_{delta:g}_{nu_label}.csv"


def run_cdf_probe(cfg: ExperimentConfig) -> Tuple[Path, Dict[float, Path]]:
    probe = cfg.cdf_probe
    solver = cfg.ambiguity.solver if cfg.ambiguity is not None else None
    curves = worst_case_cdf(probe, solver=solver, rng=derive_rng(cfg.seed))
    run_dir = make_run_dir(cfg.output_dir, run_name(cfg), cfg.overwrite)
    grid = np.asarray(probe.grid, dtype=float)
    paths: Dict[float, Path] = {}
    for delta, values in curves.items():
        rows = ({"x0": x0, "value": value} for x0, value in zip(grid.tolist(), values.tolist()))
        paths[delta] = write_csv(run_dir / curve_filename(delta, probe.nu.label()), rows, CURVE_COLUMNS)
    write_json(run_dir / "cdf_probe.json", {"probe": probe.to_dict(), "seed": cfg.seed,
                                            "files": {f"{d:g}": p.name for d, p in paths.items()}})
    return run_dir, paths


@click.command("cdf-probe")
@experiment_options
@click.option("--epsilon", type=click.FloatRange(min=0.0), default=None, help="Ball radius")
@click.pass_obj
@domain_errors
def cdf_probe_command(settings, config_path, seed, out, overwrite, workers, epsilon):
    """Worst-case CDF of the indicator probe for every configured delta"""
    cfg = load_experiment(config_path, "cdf-probe", settings, seed, out, overwrite, workers,
                          sections={"cdf_probe": {"epsilon": epsilon}})
    run_dir, paths = run_cdf_probe(cfg)
    for delta, path in sorted(paths.items(), reverse=True):
        click.echo(f"delta={delta:g}: {path.name}")
    click.echo(f"Results written to {run_dir}")
