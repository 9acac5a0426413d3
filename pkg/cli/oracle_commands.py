"""
oracle-check: strong duality, nesting and delta-limit suites on discrete instances
"""

import logging
from pathlib import Path
from typing import Callable, Optional, Tuple

import click

from models.experiment import ExperimentConfig
from models.instance import DiscreteRobustInstance
from models.oracle_check import CheckReport
from oracle.checks import generate_instances, run_oracle_suite
from oracle.loader import InstanceLoader
from utils.output import make_run_dir, write_json
from utils.seeding import derive_rng
from utils.tables import format_table, write_csv

from .common import domain_errors, experiment_options, load_experiment, run_name

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ("check", "instance_id", "status", "tolerance", "error", "execution_time", "message")


def run_oracle_check(cfg: ExperimentConfig,
                     dual_fn: Optional[Callable[[DiscreteRobustInstance], float]] = None
                     ) -> Tuple[Path, CheckReport]:
    """
    Run the suites on the fixture file, or on random instances from the
    seed. Failing instances are saved to failing_instances.json.
    """
    settings = cfg.oracle_check
    if settings.fixture:
        instances = InstanceLoader.load_from_json(settings.fixture)
    else:
        instances = generate_instances(settings, derive_rng(cfg.seed))
    report = run_oracle_suite(instances, settings, dual_fn=dual_fn)

    run_dir = make_run_dir(cfg.output_dir, run_name(cfg), cfg.overwrite)
    rows = [{**result.to_dict(), "status": result.status.value} for result in report.results]
    write_csv(run_dir / "oracle_report.csv", rows, REPORT_COLUMNS)
    write_json(run_dir / "oracle_report.json", report.to_dict())
    failing_ids = {result.instance_id for result in report.failures()}
    if failing_ids:
        failing = [inst for inst in instances if inst.instance_id in failing_ids]
        InstanceLoader.save_to_json(failing, run_dir / "failing_instances.json")
    return run_dir, report


@click.command("oracle-check")
@experiment_options
@click.option("--fixture", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON file of instances instead of random ones")
@click.pass_obj
@domain_errors
def oracle_check_command(settings, config_path, seed, out, overwrite, workers, fixture):
    """Validate the dual numerics against brute-force oracles"""
    cfg = load_experiment(config_path, "oracle-check", settings, seed, out, overwrite, workers,
                          sections={"oracle_check": {"fixture": fixture}})
    run_dir, report = run_oracle_check(cfg)
    counts = [{"check": name, **row} for name, row in report.counts().items()]
    click.echo(format_table(counts))
    if not report.passed():
        raise click.ClickException(
            f"{len(report.failures())} oracle checks failed; offending instances in "
            f"{run_dir / 'failing_instances.json'}")
    click.echo(f"All oracle checks passed; report in {run_dir}")
