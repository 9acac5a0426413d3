"""
Self-check suites over discrete instances: strong duality, nesting of the
balls and the delta -> 0 limit. Each check on each instance yields one
CheckResult; exceptions become ERROR results instead of aborting the run.
"""

import logging
import time
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from models.errors import RDQNError
from models.experiment import OracleCheckSettings
from models.instance import DiscreteRobustInstance
from models.oracle_check import CheckReport, CheckResult, CheckStatus

from .discrete import dual_robust_value_discrete, minimal_epsilon, primal_robust_value, wasserstein_robust_value

logger = logging.getLogger(__name__)

ValueFn = Callable[[DiscreteRobustInstance], float]

MONOTONE_SLACK = 1e-8


def random_instance(rng: np.random.Generator, n: int, instance_id: int = 0, dim: int = 1,
                    delta_range=(0.2, 1.0), slack_range=(0.02, 0.3),
                    point_mass_reference: bool = False) -> DiscreteRobustInstance:
    """
    Random instance on n points in [0, 1]^dim whose radius exceeds the minimal
    feasible one (epsilon_bar >= 0) by a random slack.
    """
    support = rng.uniform(0.0, 1.0, size=(n, dim))
    if point_mass_reference:
        p_hat = np.zeros(n)
        p_hat[rng.integers(n)] = 1.0
    else:
        p_hat = rng.dirichlet(np.ones(n))
    nu = 0.05 + rng.dirichlet(np.ones(n))
    nu /= nu.sum()
    delta = float(np.exp(rng.uniform(np.log(delta_range[0]), np.log(delta_range[1]))))
    inst = DiscreteRobustInstance(support=support, p_hat=p_hat / p_hat.sum(), nu=nu,
                                  payoff=rng.uniform(0.0, 1.0, size=n), epsilon=0.0, delta=delta,
                                  instance_id=instance_id)
    epsilon = minimal_epsilon(inst) + float(rng.uniform(*slack_range))
    return inst.replace(epsilon=epsilon)


def generate_instances(settings: OracleCheckSettings, rng: np.random.Generator) -> List[DiscreteRobustInstance]:
    sizes = rng.integers(settings.min_points, settings.max_points + 1, size=settings.instances)
    return [random_instance(rng, int(n), instance_id=i + 1, dim=int(rng.integers(1, 3)))
            for i, n in enumerate(sizes)]


def _result(check: str, inst: DiscreteRobustInstance, tolerance: float,
            evaluate: Callable[[], Dict[str, float]], error_key: str = "error") -> CheckResult:
    start = time.perf_counter()
    try:
        details = evaluate()
        error = float(details[error_key])
        status = CheckStatus.PASSED if error <= tolerance else CheckStatus.FAILED
        message = None if status is CheckStatus.PASSED else f"error {error:.3g} exceeds {tolerance:g}"
    except (RDQNError, ArithmeticError, ValueError) as e:
        details, error, status, message = {}, float("nan"), CheckStatus.ERROR, str(e)
    if status is not CheckStatus.PASSED:
        logger.warning("%s failed on instance %d: %s", check, inst.instance_id, message)
    return CheckResult(check=check, instance_id=inst.instance_id, status=status, tolerance=tolerance,
                       error=error, execution_time=time.perf_counter() - start, message=message,
                       details=details)


def check_strong_duality(instances: Sequence[DiscreteRobustInstance], tolerance: float,
                         primal_fn: ValueFn = primal_robust_value,
                         dual_fn: ValueFn = dual_robust_value_discrete) -> List[CheckResult]:
    def evaluate(inst):
        primal, dual = primal_fn(inst), dual_fn(inst)
        return {"primal": primal, "dual": dual, "error": abs(primal - dual)}

    return [_result("strong_duality", inst, tolerance, lambda inst=inst: evaluate(inst)) for inst in instances]


def check_nesting(instances: Sequence[DiscreteRobustInstance],
                  dual_fn: ValueFn = dual_robust_value_discrete) -> List[CheckResult]:
    """
    A larger radius or a smaller delta enlarges the ball, so the value must
    not go up. The error is the largest violation.
    """
    def evaluate(inst):
        base = dual_fn(inst)
        wider = dual_fn(inst.replace(epsilon=1.5 * inst.epsilon))
        sharper = dual_fn(inst.replace(delta=0.5 * inst.delta))
        violation = max(wider - base, sharper - base, 0.0)
        return {"value": base, "larger_epsilon": wider, "smaller_delta": sharper, "error": violation}

    return [_result("nesting", inst, MONOTONE_SLACK, lambda inst=inst: evaluate(inst)) for inst in instances]


def check_delta_limit(instances: Sequence[DiscreteRobustInstance], deltas: Sequence[float], tolerance: float,
                      dual_fn: ValueFn = dual_robust_value_discrete,
                      limit_fn: ValueFn = wasserstein_robust_value) -> List[CheckResult]:
    """
    Values along decreasing delta must decrease toward the unregularized LP
    value; the error is the final gap, or infinity if the sequence is not
    monotone.
    """
    ordered = sorted(deltas, reverse=True)

    def evaluate(inst):
        limit = limit_fn(inst.replace(delta=0.0))
        values = [dual_fn(inst.replace(delta=d)) for d in ordered]
        steps = np.diff([*values, limit])
        monotone = bool(np.all(steps <= MONOTONE_SLACK))
        details = {f"delta={d:g}": v for d, v in zip(ordered, values)}
        details.update(limit=limit, error=abs(values[-1] - limit) if monotone else float("inf"))
        return details

    return [_result("delta_limit", inst, tolerance, lambda inst=inst: evaluate(inst)) for inst in instances]


def limit_instances(instances: Sequence[DiscreteRobustInstance], deltas: Sequence[float]) -> List[DiscreteRobustInstance]:
    """Copies with the radius raised where needed so epsilon_bar >= 0 at the largest delta"""
    largest = max(deltas)
    out = []
    for inst in instances:
        if inst.size > 4:
            continue
        at_largest = inst.replace(delta=largest)
        out.append(inst.replace(epsilon=max(inst.epsilon, minimal_epsilon(at_largest) + 0.05)))
    return out


def run_oracle_suite(instances: Sequence[DiscreteRobustInstance], settings: OracleCheckSettings,
                     dual_fn: Optional[ValueFn] = None) -> CheckReport:
    """All three suites; dual_fn replaces the dual oracle (mutation testing)"""
    dual_fn = dual_fn or dual_robust_value_discrete
    report = CheckReport()
    report.results.extend(check_strong_duality(instances, settings.duality_tolerance, dual_fn=dual_fn))
    report.results.extend(check_nesting(instances, dual_fn=dual_fn))
    report.results.extend(check_delta_limit(limit_instances(instances, settings.limit_deltas),
                                            settings.limit_deltas, settings.limit_tolerance, dual_fn=dual_fn))
    report.mark_completed()
    counts = report.counts()
    logger.info("oracle checks: %s", ", ".join(f"{name} {row['passed']}/{sum(row.values())}"
                                               for name, row in counts.items()))
    return report
