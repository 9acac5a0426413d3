import json
from pathlib import Path

import numpy as np
import pytest

from models.errors import InfeasibleError, InputError
from models.experiment import OracleCheckSettings
from models.instance import DiscreteRobustInstance
from models.oracle_check import CheckStatus
from oracle import (
    InstanceLoader, check_delta_limit, check_nesting, check_strong_duality, dual_robust_value_discrete,
    exact_epsilon_bar, generate_instances, limit_instances, minimal_epsilon, primal_robust_value,
    random_instance, run_oracle_suite, simplex_grid, sinkhorn_coupling, sinkhorn_distance_and_gradient,
    sinkhorn_distance_discrete, solve_lp_by_vertices,
    wasserstein_distance_discrete, wasserstein_robust_value,
)

FIXTURE = Path(__file__).resolve().parents[1] / "data" / "oracle_instances.json"


@pytest.fixture
def fixture_instances():
    return InstanceLoader.load_from_json(FIXTURE)


@pytest.fixture
def random_instances():
    rng = np.random.default_rng(2024)
    return generate_instances(OracleCheckSettings(instances=50), rng)


def _two_point(**overrides) -> DiscreteRobustInstance:
    base = dict(support=[0.0, 1.0], p_hat=[0.7, 0.3], nu=[0.5, 0.5], payoff=[1.0, 0.0], epsilon=0.2, delta=0.1)
    base.update(overrides)
    return DiscreteRobustInstance(**base)


# ----------------------------------------------------------------------------
# instances and loader
# ----------------------------------------------------------------------------

def test_instance_validation():
    with pytest.raises(ValueError, match="simplex"):
        _two_point(p_hat=[0.5, 0.4])
    with pytest.raises(ValueError, match="positive"):
        _two_point(nu=[1.0, 0.0])
    with pytest.raises(ValueError, match="symmetric"):
        _two_point(cost=[[0.0, 1.0], [2.0, 0.0]])
    assert _two_point().cost.tolist() == [[0.0, 1.0], [1.0, 0.0]]


def test_fixture_loads_and_round_trips(fixture_instances, tmp_path):
    assert [inst.instance_id for inst in fixture_instances] == [1, 2, 3]
    assert all(exact_epsilon_bar(inst) >= 0 for inst in fixture_instances)
    path = InstanceLoader.save_to_json(fixture_instances, tmp_path / "nested" / "copy.json")
    again = InstanceLoader.load_instance_from_json(path, 3)
    np.testing.assert_array_equal(again.support, fixture_instances[2].support)
    assert again.epsilon == fixture_instances[2].epsilon
    with pytest.raises(InputError, match="not found"):
        InstanceLoader.load_instance_from_json(path, 9)


def test_loader_errors(tmp_path):
    with pytest.raises(InputError):
        InstanceLoader.load_from_json(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"instances": [{"support": [0, 1], "p_hat": [0.5, 0.4], "nu": [0.5, 0.5],
                                              "payoff": [0, 1], "epsilon": 0.1, "delta": 0.1}]}))
    with pytest.raises(InputError, match="Instance 1 validation failed"):
        InstanceLoader.load_from_json(bad)


def test_random_instances_have_slack(random_instances):
    assert len(random_instances) == 50
    assert {inst.instance_id for inst in random_instances} == set(range(1, 51))
    for inst in random_instances:
        assert 2 <= inst.size <= 4
        assert exact_epsilon_bar(inst) >= 0.02 - 1e-12


def test_minimal_epsilon_zeroes_effective_radius():
    inst = random_instance(np.random.default_rng(1), n=3)
    tight = inst.replace(epsilon=minimal_epsilon(inst))
    assert exact_epsilon_bar(tight) == pytest.approx(0.0, abs=1e-12)


# ----------------------------------------------------------------------------
# transport primitives
# ----------------------------------------------------------------------------

def test_transport_lp_values():
    cost = np.array([[0.0, 2.0], [2.0, 0.0]])
    assert wasserstein_distance_discrete(np.array([1.0, 0.0]), np.array([0.0, 1.0]), cost) == pytest.approx(2.0)
    assert wasserstein_distance_discrete(np.array([0.5, 0.5]), np.array([0.5, 0.5]), cost) == pytest.approx(0.0)
    inst = _two_point(p_hat=[1.0, 0.0], epsilon=0.4, delta=0.0)
    assert wasserstein_robust_value(inst) == pytest.approx(0.6)


def test_lp_rejects_large_or_infeasible_problems():
    inst = random_instance(np.random.default_rng(3), n=5)
    with pytest.raises(InputError):
        wasserstein_robust_value(inst.replace(delta=0.0))
    with pytest.raises(InfeasibleError):
        solve_lp_by_vertices(np.array([1.0, 1.0]), np.array([[1.0, 1.0]]), np.array([-1.0]))


def test_sinkhorn_coupling_marginals(fixture_instances):
    inst = fixture_instances[1]
    q = np.array([0.5, 0.1, 0.4])
    pi = sinkhorn_coupling(inst, q)
    np.testing.assert_allclose(pi.sum(axis=1), inst.p_hat, atol=1e-9)
    np.testing.assert_allclose(pi.sum(axis=0), q, atol=1e-9)
    assert sinkhorn_distance_discrete(inst, q) > 0
    with pytest.raises(InputError):
        sinkhorn_distance_discrete(inst, [0.5, 0.6, 0.1])


def test_unregularized_distance_uses_lp(fixture_instances):
    inst = fixture_instances[0].replace(delta=0.0)
    assert sinkhorn_distance_discrete(inst, [0.25, 0.75]) == pytest.approx(0.75)


# ----------------------------------------------------------------------------
# robust values and the check suites
# ----------------------------------------------------------------------------

def test_two_point_primal_matches_dual():
    inst = _two_point()
    primal, dual = primal_robust_value(inst), dual_robust_value_discrete(inst)
    assert primal == pytest.approx(dual, abs=1e-3)
    assert 0.0 <= dual <= 1.0


@pytest.mark.parametrize("index", [1, 2], ids=["three_points", "four_points"])
def test_simplex_primal_matches_dual(fixture_instances, index):
    inst = fixture_instances[index]
    assert inst.size == index + 2
    primal, dual = primal_robust_value(inst), dual_robust_value_discrete(inst)
    assert primal == pytest.approx(dual, abs=1e-4)
    assert primal >= inst.payoff.min() - 1e-9


def test_sinkhorn_gradient_matches_finite_differences(fixture_instances):
    inst = fixture_instances[2]
    q = np.array([0.4, 0.3, 0.2, 0.1])
    value, grad = sinkhorn_distance_and_gradient(inst, q)
    assert value == pytest.approx(sinkhorn_distance_discrete(inst, q), abs=1e-10)
    h = 1e-5
    direction = np.array([1.0, -1.0, 0.0, 0.0])
    slope = (sinkhorn_distance_discrete(inst, q + h * direction)
             - sinkhorn_distance_discrete(inst, q - h * direction)) / (2 * h)
    assert float(grad @ direction) == pytest.approx(slope, abs=1e-5)
    with pytest.raises(InputError, match="strictly positive"):
        sinkhorn_distance_and_gradient(inst, [0.5, 0.5, 0.0, 0.0])


def test_simplex_grid_covers_the_simplex():
    grid = simplex_grid(3, 16)
    assert grid.shape == (153, 3)
    np.testing.assert_allclose(grid.sum(axis=1), 1.0)
    assert grid.min() >= 0
    assert len(simplex_grid(4, 8)) == 165
    assert [1.0, 0.0, 0.0] in grid.tolist()


def test_primal_rejects_large_supports():
    inst = DiscreteRobustInstance(support=np.linspace(0.0, 1.0, 5), p_hat=[0.2] * 5, nu=[0.2] * 5,
                                  payoff=np.linspace(0.0, 1.0, 5), epsilon=0.5, delta=0.5)
    with pytest.raises(InputError, match="at most 4"):
        primal_robust_value(inst)


def test_unregularized_dual_matches_lp(fixture_instances):
    for inst in fixture_instances:
        limit = inst.replace(delta=0.0)
        assert dual_robust_value_discrete(limit) == pytest.approx(wasserstein_robust_value(limit), abs=1e-8)


def test_infeasible_ball_is_reported():
    inst = _two_point(p_hat=[1.0, 0.0], epsilon=0.0, delta=0.5)
    assert exact_epsilon_bar(inst) < 0
    with pytest.raises(InfeasibleError):
        dual_robust_value_discrete(inst)
    [result] = check_strong_duality([inst], 1e-3)
    assert result.status is CheckStatus.ERROR
    assert result.message


def test_strong_duality_on_random_instances(random_instances):
    results = check_strong_duality(random_instances, 1e-3)
    assert [r.status for r in results] == [CheckStatus.PASSED] * 50
    assert max(r.error for r in results) <= 1e-3


def test_larger_balls_lower_the_value(random_instances):
    results = check_nesting(random_instances[:20])
    assert all(r.status is CheckStatus.PASSED for r in results)
    assert all(r.details["larger_epsilon"] <= r.details["value"] + 1e-8 for r in results)


def test_values_decrease_to_the_transport_limit(fixture_instances, random_instances):
    deltas = [1e-1, 1e-2, 1e-3]
    instances = limit_instances(fixture_instances + random_instances[:10], deltas)
    results = check_delta_limit(instances, deltas, 5e-3)
    assert all(r.status is CheckStatus.PASSED for r in results), [r.message for r in results]
    for r in results:
        assert r.details["delta=0.1"] >= r.details["delta=0.01"] - 1e-8 >= r.details["delta=0.001"] - 2e-8


def test_suite_passes_on_fixture(fixture_instances):
    report = run_oracle_suite(fixture_instances, OracleCheckSettings())
    assert report.passed()
    assert report.completed_at is not None
    counts = report.counts()
    assert set(counts) == {"strong_duality", "nesting", "delta_limit"}
    assert counts["strong_duality"]["passed"] == 3


def test_suite_catches_a_broken_dual(fixture_instances, caplog):
    report = run_oracle_suite(fixture_instances, OracleCheckSettings(),
                              dual_fn=lambda inst: -dual_robust_value_discrete(inst) - 1.0)
    assert not report.passed()
    assert "strong_duality" in {r.check for r in report.failures()}
    assert "strong_duality failed" in caplog.text
