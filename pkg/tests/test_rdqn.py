import numpy as np
import pytest
from scipy import stats

from models.ambiguity import AmbiguityConfig, LambdaSolverConfig, NuSpec
from models.errors import InputError
from models.experience import Transition
from models.training import ExplorationSchedule, TrainConfig, TrainLogRow
from nn.network import QNetwork, forward_batch
from rdqn import (
    ReplayBuffer, annualized_volatility, downside_deviation, evaluate_constant_action, evaluate_policy,
    greedy_action, max_drawdown, portfolio_stats, q_loss_and_grads, run_episodes, select_action,
    sharpe_ratio, sortino_ratio, train, wealth_path,
)
from sinkhorn_dual.cache import LambdaCache

from .conftest import make_transitions


def _transition(value: float, action: int = 0) -> Transition:
    return Transition(np.array([value]), action, value, np.array([value + 1.0]))


# ----------------------------------------------------------------------------
# replay
# ----------------------------------------------------------------------------

def test_replay_ring_overwrites_oldest_slot():
    buffer = ReplayBuffer(2)
    assert buffer.push(_transition(0.0)) == (0, False)
    assert buffer.push(_transition(1.0)) == (1, False)
    assert buffer.push(_transition(2.0)) == (0, True)
    assert len(buffer) == 2
    assert buffer[0].reward == 2.0
    assert buffer[1].reward == 1.0


def test_replay_sampling(rng):
    buffer = ReplayBuffer(10)
    with pytest.raises(InputError):
        buffer.sample(1, rng)
    for i in range(5):
        buffer.push(_transition(float(i)))
    slots, batch = buffer.sample(3, rng)
    assert len(set(slots.tolist())) == 3
    assert [tr.reward for tr in batch] == [float(s) for s in slots]
    slots, batch = buffer.sample(8, rng)
    assert len(batch) == 8 and slots.max() < 5
    with pytest.raises(IndexError):
        buffer[7]


def test_replay_capacity_must_be_positive():
    with pytest.raises(InputError):
        ReplayBuffer(0)


# ----------------------------------------------------------------------------
# policy
# ----------------------------------------------------------------------------

def _biased_net(biases):
    net = QNetwork.zeros([1, len(biases)])
    net.biases[-1][:] = biases
    return net


def test_greedy_tie_keeps_lowest_index(rng):
    net = _biased_net([0.1, 0.9, 0.9])
    assert greedy_action(net, np.array([0.3])) == 1
    assert select_action(net, np.array([0.3]), 0.0, rng) == 1


def test_full_exploration_is_uniform(rng):
    net = _biased_net([0.1, 0.9, 0.9])
    counts = np.bincount([select_action(net, np.array([0.0]), 1.0, rng) for _ in range(3000)], minlength=3)
    assert stats.chisquare(counts).pvalue > 1e-3


def test_action_selection_is_reproducible():
    net = _biased_net([0.1, 0.9, 0.3])
    first = np.random.default_rng(4)
    second = np.random.default_rng(4)
    run1 = [select_action(net, np.array([0.0]), 0.5, first) for _ in range(50)]
    run2 = [select_action(net, np.array([0.0]), 0.5, second) for _ in range(50)]
    assert run1 == run2
    with pytest.raises(ValueError):
        select_action(net, np.array([0.0]), 1.5, first)


def test_exploration_schedule_decays_linearly():
    schedule = ExplorationSchedule(start=1.0, end=0.1, decay_fraction=0.5)
    assert schedule.value(0, 100) == pytest.approx(1.0)
    assert schedule.value(25, 100) == pytest.approx(0.55)
    assert schedule.value(50, 100) == pytest.approx(0.1)
    assert schedule.value(99, 100) == pytest.approx(0.1)


# ----------------------------------------------------------------------------
# loss and training
# ----------------------------------------------------------------------------

def test_q_loss_gradient_matches_finite_differences(small_net):
    transitions = make_transitions([[0.1, 0.2], [-0.4, 0.3], [0.5, -0.5]], [0, 2, 1], [0.0] * 3,
                                   [[0.0, 0.0]] * 3)
    targets = np.array([0.5, -0.2, 1.0])
    loss, grads = q_loss_and_grads(small_net, transitions, targets)

    outputs, _ = forward_batch(small_net, np.stack([tr.state for tr in transitions]))
    assert loss == pytest.approx(np.mean((outputs[[0, 1, 2], [0, 2, 1]] - targets) ** 2))

    h = 1e-6
    for p, g in zip(small_net.parameters(), grads):
        flat = p.reshape(-1)
        for idx in range(min(4, flat.size)):
            original = flat[idx]
            flat[idx] = original + h
            up, _ = q_loss_and_grads(small_net, transitions, targets)
            flat[idx] = original - h
            down, _ = q_loss_and_grads(small_net, transitions, targets)
            flat[idx] = original
            assert g.reshape(-1)[idx] == pytest.approx((up - down) / (2 * h), rel=1e-4, abs=1e-8)


def test_q_loss_skips_dropped_targets(small_net):
    transitions = make_transitions([[0.1, 0.2], [-0.4, 0.3]], [0, 2], [0.0, 0.0], [[0.0, 0.0]] * 2)
    masked, masked_grads = q_loss_and_grads(small_net, transitions, np.array([np.nan, 0.7]))
    alone, alone_grads = q_loss_and_grads(small_net, transitions[1:], np.array([0.7]))
    assert masked == pytest.approx(alone)
    for a, b in zip(masked_grads, alone_grads):
        np.testing.assert_allclose(a, b)
    with pytest.raises(InputError):
        q_loss_and_grads(small_net, transitions, np.array([np.nan, np.nan]))


def test_zero_steps_returns_initial_network(constant_env_factory, rng):
    env = constant_env_factory([0.2, 1.0], rng)
    cfg = TrainConfig(total_steps=0, seed=3, hidden_sizes=[4])
    result = train(env, cfg)
    again = train(constant_env_factory([0.2, 1.0], rng), cfg)
    assert result.log == [] and result.gradient_steps == 0
    for a, b in zip(result.network.parameters(), again.network.parameters()):
        np.testing.assert_array_equal(a, b)
    for a, b in zip(result.network.parameters(), result.target_network.parameters()):
        np.testing.assert_array_equal(a, b)


def test_training_environments_must_match(constant_env_factory, rng):
    with pytest.raises(InputError):
        train([constant_env_factory([0.0, 1.0], rng), constant_env_factory([0.0, 1.0, 2.0], rng)],
              TrainConfig(total_steps=1))
    with pytest.raises(InputError):
        train([], TrainConfig(total_steps=1))


def _fast_config(**overrides) -> TrainConfig:
    base = dict(discount=0.5, batch_size=16, gradient_steps=2, target_sync_period=50,
                exploration=ExplorationSchedule(start=1.0, end=0.3, decay_fraction=0.5),
                total_steps=2000, seed=11, hidden_sizes=[16], learning_rate=5e-3,
                buffer_capacity=2000, learning_starts=32, log_every=250)
    base.update(overrides)
    return TrainConfig(**base)


def test_dqn_matches_value_iteration_on_flip_env(flip_env_factory):
    discount = 0.5
    result = train(flip_env_factory(np.random.default_rng(0)), _fast_config(discount=discount))
    q = result.network.predict(np.array([[0.0], [1.0]]))
    right, wrong = 1.0 / (1.0 - discount), discount / (1.0 - discount)
    np.testing.assert_allclose(q, [[right, wrong], [wrong, right]], atol=0.2)
    assert greedy_action(result.network, np.array([0.0])) == 0
    assert greedy_action(result.network, np.array([1.0])) == 1
    assert result.gradient_steps > 0
    assert all(isinstance(row, TrainLogRow) for row in result.log)
    assert all(np.isnan(row.mean_lambda) for row in result.log)


def test_robust_training_with_vanishing_ball_matches_dqn(constant_env_factory):
    q_star = np.array([0.2 + 0.5 * 2.0, 1.0 + 0.5 * 2.0])
    ambiguity = AmbiguityConfig(epsilon=1e-4, delta=0.1, nu=NuSpec.point_mass([0.5]), n_nu=4,
                                solver=LambdaSolverConfig(max_iters=5))
    dqn = train(constant_env_factory([0.2, 1.0], np.random.default_rng(1)), _fast_config(total_steps=1500))
    robust = train(constant_env_factory([0.2, 1.0], np.random.default_rng(1)),
                   _fast_config(total_steps=1500, ambiguity=ambiguity))
    state = np.array([[0.5]])
    np.testing.assert_allclose(dqn.network.predict(state)[0], q_star, atol=0.1)
    np.testing.assert_allclose(robust.network.predict(state)[0], q_star, atol=0.1)
    np.testing.assert_allclose(robust.network.predict(state), dqn.network.predict(state), atol=0.1)
    assert robust.dropped == 0
    assert all(row.mean_lambda > 0 for row in robust.log)
    assert all(row.eps_bar_negatives == 0 for row in robust.log)


def test_evicted_slots_drop_cached_lambdas(constant_env_factory, monkeypatch):
    invalidated = []
    original = LambdaCache.invalidate

    def record(self, slot):
        invalidated.append(int(slot))
        original(self, slot)

    monkeypatch.setattr(LambdaCache, "invalidate", record)
    ambiguity = AmbiguityConfig(epsilon=0.01, delta=0.1, nu=NuSpec.point_mass([0.5]), n_nu=2)
    cfg = _fast_config(total_steps=20, batch_size=4, buffer_capacity=4, learning_starts=4,
                       ambiguity=ambiguity)
    train(constant_env_factory([0.2, 1.0], np.random.default_rng(2)), cfg)
    assert invalidated == [step % 4 for step in range(4, 20)]


def test_training_is_reproducible(flip_env_factory):
    cfg = _fast_config(total_steps=300, log_every=50)
    first = train(flip_env_factory(np.random.default_rng(5)), cfg)
    second = train(flip_env_factory(np.random.default_rng(5)), cfg)
    assert [(row.step, row.loss, row.mean_target) for row in first.log] == \
        [(row.step, row.loss, row.mean_target) for row in second.log]
    for a, b in zip(first.network.parameters(), second.network.parameters()):
        np.testing.assert_array_equal(a, b)


def test_training_log_written_with_header(flip_env_factory, tmp_path):
    result = train(flip_env_factory(np.random.default_rng(5)), _fast_config(total_steps=200, log_every=100))
    path = result.write_log(tmp_path / "log.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(TrainLogRow.CSV_COLUMNS)
    assert len(lines) == 1 + len(result.log)


# ----------------------------------------------------------------------------
# evaluation
# ----------------------------------------------------------------------------

def test_max_drawdown_example():
    assert max_drawdown([1.0, 2.0, 1.0, 3.0]) == pytest.approx(-0.5)
    assert max_drawdown([1.0, 1.1, 1.2]) == 0.0
    with pytest.raises(InputError):
        max_drawdown([])


def test_ratio_hand_computation():
    r = np.array([0.02, -0.01])
    annual = np.sqrt(252)
    assert sharpe_ratio(r) == pytest.approx(0.005 / 0.015 * annual)
    assert downside_deviation(r) == pytest.approx(0.005 * annual)
    assert sortino_ratio(r) == pytest.approx(annual)
    assert annualized_volatility(r) == pytest.approx(0.015 * annual)
    assert sortino_ratio(np.array([0.01, 0.02])) == 0.0


def test_wealth_telescopes():
    r = np.random.default_rng(0).normal(0.0, 0.01, size=500)
    path = wealth_path(r)
    assert path[0] == 1.0 and path.size == 501
    assert path[-1] == pytest.approx(np.exp(r.sum()), rel=1e-12)
    assert portfolio_stats(r).wealth == pytest.approx(path[-1], rel=1e-12)


def test_constant_environment_has_zero_spread(constant_env_factory, rng):
    env = constant_env_factory([0.2, 1.0], rng)
    stats_ = evaluate_constant_action(1, env, episodes=3, steps_per_episode=10)
    assert stats_.mean == pytest.approx(1.0)
    assert stats_.std == 0.0
    assert stats_.portfolio == []
    with pytest.raises(InputError):
        evaluate_constant_action(2, env, 1, 1)
    with pytest.raises(InputError):
        run_episodes(lambda s: 0, env, episodes=0, steps_per_episode=5)


def test_greedy_evaluation_follows_network(constant_env_factory, rng):
    env = constant_env_factory([0.2, 1.0], rng)
    assert evaluate_policy(_biased_net([0.0, 1.0]), env, 2, 5).mean == pytest.approx(1.0)
    assert evaluate_policy(_biased_net([1.0, 0.0]), env, 2, 5).mean == pytest.approx(0.2)
