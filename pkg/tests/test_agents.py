import warnings

import numpy as np
import pytest

from ctgraph import (
    ContractError,
    GraphShape,
    QLearningParams,
    RngStreams,
    StateKind,
    TaskSpec,
    act_navigation,
    act_optimal,
    act_random,
    build_model,
    final_mean_return,
    navigation_policy,
    optimal_policy,
    preset,
    q_learn,
    run_episode,
    write_learning_curve,
)
from ctgraph.agents import epsilon_at


def streams(seed=1):
    return RngStreams.from_seed(seed)


def test_act_random_uniform_over_all_actions():
    st = streams(3)
    n = 100_000
    counts = np.bincount([act_random(None, 2, st) for _ in range(n)], minlength=3)
    assert counts.size == 3
    for c in counts:
        assert abs(c / n - 1 / 3) < 0.01


def test_act_navigation_waits_and_branches():
    st = streams(1)
    assert act_navigation(StateKind.HOME, 2, st) == 0
    assert act_navigation(StateKind.WAIT, 2, st) == 0
    draws = {act_navigation(StateKind.DECISION, 3, st) for _ in range(200)}
    assert draws == {1, 2, 3}
    with pytest.raises(ContractError):
        act_navigation(StateKind.END, 2, st)


def test_navigation_never_fails_and_hits_goal_at_navigation_rate():
    spec = preset("CT-SU-B1")
    st = streams(5)
    model = build_model(spec, st)
    pol = navigation_policy(2, st)
    n = 20_000
    goal_hits = 0
    for _ in range(n):
        t = run_episode(pol, model, st)
        assert t.final_state.kind is StateKind.END
        goal_hits += t.total_reward > 0
    # 1 / b**d = 0.25; binomial 4-sigma band
    sigma = (0.25 * 0.75 / n) ** 0.5
    assert abs(goal_hits / n - 0.25) < 4 * sigma


def test_act_optimal_replays_goal():
    task = TaskSpec(goal=(2, 1, 2))
    assert act_optimal(StateKind.HOME, 0, task) == 0
    assert act_optimal(StateKind.WAIT, 1, task) == 0
    assert act_optimal(StateKind.DECISION, 0, task) == 2
    assert act_optimal(StateKind.DECISION, 2, task) == 2
    with pytest.raises(ContractError):
        act_optimal(StateKind.DECISION, 3, task)
    with pytest.raises(ContractError):
        act_optimal(StateKind.FAIL, 0, task)


def test_optimal_policy_always_collects_the_reward():
    spec = preset("CT-POSR-B1")  # p = 0.5
    st = streams(2)
    model = build_model(spec, st)
    pol = optimal_policy(model.task)
    for _ in range(300):
        t = run_episode(pol, model, st)
        assert t.total_reward == model.task.high_r
        assert t.decision_trace == model.task.goal


def test_optimal_mean_length_matches_formula_at_high_wait_prob():
    from ctgraph import GraphSpec, ObservationConfig, RewardSettings
    spec = GraphSpec(seed=3, shape=GraphShape(2, 2, 0.9),
                     reward=RewardSettings(),
                     obs=ObservationConfig(one_d=False, nr_images=5, mdp_d=False,
                                           mdp_w=False, d_ids=(2, 2), w_ids=(3, 3)))
    st = streams(3)
    model = build_model(spec, st)
    pol = optimal_policy(model.task)
    lengths = [run_episode(pol, model, st).length for _ in range(10_000)]
    assert abs(np.mean(lengths) - 33.0) / 33.0 < 0.01


def test_epsilon_schedule_shape():
    params = QLearningParams()
    total = 1000
    assert epsilon_at(0, total, params) == 1.0
    assert epsilon_at(500, total, params) == pytest.approx(0.05)
    assert epsilon_at(total - 1, total, params) == pytest.approx(0.0, abs=1e-3)
    eps = [epsilon_at(i, total, params) for i in range(total)]
    assert all(a >= b for a, b in zip(eps, eps[1:]))  # non-increasing


def test_q_learn_solves_the_fully_observable_baseline():
    res = q_learn(preset("CT-FO-B1", seed=0), episodes=6000)
    assert not res.partially_observable
    assert len(res.returns) == 6000
    assert final_mean_return(res) >= 0.95


def test_q_learn_warns_on_partially_observable_config():
    with pytest.warns(UserWarning, match="partially observable"):
        q_learn(preset("CT-SU-B1"), episodes=10)


def test_q_learn_gamma_zero_never_bootstraps_interior_values():
    # zero discount: only the terminal update can move a value, so every
    # interior state-action estimate stays at zero
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = q_learn(preset("CT-SU-B1", seed=4), episodes=500,
                      params=QLearningParams(gamma=0.0))
    wait_row = res.q_table.get(3)
    dec_row = res.q_table.get(2)
    assert wait_row is not None and dec_row is not None
    assert all(v == 0.0 for v in dec_row)  # decision steps never enter a leaf
    assert wait_row[1] == 0.0 and wait_row[2] == 0.0


def test_learning_curve_export(tmp_path):
    res = q_learn(preset("CT-FO-B1", seed=1), episodes=50)
    out = write_learning_curve(tmp_path / "curve.csv", res)
    lines = out.read_text().splitlines()
    assert lines[0] == "episode,return,epsilon"
    assert len(lines) == 51
    first = lines[1].split(",")
    assert first[0] == "0" and float(first[2]) == 1.0
