"""Acceptance suite: one test per criterion, each printing a PASS line
with the measured numbers once its assertions hold.

Run with ``pytest tests/test_acceptance.py -v`` for the per-criterion
pass/fail listing.
"""

import itertools
import math
import time
import warnings

import numpy as np
from scipy import stats

from ctgraph import (
    GraphShape,
    GraphSpec,
    ObservationConfig,
    RewardSettings,
    RngStreams,
    build_model,
    count_end_states,
    count_states,
    draw_task,
    enumerate_states,
    final_mean_return,
    format_transcripts_csv,
    gradient_match,
    length_chi_square,
    make_curriculum,
    mc_estimate,
    needle_reward,
    p_any_end,
    p_reward_navigation,
    p_reward_random,
    preset,
    q_learn,
    random_policy,
    run_episode,
    stochastic_reward,
    write_image_set,
)

# (b, d, p) -> printed (P_R, P_E, P_RNP, states, end states)
REFERENCE_ROWS = {
    (2, 1, 0.0): (3.70e-2, 7.40e-2, 1 / 2, 8, 2),
    (2, 2, 0.9): (1.20e-5, 4.78e-5, 1 / 4, 16, 4),
    (3, 2, 0.9): (2.10e-6, 1.89e-5, 1 / 9, 28, 9),
    (2, 4, 0.9): (3.02e-9, 4.84e-8, 1 / 16, 64, 16),
    (3, 10, 0.9): (3.75e-23, 2.22e-18, 1 / 59049, 177148, 59049),
    (2, 16, 0.5): (3.04e-20, 1.99e-15, 1 / 65536, 262144, 65536),
}

# "matches to 3 significant figures": relative error below half a percent,
# which also absorbs the reference table's own last-digit truncation
SIG3 = 5e-3


def _report(criterion, detail):
    print(f"PASS {criterion}: {detail}")


def _plain_spec(b, d, p, seed=1, goal=None):
    return GraphSpec(
        seed=seed,
        shape=GraphShape(b, d, p),
        reward=RewardSettings(goal=goal),
        obs=ObservationConfig(one_d=False, nr_images=5, mdp_d=False, mdp_w=False,
                              d_ids=(2, 2), w_ids=(3, 3)),
    ).validate()


def test_criterion_1_reference_table_closed_forms():
    t0 = time.perf_counter()
    for (b, d, p), (p_r, p_e, p_rnp, states, ends) in REFERENCE_ROWS.items():
        shape = GraphShape(b, d, p)
        assert abs(p_reward_random(shape) - p_r) / p_r < SIG3, (b, d, p)
        assert abs(p_any_end(shape) - p_e) / p_e < SIG3, (b, d, p)
        assert abs(p_reward_navigation(shape) - p_rnp) / p_rnp < SIG3, (b, d, p)
        assert count_states(shape) == states, (b, d, p)
        assert count_end_states(shape) == ends, (b, d, p)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"took {elapsed:.3f}s, budget 1s"
    _report("criterion 1", f"six reference rows reproduced to 3 sig figs "
                           f"in {elapsed * 1e3:.1f} ms")


def test_criterion_2_monte_carlo_vs_closed_form():
    episodes = 1_000_000

    spec = _plain_spec(2, 1, 0.0, seed=2024)
    res = mc_estimate("p_any_end", spec, episodes, RngStreams.from_seed(spec.seed))
    ref = p_any_end(spec.shape)  # 7.40e-2
    sigma = math.sqrt(ref * (1 - ref) / episodes)
    dev_a = abs(res.estimate - ref)
    assert dev_a < 4 * sigma, f"P_E dev {dev_a:.3g} vs 4 sigma {4 * sigma:.3g}"
    assert res.elapsed_s < 120, f"{res.elapsed_s:.1f}s"
    assert res.steps_per_second >= 1e6, f"{res.steps_per_second:.3g} steps/s"
    rate_a = res.steps_per_second

    spec = preset("CT-POSR-B1", seed=77)
    res = mc_estimate("p_reward_random", spec, episodes, RngStreams.from_seed(spec.seed))
    ref = p_reward_random(spec.shape)  # 8.88e-4
    sigma = math.sqrt(ref * (1 - ref) / episodes)
    dev_b = abs(res.estimate - ref)
    assert dev_b < 4 * sigma, f"P_R dev {dev_b:.3g} vs 4 sigma {4 * sigma:.3g}"
    assert res.elapsed_s < 120, f"{res.elapsed_s:.1f}s"
    assert res.steps_per_second >= 1e6, f"{res.steps_per_second:.3g} steps/s"

    _report("criterion 2", f"1e6-episode runs within 4 sigma "
                           f"(devs {dev_a:.2e}, {dev_b:.2e}) at "
                           f"{min(rate_a, res.steps_per_second):.2g}+ steps/s")


def test_criterion_3_episode_length_law():
    spec = _plain_spec(2, 2, 0.9, seed=5150)
    episodes = 100_000
    res = mc_estimate("length_pmf", spec, episodes, RngStreams.from_seed(spec.seed))
    dev = abs(res.estimate - 33.0) / 33.0
    assert dev < 0.01, f"mean length {res.estimate:.3f}, want 33 +/- 1%"
    chi2, dof = length_chi_square(res.detail["length_counts"], spec.shape)
    crit = stats.chi2.ppf(0.99, dof)
    assert chi2 < crit, f"chi2 {chi2:.1f} >= {crit:.1f} at dof {dof}"
    _report("criterion 3", f"mean {res.estimate:.3f} (dev {dev:.2%}); "
                           f"chi2 {chi2:.1f} < {crit:.1f} (dof {dof})")


def test_criterion_4_state_count_oracle():
    checked = 0
    for (b, d, p) in REFERENCE_ROWS:
        shape = GraphShape(b, d, p)
        expected = count_states(shape)
        if expected > 300_000:
            continue
        observed = sum(1 for _ in enumerate_states(shape))
        assert observed == expected, (b, d)
        checked += 1
    assert checked == len(REFERENCE_ROWS)  # every row is within the bound
    _report("criterion 4", f"enumeration matched the closed-form count for "
                           f"{checked} shapes up to 262144 states")


def test_criterion_5_reward_function_suite():
    # exhaustive leaf sweeps
    for d in (1, 2, 3, 4):
        shape = GraphShape(2, d)
        task = draw_task(shape, RngStreams.from_seed(d))
        traces = list(itertools.product((1, 2), repeat=d))
        needle_hits = [t for t in traces if needle_reward(task, t) != 0.0]
        assert needle_hits == [task.goal]
        assert needle_reward(task, task.goal) == task.high_r
        values = {t: gradient_match(task, t, shape) for t in traces}
        assert all(0.0 <= v <= 1.0 for v in values.values())
        assert [t for t, v in values.items() if v == 1.0] == [task.goal]
        assert min(values.values()) == 0.0

    # stochastic moments
    shape = GraphShape(2, 2)
    task = draw_task(shape, RngStreams.from_seed(55), mode="stochastic", std_r=0.1)
    st = RngStreams.from_seed(56)
    draws = np.array([stochastic_reward(task, task.goal, shape, st)
                      for _ in range(100_000)])
    mean_dev = abs(draws.mean() - 1.0)
    std_dev = abs(draws.std(ddof=1) - 0.1)
    assert mean_dev < 0.002, f"mean dev {mean_dev:.4f}"
    assert std_dev < 0.002, f"std dev {std_dev:.4f}"

    # optimal-search bound
    spec = _plain_spec(2, 3, 0.0, seed=99)
    res = mc_estimate("search_episodes", spec, 10_000, RngStreams.from_seed(99))
    bound_dev = abs(res.estimate - 4.5) / 4.5
    assert bound_dev < 0.02, f"search mean {res.estimate:.3f}, want 4.5 +/- 2%"

    _report("criterion 5", f"needle/gradient sweeps exact (b=2, d<=4); "
                           f"stochastic moments within 0.002; "
                           f"search bound dev {bound_dev:.2%}")


def test_criterion_6_learning_baseline():
    t0 = time.perf_counter()
    solved = 0
    for seed in range(10):
        res = q_learn(preset("CT-FO-B1", seed=seed), episodes=10_000)
        solved += final_mean_return(res) >= 0.95
    elapsed = time.perf_counter() - t0
    assert solved >= 9, f"only {solved}/10 seeds reached 0.95"
    assert elapsed < 30, f"training took {elapsed:.1f}s, budget 30s"

    streams = RngStreams.from_seed(1)
    tasks = make_curriculum(preset("CT-SU-B1"), "reward", 4, streams)
    failed = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for item in tasks:
            res = q_learn(item.spec, episodes=4000)
            if final_mean_return(res) < 0.95:
                failed.append(item.task.goal)
    assert failed, "expected at least one unsolved surjective task"
    _report("criterion 6", f"{solved}/10 seeds solved the observable baseline "
                           f"in {elapsed:.1f}s; surjective graph left "
                           f"{len(failed)}/4 tasks unsolved {failed}")


def test_criterion_7_determinism(tmp_path):
    def roll(seed):
        spec = preset("CT-POSR-B1", seed=seed)
        streams = RngStreams.from_seed(spec.seed)
        model = build_model(spec, streams)
        pol = random_policy(spec.shape.branching, streams)
        return format_transcripts_csv(
            run_episode(pol, model, streams) for _ in range(200)).encode()

    assert roll(7) == roll(7), "same seed must give byte-identical transcripts"
    assert roll(7) != roll(8)

    cfg_a = ObservationConfig(one_d=False, nr_images=5, mdp_d=False, mdp_w=False,
                              d_ids=(2, 2), w_ids=(3, 3), image_seed=1)
    cfg_b = ObservationConfig(one_d=False, nr_images=5, mdp_d=False, mdp_w=False,
                              d_ids=(2, 2), w_ids=(3, 3), image_seed=2)
    write_image_set(cfg_a, tmp_path / "a")
    write_image_set(cfg_b, tmp_path / "b")
    dump = lambda sub: b"".join(sorted(p.read_bytes()
                                       for p in (tmp_path / sub).glob("*.pgm")))
    assert dump("a") != dump("b"), "different image seeds must change the dump"
    _report("criterion 7", "byte-identical transcripts per seed; "
                           "image dumps differ across image seeds")


def test_criterion_8_curriculum_properties():
    streams = RngStreams.from_seed(1)
    tasks = make_curriculum(preset("CT-SU-B1"), "reward", 4, streams)
    goals = [t.task.goal for t in tasks]
    assert len(set(goals)) == 4
    traces = list(itertools.product((1, 2), repeat=2))
    for i, a in enumerate(tasks):
        for b in tasks[i + 1:]:
            assert not any(needle_reward(a.task, t) > 0 and
                           needle_reward(b.task, t) > 0 for t in traces), \
                "two tasks pay the same trace"

    deep = make_curriculum(preset("CT-FO-B1"), "depth", 4,
                           RngStreams.from_seed(2), aligned_goals=True)
    for shallow, deeper in zip(deep, deep[1:]):
        assert deeper.task.goal[: len(shallow.task.goal)] == shallow.task.goal
    _report("criterion 8", f"4 reward-variation goals pairwise adversarial "
                           f"{goals}; aligned depth goals are prefixes")
