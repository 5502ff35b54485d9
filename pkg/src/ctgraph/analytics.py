"""Closed-form calculators for the tree's episode statistics and the
Monte Carlo estimators that validate them.

Notation: b branches per decision, d decision layers, p the per-step
probability of staying in a wait state.

  mean episode steps        (1-p)^-1 (d+1) + d + 1
  P(reward | random policy) (b+1) * ((1-p) / ((b+1)(b+1-p)))^(d+1),
                            equivalently the sum over episode lengths l of
                            P(length = l) * (b+1)^-(l-1) — the home step is
                            free, every later action must be the right one
  P(any leaf | random)      the above times b**d (leaf events are disjoint)
  P(goal | navigation)      1 / b**d
  mean search episodes      (b**d + 1) / 2 for a sampler that tries leaves
                            without repetition
  episode length pmf        P(length = n + 2(d+1)) =
                            p^n (1-p)^(d+1) (n+d)! / (n! d!), a negative
                            binomial over the n extra wait steps; the
                            minimum length is 2(d+1)

All series and pmf arithmetic run in log space with compensated summation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .config import GraphSpec
from .dynamics import EnvModel, advance, build_model
from .errors import ConfigError
from .rng import RngStreams
from .topology import GraphShape, StateKind, count_end_states, count_states, path_rank

MC_QUANTITIES = ("p_reward_random", "p_any_end", "mean_steps", "length_pmf",
                 "search_episodes")


# ---------------------------------------------------------------------------
# closed forms

def expected_episode_steps(shape: GraphShape) -> float:
    """Mean number of steps from home to a leaf for any policy that never
    fails.  Diverges as p -> 1 (GraphShape already rejects p = 1)."""
    p, d = shape.wait_prob, shape.depth
    return (d + 1) / (1.0 - p) + d + 1


def p_reward_random(shape: GraphShape) -> float:
    """Probability that one episode under the uniform random policy ends
    at the single rewarding leaf."""
    b, d, p = shape.branching, shape.depth, shape.wait_prob
    return (b + 1) * ((1.0 - p) / ((b + 1) * (b + 1 - p))) ** (d + 1)


def p_reward_random_series(shape: GraphShape, rel_tol: float = 1e-16,
                           max_terms: int = 200_000) -> float:
    """Independent evaluation of the same probability as an explicit sum
    over episode lengths; used to cross-check the closed form."""
    b, d, p = shape.branching, shape.depth, shape.wait_prob
    if p == 0.0:
        return (b + 1) ** -(2 * d + 1)
    log_b1 = math.log(b + 1)
    log_p = math.log(p)
    log_q = math.log1p(-p) * (d + 1)
    lgd = math.lgamma(d + 1)
    terms: list[float] = []
    total = 0.0
    for n in range(max_terms):
        log_t = (-(2 * d + 1 + n) * log_b1 + log_q + n * log_p
                 + math.lgamma(n + d + 1) - math.lgamma(n + 1) - lgd)
        t = math.exp(log_t)
        terms.append(t)
        total += t
        # terms decay geometrically once past the mode of the distribution
        if n > 4 * (d + 2) and t < rel_tol * total:
            break
    return math.fsum(terms)


def p_any_end(shape: GraphShape) -> float:
    """Probability that one random-policy episode reaches any leaf."""
    return p_reward_random(shape) * count_end_states(shape)


def p_reward_navigation(shape: GraphShape) -> float:
    """Goal-hit probability per episode for a policy that never fails but
    picks branches uniformly."""
    return 1.0 / count_end_states(shape)


def expected_search_episodes(shape: GraphShape) -> float:
    """Mean episodes an optimal explorer needs to find the goal leaf when
    it tries leaves without repetition."""
    return (count_end_states(shape) + 1) / 2.0


def min_episode_length(shape: GraphShape) -> int:
    return 2 * (shape.depth + 1)


def episode_length_pmf(shape: GraphShape, length: int) -> float:
    """P(episode length = length) for any never-failing policy."""
    d, p = shape.depth, shape.wait_prob
    n = length - min_episode_length(shape)
    if n < 0:
        return 0.0
    if p == 0.0:
        return 1.0 if n == 0 else 0.0
    log_pmf = (n * math.log(p) + (d + 1) * math.log1p(-p)
               + math.lgamma(n + d + 1) - math.lgamma(n + 1) - math.lgamma(d + 1))
    return math.exp(log_pmf)


def episode_length_support(shape: GraphShape, tail: float = 1e-12,
                           max_lengths: int = 10_000_000) -> Iterator[tuple[int, float]]:
    """Yield (length, probability) in increasing length order until the
    remaining tail mass drops below ``tail``."""
    cum = 0.0
    length = min_episode_length(shape)
    for _ in range(max_lengths):
        prob = episode_length_pmf(shape, length)
        yield length, prob
        cum += prob
        if 1.0 - cum < tail:
            return
        length += 1
    raise ConfigError(f"length support did not converge within {max_lengths} terms")


def length_chi_square(counts: dict[int, int], shape: GraphShape,
                      min_expected: float = 5.0) -> tuple[float, int]:
    """Chi-square statistic of observed episode-length counts against the
    closed-form pmf, with trailing bins grouped so every expected count is
    at least ``min_expected``.  Returns (statistic, degrees of freedom)."""
    n = sum(counts.values())
    if n <= 0:
        raise ConfigError("need at least one observed episode length")
    obs_groups: list[float] = []
    exp_groups: list[float] = []
    acc_exp = 0.0
    acc_obs = 0.0
    cum = 0.0
    last_len = 0
    tail_mass = min(1e-9, min_expected / (2.0 * n))
    for length, prob in episode_length_support(shape, tail=tail_mass):
        acc_exp += prob * n
        acc_obs += counts.get(length, 0)
        cum += prob
        last_len = length
        if acc_exp >= min_expected:
            obs_groups.append(acc_obs)
            exp_groups.append(acc_exp)
            acc_exp = 0.0
            acc_obs = 0.0
    tail_exp = acc_exp + (1.0 - cum) * n
    tail_obs = acc_obs + sum(c for l, c in counts.items() if l > last_len)
    if exp_groups and tail_exp < min_expected:
        exp_groups[-1] += tail_exp
        obs_groups[-1] += tail_obs
    elif tail_exp > 0:
        exp_groups.append(tail_exp)
        obs_groups.append(tail_obs)
    if len(exp_groups) < 2:
        return 0.0, 0
    chi2 = sum((o - e) ** 2 / e for o, e in zip(obs_groups, exp_groups))
    return float(chi2), len(exp_groups) - 1


@dataclass(frozen=True)
class GraphAnalytics:
    n_states: int
    n_end_states: int
    mean_episode_steps: float
    p_reward_random: float
    p_any_end: float
    p_reward_navigation: float
    mean_search_episodes: float

    def as_dict(self) -> dict:
        return {
            "n_states": self.n_states,
            "n_end_states": self.n_end_states,
            "mean_episode_steps": self.mean_episode_steps,
            "p_reward_random": self.p_reward_random,
            "p_any_end": self.p_any_end,
            "p_reward_navigation": self.p_reward_navigation,
            "mean_search_episodes": self.mean_search_episodes,
        }


def analyze_shape(shape: GraphShape) -> GraphAnalytics:
    return GraphAnalytics(
        n_states=count_states(shape),
        n_end_states=count_end_states(shape),
        mean_episode_steps=expected_episode_steps(shape),
        p_reward_random=p_reward_random(shape),
        p_any_end=p_any_end(shape),
        p_reward_navigation=p_reward_navigation(shape),
        mean_search_episodes=expected_search_episodes(shape),
    )


def format_analytics(shape: GraphShape, analytics: GraphAnalytics | None = None) -> str:
    """Flat key=value block for machine diffing."""
    analytics = analytics or analyze_shape(shape)
    lines = [f"b={shape.branching}", f"d={shape.depth}", f"p={shape.wait_prob:g}"]
    for key, value in analytics.as_dict().items():
        if isinstance(value, float):
            lines.append(f"{key}={value:.12g}")
        else:
            lines.append(f"{key}={value}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Monte Carlo estimators

@dataclass
class McResult:
    quantity: str
    estimate: float
    stderr: float
    episodes: int
    total_steps: int
    elapsed_s: float
    truncated_episodes: int = 0
    detail: dict = field(default_factory=dict)

    @property
    def steps_per_second(self) -> float:
        return self.total_steps / self.elapsed_s if self.elapsed_s > 0 else float("inf")

    def z_score(self, reference: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.estimate == reference else float("inf")
        return (self.estimate - reference) / self.stderr


def _random_policy_walk(shape: GraphShape, goal: tuple[int, ...], episodes: int,
                        rng: np.random.Generator,
                        chunk: int = 1 << 16) -> tuple[int, int, int]:
    """Simulate ``episodes`` random-policy episodes, vectorized across a
    chunk at a time; returns (goal hits, leaf hits, total steps).

    Each wait round literally draws an action for every episode still in
    the layer (non-zero fails it) and then an escape draw, so this is a
    mechanical walk of the transition rules, not a formula.
    """
    b, d, p = shape.branching, shape.depth, shape.wait_prob
    goal_hits = 0
    end_hits = 0
    total_steps = 0
    remaining = episodes
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        alive = np.ones(m, dtype=bool)
        on_goal = np.ones(m, dtype=bool)
        steps = np.ones(m, dtype=np.int64)  # the home step; any action advances
        for layer in range(d + 1):
            in_wait = alive.copy()
            while True:
                idx = np.nonzero(in_wait)[0]
                if idx.size == 0:
                    break
                actions = rng.integers(0, b + 1, idx.size)
                steps[idx] += 1
                wrong = actions != 0
                if wrong.any():
                    dead = idx[wrong]
                    alive[dead] = False
                    in_wait[dead] = False
                stayed_idx = idx[~wrong]
                if p > 0.0 and stayed_idx.size:
                    escaped = rng.random(stayed_idx.size) >= p
                    in_wait[stayed_idx[escaped]] = False
                else:
                    in_wait[stayed_idx] = False
            if layer < d:
                idx = np.nonzero(alive)[0]
                if idx.size == 0:
                    break
                actions = rng.integers(0, b + 1, idx.size)
                steps[idx] += 1
                failed = actions == 0
                alive[idx[failed]] = False
                kept = idx[~failed]
                on_goal[kept] &= actions[~failed] == goal[layer]
        end_hits += int(alive.sum())
        goal_hits += int((alive & on_goal).sum())
        total_steps += int(steps.sum())
    return goal_hits, end_hits, total_steps


def _navigation_lengths(model: EnvModel, episodes: int, streams: RngStreams,
                        step_cap: int = 1_000_000) -> tuple[dict[int, int], int, int]:
    """Episode lengths under the navigation policy, driven through the
    engine's transition function one step at a time.  Episodes hitting
    the step cap are counted as truncated and excluded from the length
    statistics rather than contaminating them."""
    shape = model.shape
    b = shape.branching
    dyn = streams.dynamics
    pol = streams.policy
    counts: dict[int, int] = {}
    total_steps = 0
    truncated = 0
    decision = StateKind.DECISION
    terminal = (StateKind.END, StateKind.FAIL)
    for _ in range(episodes):
        kind, depth, path = StateKind.HOME, 0, ()
        steps = 0
        while kind not in terminal:
            if steps >= step_cap:
                truncated += 1
                break
            action = int(pol.integers(1, b + 1)) if kind is decision else 0
            kind, depth, path, _, _ = advance(kind, depth, path, action, shape, dyn)
            steps += 1
        else:
            counts[steps] = counts.get(steps, 0) + 1
        total_steps += steps
    return counts, total_steps, truncated


def _search_episode_counts(shape: GraphShape, goal: tuple[int, ...], trials: int,
                           rng: np.random.Generator) -> np.ndarray:
    """For each trial, visit the leaves in a random order without
    repetition and record how many episodes it took to hit the goal."""
    n_ends = count_end_states(shape)
    if n_ends > 1 << 20:
        raise ConfigError(f"search simulation needs b**d <= 2**20, got {n_ends}")
    goal_rank = path_rank(goal, shape.branching)
    orders = np.tile(np.arange(n_ends), (trials, 1))
    orders = rng.permuted(orders, axis=1)
    return np.argmax(orders == goal_rank, axis=1) + 1


def mc_estimate(quantity: str, spec: GraphSpec, episodes: int,
                streams: RngStreams, model: EnvModel | None = None) -> McResult:
    """Empirical estimate with standard error for one of the closed-form
    quantities.  Random-policy probabilities use the vectorized walker;
    length statistics drive the engine's transition function with the
    navigation policy; the search bound samples leaves without repetition.
    """
    if quantity not in MC_QUANTITIES:
        raise ConfigError(f"unknown quantity {quantity!r}, expected one of {MC_QUANTITIES}")
    if episodes < 1:
        raise ConfigError("episodes must be >= 1")
    model = model or build_model(spec, streams)
    shape = model.shape
    t0 = time.perf_counter()

    if quantity in ("p_reward_random", "p_any_end"):
        goal_hits, end_hits, total_steps = _random_policy_walk(
            shape, model.task.goal, episodes, streams.dynamics)
        hits = goal_hits if quantity == "p_reward_random" else end_hits
        p_hat = hits / episodes
        stderr = math.sqrt(p_hat * (1.0 - p_hat) / episodes)
        return McResult(quantity, p_hat, stderr, episodes, total_steps,
                        time.perf_counter() - t0,
                        detail={"hits": hits, "goal_hits": goal_hits,
                                "end_hits": end_hits})

    if quantity in ("mean_steps", "length_pmf"):
        counts, total_steps, truncated = _navigation_lengths(model, episodes, streams)
        lengths = np.array(sorted(counts))
        freq = np.array([counts[int(l)] for l in lengths], dtype=np.int64)
        completed = int(freq.sum())
        mean = float(np.average(lengths, weights=freq))
        var = float(np.average((lengths - mean) ** 2, weights=freq))
        stderr = math.sqrt(var / completed) if completed else float("inf")
        return McResult(quantity, mean, stderr, episodes, total_steps,
                        time.perf_counter() - t0, truncated_episodes=truncated,
                        detail={"length_counts": counts})

    # search_episodes
    taken = _search_episode_counts(shape, model.task.goal, episodes, streams.task_gen)
    mean = float(taken.mean())
    stderr = float(taken.std(ddof=1) / math.sqrt(episodes)) if episodes > 1 else 0.0
    return McResult(quantity, mean, stderr, episodes, int(taken.sum()),
                    time.perf_counter() - t0)


@dataclass
class ValidationRow:
    name: str
    closed_form: float
    estimate: float
    stderr: float
    z: float
    steps_per_second: float


def validate_spec(spec: GraphSpec, episodes: int, streams: RngStreams,
                  nav_episodes: int | None = None) -> list[ValidationRow]:
    """Closed form vs Monte Carlo for the per-episode probabilities and
    the mean episode length.  Navigation episodes default to a tenth of
    the random-policy episodes (each one walks the whole tree)."""
    model = build_model(spec, streams)
    shape = model.shape
    nav_episodes = nav_episodes or max(1, episodes // 10)
    rows = []
    res = mc_estimate("p_reward_random", spec, episodes, streams, model=model)
    p_e_hat = res.detail["end_hits"] / episodes
    p_e_err = math.sqrt(p_e_hat * (1 - p_e_hat) / episodes)
    rows.append(ValidationRow("p_reward_random", p_reward_random(shape),
                              res.estimate, res.stderr,
                              res.z_score(p_reward_random(shape)),
                              res.steps_per_second))
    z_e = ((p_e_hat - p_any_end(shape)) / p_e_err) if p_e_err else 0.0
    rows.append(ValidationRow("p_any_end", p_any_end(shape), p_e_hat, p_e_err,
                              z_e, res.steps_per_second))
    res = mc_estimate("mean_steps", spec, nav_episodes, streams, model=model)
    rows.append(ValidationRow("mean_steps", expected_episode_steps(shape),
                              res.estimate, res.stderr,
                              res.z_score(expected_episode_steps(shape)),
                              res.steps_per_second))
    return rows
