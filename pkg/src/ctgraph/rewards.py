"""Goal sequences, the three terminal reward functions, and curriculum
generation for lifelong-learning protocols.

A task is a goal leaf, written as the sequence of branch choices that
reaches it.  Rewards are paid only on the transition into a leaf, as a
function of the decision trace (the branch choices actually taken):

  needle      high_r on the exact goal leaf, 0 anywhere else
  gradient    high_r * c, where c = 1 - weighted_deviation / (b**d - 1)
              with positional weights [b**(d-1), ..., b**0]; c is 1 only
              at the goal, 0 at maximal deviation, and in [0, 1] always
  stochastic  a gaussian draw centered on the gradient value with
              standard deviation std_r (negative samples are possible
              and returned as-is)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .config import GraphSpec, write_config
from .errors import ConfigError, ContractError
from .observations import ObservationConfig
from .rng import RngStreams
from .topology import GraphShape, count_decision_states, count_wait_states, rank_to_path

CURRICULUM_MODES = ("reward", "images", "depth")


@dataclass(frozen=True)
class TaskSpec:
    """Goal decision sequence plus reward parameters."""

    goal: tuple[int, ...]
    mode: str = "needle"
    high_r: float = 1.0
    fail_r: float = 0.0
    std_r: float = 0.0

    def validate(self, shape: GraphShape) -> None:
        if len(self.goal) != shape.depth:
            raise ConfigError(
                f"goal length {len(self.goal)} != depth {shape.depth}")
        if any(not 1 <= g <= shape.branching for g in self.goal):
            raise ConfigError(f"goal entries must be in 1..{shape.branching}")
        if self.mode == "stochastic" and self.std_r < 0:
            raise ConfigError("std_r must be >= 0")


def draw_task(shape: GraphShape, streams: RngStreams, *, mode: str = "needle",
              high_r: float = 1.0, fail_r: float = 0.0,
              std_r: float = 0.0) -> TaskSpec:
    """Draw a goal leaf uniformly among the b**d leaves."""
    goal = tuple(int(a) for a in
                 streams.task_gen.integers(1, shape.branching + 1, size=shape.depth))
    return TaskSpec(goal=goal, mode=mode, high_r=high_r, fail_r=fail_r, std_r=std_r)


def task_from_spec(spec: GraphSpec, streams: RngStreams) -> TaskSpec:
    """Resolve the task of a spec: pinned goal if present, otherwise a
    seed-deterministic draw from the task_gen stream."""
    r = spec.reward
    if r.goal is not None:
        task = TaskSpec(goal=r.goal, mode=r.mode, high_r=r.high_r,
                        fail_r=r.fail_r, std_r=r.std_r)
        task.validate(spec.shape)
        return task
    return draw_task(spec.shape, streams, mode=r.mode, high_r=r.high_r,
                     fail_r=r.fail_r, std_r=r.std_r)


def _check_trace(task: TaskSpec, trace: Sequence[int]) -> tuple[int, ...]:
    trace = tuple(trace)
    if len(trace) != len(task.goal):
        raise ContractError(
            f"decision trace has {len(trace)} entries, goal needs {len(task.goal)}")
    return trace


def needle_reward(task: TaskSpec, trace: Sequence[int]) -> float:
    """high_r on the exact goal trace, 0 on every other leaf."""
    return task.high_r if _check_trace(task, trace) == task.goal else 0.0


def gradient_match(task: TaskSpec, trace: Sequence[int], shape: GraphShape) -> float:
    """The match coefficient c in [0, 1]; 1 iff trace == goal."""
    trace = _check_trace(task, trace)
    b, d = shape.branching, shape.depth
    deviation = 0
    weight = b ** (d - 1)
    for g, t in zip(task.goal, trace):
        deviation += abs(g - t) * weight
        weight //= b
    return 1.0 - deviation / (b ** d - 1)


def gradient_reward(task: TaskSpec, trace: Sequence[int], shape: GraphShape) -> float:
    return task.high_r * gradient_match(task, trace, shape)


def stochastic_reward(task: TaskSpec, trace: Sequence[int], shape: GraphShape,
                      streams: RngStreams) -> float:
    """Gaussian draw around the gradient value; the left tail is kept, so
    negative rewards can occur near low-match leaves."""
    mean = gradient_reward(task, trace, shape)
    return float(streams.reward_noise.normal(mean, task.std_r))


def end_reward(task: TaskSpec, trace: Sequence[int], shape: GraphShape,
               streams: RngStreams) -> float:
    """Dispatch on the task's reward mode; called on transitions into a leaf."""
    if task.mode == "needle":
        return needle_reward(task, trace)
    if task.mode == "gradient":
        return gradient_reward(task, trace, shape)
    if task.mode == "stochastic":
        return stochastic_reward(task, trace, shape, streams)
    raise ConfigError(f"unknown reward mode {task.mode!r}")


@dataclass(frozen=True)
class CurriculumTask:
    spec: GraphSpec
    task: TaskSpec


def _goal_from_rank(rank: int, shape: GraphShape) -> tuple[int, ...]:
    return rank_to_path(rank, shape.depth, shape.branching)


def _pin_goal(spec: GraphSpec, goal: tuple[int, ...]) -> GraphSpec:
    return replace(spec, reward=replace(spec.reward, goal=goal))


def _widen_obs_for_depth(obs: ObservationConfig, shape: GraphShape) -> ObservationConfig:
    """Grow id ranges so MDP flags stay satisfiable on a deeper graph."""
    changed = {}
    if obs.mdp_d:
        need = count_decision_states(shape)
        lo = obs.d_ids[0]
        if obs.d_ids[1] - lo + 1 < need:
            changed["d_ids"] = (lo, lo + need - 1)
    if obs.mdp_w:
        need = count_wait_states(shape)
        lo = max(obs.w_ids[0], changed.get("d_ids", obs.d_ids)[1] + 1)
        if obs.w_ids[1] - lo + 1 < need or lo != obs.w_ids[0]:
            changed["w_ids"] = (lo, lo + need - 1)
    if changed:
        top = max(changed.get("d_ids", obs.d_ids)[1],
                  changed.get("w_ids", obs.w_ids)[1],
                  obs.e_ids[1], obs.h_ids[1])
        changed["nr_images"] = max(obs.nr_images, top + 1)
        obs = replace(obs, **changed)
    return obs


def make_curriculum(base: GraphSpec, mode: str, k: int, streams: RngStreams,
                    *, aligned_goals: bool = False) -> list[CurriculumTask]:
    """Generate ``k`` related tasks from a base configuration.

    reward: same graph, k distinct goal leaves (without replacement) —
            pairwise adversarial under the needle reward.
    images: same graph and goal, k distinct image-set seeds.
    depth:  depths d, d+1, ..., d+k-1; with ``aligned_goals`` each
            shallower goal is a prefix of the next deeper one.
    """
    if mode not in CURRICULUM_MODES:
        raise ConfigError(f"curriculum mode must be one of {CURRICULUM_MODES}, got {mode!r}")
    if k < 1:
        raise ConfigError(f"need at least one task, got k={k}")
    rng = streams.task_gen
    base = base.validate()
    shape = base.shape
    tasks: list[CurriculumTask] = []

    if mode == "reward":
        n_ends = shape.branching ** shape.depth
        if k > n_ends:
            raise ConfigError(
                f"reward variation supports at most b**d = {n_ends} tasks, got k={k}")
        picked: list[int] = []
        seen: set[int] = set()
        while len(picked) < k:
            rank = int(rng.integers(0, n_ends))
            if rank not in seen:
                seen.add(rank)
                picked.append(rank)
        for rank in picked:
            goal = _goal_from_rank(rank, shape)
            spec = _pin_goal(base, goal)
            tasks.append(CurriculumTask(spec, task_from_spec(spec, streams)))
        return tasks

    if mode == "images":
        seeds: list[int] = []
        seen_seeds: set[int] = set()
        while len(seeds) < k:
            seed = int(rng.integers(0, 2**31 - 1))
            if seed not in seen_seeds:
                seen_seeds.add(seed)
                seeds.append(seed)
        goal = base.reward.goal or draw_task(shape, streams).goal
        for seed in seeds:
            spec = _pin_goal(replace(base, obs=replace(base.obs, image_seed=seed)), goal)
            tasks.append(CurriculumTask(spec, task_from_spec(spec, streams)))
        return tasks

    # depth variation
    depths = [shape.depth + i for i in range(k)]
    deepest = GraphShape(shape.branching, depths[-1], shape.wait_prob)
    deep_goal = tuple(int(a) for a in
                      rng.integers(1, shape.branching + 1, size=deepest.depth))
    for depth in depths:
        task_shape = GraphShape(shape.branching, depth, shape.wait_prob)
        goal = deep_goal[:depth] if aligned_goals else tuple(
            int(a) for a in rng.integers(1, shape.branching + 1, size=depth))
        obs = _widen_obs_for_depth(base.obs, task_shape)
        spec = _pin_goal(replace(base, shape=task_shape, obs=obs), goal)
        tasks.append(CurriculumTask(spec.validate(), task_from_spec(spec, streams)))
    return tasks


def write_curriculum(tasks: Sequence[CurriculumTask], out_dir: str | Path,
                     mode: str = "") -> Path:
    """One JSON config per task plus a manifest with the task order and
    goal sequences."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, item in enumerate(tasks):
        name = f"task_{i:03d}.json"
        write_config(item.spec, out / name)
        entries.append({
            "order": i,
            "file": name,
            "goal": list(item.task.goal),
            "depth": item.spec.shape.depth,
            "image_seed": item.spec.obs.image_seed,
            "reward_mode": item.task.mode,
        })
    manifest = out / "manifest.json"
    manifest.write_text(json.dumps({"mode": mode, "tasks": entries}, indent=2) + "\n")
    return manifest
