"""Reference policies and a tabular Q-learning baseline.

The policy ladder:

  random      uniform over all b+1 actions; almost always dies in a wait
              state before reaching a leaf
  navigation  waits correctly and picks branches uniformly, so it reaches
              some leaf every episode and the goal leaf once per b**d
  optimal     navigation plus the goal branch at every decision

The oracles read the debug state kind, not the observation: they exist as
measurement instruments, so bypassing partial observability is the point.
The Q-learner, by contrast, keys its table on the observation class id,
which is exactly what makes it collapse on aliased (surjective) graphs.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .config import GraphSpec
from .dynamics import CtGraphEnv, StepView
from .errors import ContractError
from .rewards import TaskSpec
from .rng import RngStreams
from .topology import StateKind

TERMINAL = (StateKind.END, StateKind.FAIL)


def act_random(observation, branching: int, streams: RngStreams) -> int:
    """Uniform over 0..b; the observation is ignored."""
    return int(streams.policy.integers(0, branching + 1))


def act_navigation(state_kind: StateKind, branching: int, streams: RngStreams) -> int:
    """Wait action everywhere except decisions, where a branch is drawn
    uniformly.  Never fails."""
    if state_kind in TERMINAL:
        raise ContractError("navigation policy queried at a terminal state")
    if state_kind is StateKind.DECISION:
        return int(streams.policy.integers(1, branching + 1))
    return 0


def act_optimal(state_kind: StateKind, decision_index: int, task: TaskSpec) -> int:
    """Wait everywhere; at the i-th decision on the path, take the i-th
    goal branch."""
    if state_kind in TERMINAL:
        raise ContractError("optimal policy queried at a terminal state")
    if state_kind is StateKind.DECISION:
        if decision_index >= len(task.goal):
            raise ContractError(
                f"decision index {decision_index} beyond goal length {len(task.goal)}")
        return task.goal[decision_index]
    return 0


Policy = Callable[[StepView], int]


def random_policy(branching: int, streams: RngStreams) -> Policy:
    def act(view: StepView) -> int:
        return act_random(view.obs_class, branching, streams)
    return act


def navigation_policy(branching: int, streams: RngStreams) -> Policy:
    def act(view: StepView) -> int:
        return act_navigation(view.kind, branching, streams)
    return act


def optimal_policy(task: TaskSpec) -> Policy:
    def act(view: StepView) -> int:
        return act_optimal(view.kind, view.decision_index, task)
    return act


def scripted_policy(actions: list[int]) -> Policy:
    """Replay a fixed action list; raises if the episode outlives it."""
    it = iter(actions)

    def act(view: StepView) -> int:
        try:
            return next(it)
        except StopIteration:
            raise ContractError("action script exhausted before the episode ended")
    return act


# ---------------------------------------------------------------------------
# tabular Q-learning

@dataclass(frozen=True)
class QLearningParams:
    """Textbook settings; the epsilon schedule is piecewise linear, from
    eps_start to eps_mid over the first mid_frac of episodes, then down to
    eps_end by the last episode (so late-training returns reflect the
    learned policy rather than residual exploration)."""

    alpha: float = 0.1
    gamma: float = 0.95
    eps_start: float = 1.0
    eps_mid: float = 0.05
    eps_end: float = 0.0
    mid_frac: float = 0.5


def epsilon_at(episode: int, total: int, params: QLearningParams) -> float:
    if total <= 1:
        return params.eps_end
    split = max(1, int(total * params.mid_frac))
    if episode < split:
        frac = episode / split
        return params.eps_start + (params.eps_mid - params.eps_start) * frac
    frac = (episode - split) / max(1, total - split)
    return params.eps_mid + (params.eps_end - params.eps_mid) * frac


@dataclass
class QLearnResult:
    q_table: dict[int, list[float]]
    returns: list[float]
    epsilons: list[float]
    partially_observable: bool


def q_learn(spec: GraphSpec, episodes: int,
            params: QLearningParams | None = None,
            streams: RngStreams | None = None,
            task: TaskSpec | None = None) -> QLearnResult:
    """Train an epsilon-greedy tabular Q-learner keyed on observation
    class ids.

    Converges on fully observable configs (MDP_D and MDP_W), where the
    class id identifies the state.  Allowed but flagged on partially
    observable configs: aliased decision states share one table row, so
    goals needing different branches at them are unreachable.
    """
    params = params or QLearningParams()
    streams = streams if streams is not None else RngStreams.from_seed(spec.seed)
    env = CtGraphEnv(spec, streams=streams, render_payloads=False)
    if task is not None:
        env.model = replace(env.model, task=task)

    partially_observable = not (spec.obs.mdp_d and spec.obs.mdp_w)
    if partially_observable:
        warnings.warn("Q-learning on a partially observable config: "
                      "convergence is not expected", stacklevel=2)

    n_actions = env.n_actions
    pol = streams.policy
    alpha, gamma = params.alpha, params.gamma
    q: dict[int, list[float]] = {}
    returns: list[float] = []
    epsilons: list[float] = []

    def row(cls: int) -> list[float]:
        r = q.get(cls)
        if r is None:
            r = q[cls] = [0.0] * n_actions
        return r

    def greedy(r: list[float]) -> int:
        best = max(r)
        ties = [i for i, v in enumerate(r) if v == best]
        if len(ties) == 1:
            return ties[0]
        return ties[int(pol.integers(0, len(ties)))]

    for ep in range(episodes):
        eps = epsilon_at(ep, episodes, params)
        obs = env.reset()
        cls = obs.class_id
        total = 0.0
        done = False
        while not done:
            if eps > 0.0 and pol.random() < eps:
                action = int(pol.integers(0, n_actions))
            else:
                action = greedy(row(cls))
            obs, reward, done, _ = env.step(action)
            nxt = obs.class_id
            r = row(cls)
            target = reward if done else reward + gamma * max(row(nxt))
            r[action] += alpha * (target - r[action])
            cls = nxt
            total += reward
        returns.append(total)
        epsilons.append(eps)
    return QLearnResult(q_table=q, returns=returns, epsilons=epsilons,
                        partially_observable=partially_observable)


def write_learning_curve(path: str | Path, result: QLearnResult) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "return", "epsilon"])
        for i, (ret, eps) in enumerate(zip(result.returns, result.epsilons)):
            writer.writerow([i, repr(ret), f"{eps:.6f}"])
    return path


def final_mean_return(result: QLearnResult, window: int = 100) -> float:
    tail = result.returns[-window:]
    return float(np.mean(tail)) if tail else 0.0
