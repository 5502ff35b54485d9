"""Episode engine: transitions over the tree, wait-state stochasticity,
termination, and the deterministic draw discipline.

Transition rules, by the kind of the current state:

  home      any action moves to the root wait state
  wait      action 0 escapes with probability 1 - p (stays put otherwise);
            any other action fails the episode
  decision  action k in 1..b takes branch k; action 0 fails the episode
  end/fail  terminal; stepping raises

Rewards: the transition into a leaf pays the task reward as a function of
the branch choices taken; the transition into fail pays ``fail_r``; every
other transition pays 0.

Draw order within one step is fixed: (1) wait-escape draw from the
``dynamics`` stream (only at a wait state, with action 0 and p > 0),
(2) reward draw from ``reward_noise`` (stochastic mode, leaf transitions
only), (3) class draw for the arrived state from ``obs_choice``,
(4) payload augmentation from ``obs_augment`` when rendering.  Because
every concern has its own stream, skipping payload rendering never shifts
the dynamics.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, NamedTuple

from .config import GraphSpec
from .errors import ContractError, EpisodeDoneError, InvalidActionError
from .observations import (
    Observation,
    ObservationConfig,
    class_for_parts,
    render,
)
from .rewards import TaskSpec, end_reward, task_from_spec
from .rng import RngStreams
from .topology import (
    GraphShape,
    HOME_STATE,
    StateId,
    StateKind,
    count_states,
)

DEFAULT_STEP_CAP = 1_000_000

_HOME = StateKind.HOME
_WAIT = StateKind.WAIT
_DECISION = StateKind.DECISION
_END = StateKind.END
_FAIL = StateKind.FAIL


@dataclass(frozen=True)
class EnvCursor:
    """Position in the tree plus the episode step counter."""

    state: StateId
    step_count: int = 0
    done: bool = False


@dataclass(frozen=True)
class EnvModel:
    """A spec with its task resolved; everything reset/step needs."""

    spec: GraphSpec
    task: TaskSpec

    @property
    def shape(self) -> GraphShape:
        return self.spec.shape

    @property
    def obs(self) -> ObservationConfig:
        return self.spec.obs

    @property
    def n_actions(self) -> int:
        return self.spec.shape.branching + 1

    @property
    def n_states(self) -> int:
        return count_states(self.spec.shape)


def build_model(spec: GraphSpec, streams: RngStreams) -> EnvModel:
    """Validate the spec and resolve its task (drawing the goal from the
    task_gen stream when the config does not pin one)."""
    spec = spec.validate()
    return EnvModel(spec=spec, task=task_from_spec(spec, streams))


class StepView(NamedTuple):
    """What a policy sees before acting: the debug state identity, the
    observation class id, and (optionally) the rendered payload."""

    kind: StateKind
    depth: int
    path: tuple[int, ...]
    obs_class: int
    payload: object = None

    @property
    def decision_index(self) -> int:
        return len(self.path)


class TranscriptRecord(NamedTuple):
    step: int
    kind: StateKind
    depth: int
    path: tuple[int, ...]
    obs_class: int
    action: int
    reward: float
    done: bool


@dataclass
class EpisodeTranscript:
    """One record per step: the state acted from, the class it showed, the
    action, and the reward/done produced by that step.  The class id of
    the terminal state reached is kept separately (it belongs to no step)."""

    records: list[TranscriptRecord]
    truncated: bool
    final_state: StateId
    final_obs_class: int

    @property
    def length(self) -> int:
        return len(self.records)

    @property
    def total_reward(self) -> float:
        return sum(r.reward for r in self.records)

    @property
    def decision_trace(self) -> tuple[int, ...]:
        return tuple(r.action for r in self.records if r.kind is _DECISION)


def advance(kind: StateKind, depth: int, path: tuple[int, ...], action: int,
            shape: GraphShape, dyn_rng) -> tuple[StateKind, int, tuple[int, ...], bool, bool]:
    """Apply one transition; returns (kind, depth, path, entered_end, failed).

    The caller must have validated the action range.  Consumes one draw
    from ``dyn_rng`` only for a wait-state action 0 with p > 0.
    """
    if kind is _WAIT:
        if action != 0:
            return _FAIL, 0, (), False, True
        p = shape.wait_prob
        if p > 0.0 and dyn_rng.random() < p:
            return _WAIT, depth, path, False, False
        if depth == shape.depth:
            return _END, depth, path, True, False
        return _DECISION, depth, path, False, False
    if kind is _DECISION:
        if action == 0:
            return _FAIL, 0, (), False, True
        return _WAIT, depth + 1, path + (action,), False, False
    if kind is _HOME:
        return _WAIT, 0, (), False, False
    raise EpisodeDoneError(f"cannot step from terminal state kind {kind.label}")


def reset(model: EnvModel, streams: RngStreams,
          render_payload: bool = True) -> tuple[EnvCursor, Observation]:
    """Start an episode at the home state.  Streams are not reseeded, so
    consecutive episodes continue the same deterministic draw sequence."""
    cursor = EnvCursor(state=HOME_STATE, step_count=0, done=False)
    cls = class_for_parts(_HOME, 0, (), model.obs, model.shape, streams.obs_choice)
    obs = (render(cls, model.obs, streams, state=HOME_STATE, shape=model.shape)
           if render_payload else Observation(class_id=cls))
    return cursor, obs


def step(cursor: EnvCursor, action: int, model: EnvModel, streams: RngStreams,
         render_payload: bool = True) -> tuple[EnvCursor, Observation, float, bool]:
    """Apply one action; returns (cursor, observation of the arrived state,
    reward, done)."""
    if cursor.done:
        raise EpisodeDoneError("step() after the episode terminated; call reset()")
    b = model.shape.branching
    if not isinstance(action, int) or not 0 <= action <= b:
        raise InvalidActionError(f"action must be an integer in 0..{b}, got {action!r}")
    state = cursor.state
    kind, depth, path, entered_end, failed = advance(
        state.kind, state.depth, state.path, action, model.shape, streams.dynamics)
    if entered_end:
        reward = end_reward(model.task, path, model.shape, streams)
    elif failed:
        reward = model.task.fail_r
    else:
        reward = 0.0
    done = entered_end or failed
    new_state = StateId(kind, depth, path)
    cls = class_for_parts(kind, depth, path, model.obs, model.shape, streams.obs_choice)
    obs = (render(cls, model.obs, streams, state=new_state, shape=model.shape)
           if render_payload else Observation(class_id=cls))
    return (EnvCursor(state=new_state, step_count=cursor.step_count + 1, done=done),
            obs, reward, done)


def run_episode(policy: Callable[[StepView], int], model: EnvModel,
                streams: RngStreams, *, step_cap: int = DEFAULT_STEP_CAP,
                render_payloads: bool = False) -> EpisodeTranscript:
    """Roll one episode under ``policy`` and return the full transcript.

    Payload rendering is off by default (reference policies act on the
    debug state or the class id); the ``obs_augment`` stream is the only
    one affected by the flag, so transcripts are identical either way.

    Episodes longer than ``step_cap`` are cut and flagged as truncated
    rather than silently terminated.
    """
    shape = model.shape
    obs_cfg = model.obs
    b = shape.branching
    dyn_rng = streams.dynamics
    obs_rng = streams.obs_choice

    kind, depth, path = _HOME, 0, ()
    obs_class = class_for_parts(kind, depth, path, obs_cfg, shape, obs_rng)
    records: list[TranscriptRecord] = []
    step_i = 0
    truncated = False
    while True:
        if step_i >= step_cap:
            truncated = True
            break
        payload = None
        if render_payloads:
            obs = render(obs_class, obs_cfg, streams,
                         state=StateId(kind, depth, path), shape=shape)
            payload = obs.payload
        action = policy(StepView(kind, depth, path, obs_class, payload))
        if not isinstance(action, int) or not 0 <= action <= b:
            raise InvalidActionError(
                f"policy returned {action!r}, need an integer in 0..{b}")
        step_i += 1
        nkind, ndepth, npath, entered_end, failed = advance(
            kind, depth, path, action, shape, dyn_rng)
        if entered_end:
            reward = end_reward(model.task, npath, shape, streams)
        elif failed:
            reward = model.task.fail_r
        else:
            reward = 0.0
        done = entered_end or failed
        records.append(TranscriptRecord(
            step_i, kind, depth, path, obs_class, action, reward, done))
        kind, depth, path = nkind, ndepth, npath
        obs_class = class_for_parts(kind, depth, path, obs_cfg, shape, obs_rng)
        if done:
            break
    return EpisodeTranscript(records=records, truncated=truncated,
                             final_state=StateId(kind, depth, path),
                             final_obs_class=obs_class)


TRANSCRIPT_COLUMNS = ("step", "state_kind", "depth", "path", "obs_class",
                      "action", "reward", "done")


def format_transcripts_csv(transcripts: Iterable[EpisodeTranscript]) -> str:
    """Render transcripts as CSV text; episodes are concatenated and
    delimited by their done=1 rows (step restarts at 1)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRANSCRIPT_COLUMNS)
    for transcript in transcripts:
        for rec in transcript.records:
            writer.writerow([
                rec.step,
                rec.kind.label,
                rec.depth,
                "-".join(str(c) for c in rec.path),
                rec.obs_class,
                rec.action,
                repr(rec.reward),
                int(rec.done),
            ])
    return buf.getvalue()


def write_transcripts_csv(path: str | Path,
                          transcripts: Iterable[EpisodeTranscript]) -> Path:
    path = Path(path)
    path.write_text(format_transcripts_csv(transcripts))
    return path


class CtGraphEnv:
    """Stateful convenience wrapper over the functional engine.

    One instance owns one cursor and one set of streams; it is meant to be
    used from a single thread.  Independent instances share nothing.
    """

    def __init__(self, spec: GraphSpec, streams: RngStreams | None = None,
                 render_payloads: bool = True):
        self.streams = streams if streams is not None else RngStreams.from_seed(spec.seed)
        self.model = build_model(spec, self.streams)
        self.render_payloads = render_payloads
        self.cursor: EnvCursor | None = None
        self.last_obs_class: int | None = None

    @property
    def n_actions(self) -> int:
        return self.model.n_actions

    @property
    def task(self) -> TaskSpec:
        return self.model.task

    def reset(self) -> Observation:
        self.cursor, obs = reset(self.model, self.streams,
                                 render_payload=self.render_payloads)
        self.last_obs_class = obs.class_id
        return obs

    def step(self, action: int) -> tuple[Observation, float, bool, dict]:
        if self.cursor is None:
            raise ContractError("call reset() before step()")
        self.cursor, obs, reward, done = step(
            self.cursor, action, self.model, self.streams,
            render_payload=self.render_payloads)
        self.last_obs_class = obs.class_id
        state = self.cursor.state
        info = {"state_kind": state.kind.label, "depth": state.depth,
                "path": state.path, "obs_class": obs.class_id}
        return obs, reward, done, info
