"""Tree structure, canonical state identities, and state counting.

A graph of depth ``d`` and branching ``b`` is a tree of alternating wait
and decision layers.  Layer ``x`` holds ``b**x`` wait states (one in front
of each decision state, plus one in front of each leaf at the last layer)
and, for ``x < d``, ``b**x`` decision states.  Leaves ("end" states) sit
below the last wait layer; a single home state roots the tree and a single
fail state absorbs every wrong move.  Everything here is pure data and
pure functions; no dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator, Sequence

from .errors import ConfigError

INT64_MAX = 2**63 - 1


class StateKind(IntEnum):
    HOME = 0
    WAIT = 1
    DECISION = 2
    END = 3
    FAIL = 4

    @property
    def label(self) -> str:
        return self.name.lower()


TERMINAL_KINDS = (StateKind.END, StateKind.FAIL)


@dataclass(frozen=True)
class GraphShape:
    """Structural parameters of the tree.

    branching:  choices at a decision state, >= 2
    depth:      decision layers between home and a leaf, >= 1
    wait_prob:  probability of staying in a wait state per step, in [0, 1)
    """

    branching: int
    depth: int
    wait_prob: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.branching, int) or self.branching < 2:
            raise ConfigError(
                f"graph_shape.b must be an integer >= 2, got {self.branching!r}")
        if not isinstance(self.depth, int) or self.depth < 1:
            raise ConfigError(
                f"graph_shape.d must be an integer >= 1, got {self.depth!r}")
        if not 0.0 <= self.wait_prob < 1.0:
            raise ConfigError(
                f"graph_shape.p must satisfy 0 <= p < 1, got {self.wait_prob!r}")


@dataclass(frozen=True)
class StateId:
    """Canonical identity of a node: kind, 0-based layer, branch path.

    The path is the sequence of branch choices (each in 1..b) taken from the
    root; its length equals the layer for wait/decision states, the full
    depth for end states, and zero for home and fail.
    """

    kind: StateKind
    depth: int = 0
    path: tuple[int, ...] = ()

    def validate(self, shape: GraphShape) -> None:
        b, d = shape.branching, shape.depth
        if any(not 1 <= c <= b for c in self.path):
            raise ConfigError(f"path entries must be in 1..{b}: {self.path}")
        k = self.kind
        if k in (StateKind.HOME, StateKind.FAIL):
            if self.depth != 0 or self.path:
                raise ConfigError(f"{k.label} state must have depth 0 and empty path")
        elif k is StateKind.WAIT:
            if not 0 <= self.depth <= d or len(self.path) != self.depth:
                raise ConfigError(f"bad wait state {self}")
        elif k is StateKind.DECISION:
            if not 0 <= self.depth <= d - 1 or len(self.path) != self.depth:
                raise ConfigError(f"bad decision state {self}")
        else:  # END
            if self.depth != d or len(self.path) != d:
                raise ConfigError(f"end state path must have length {d}: {self}")


HOME_STATE = StateId(StateKind.HOME)
FAIL_STATE = StateId(StateKind.FAIL)


def _layer_sum(b: int, upto: int) -> int:
    # sum_{x=0}^{upto} b**x
    return (b ** (upto + 1) - 1) // (b - 1)


def count_wait_states(shape: GraphShape) -> int:
    return _layer_sum(shape.branching, shape.depth)


def count_decision_states(shape: GraphShape) -> int:
    return _layer_sum(shape.branching, shape.depth - 1)


def count_end_states(shape: GraphShape) -> int:
    n = shape.branching ** shape.depth
    if n > INT64_MAX:
        raise OverflowError(
            f"end-state count b**d = {shape.branching}**{shape.depth} exceeds int64")
    return n


def count_states(shape: GraphShape) -> int:
    """Total number of states: waits + decisions + ends + home + fail,
    which collapses to 2 * sum_{x=0}^{d} b**x + 2."""
    n = 2 * _layer_sum(shape.branching, shape.depth) + 2
    if n > INT64_MAX:
        raise OverflowError(
            f"state count for b={shape.branching}, d={shape.depth} exceeds int64")
    return n


def path_rank(path: Sequence[int], b: int) -> int:
    """Rank of a branch path among all paths of its length, base-b digits,
    most significant first."""
    r = 0
    for c in path:
        r = r * b + (c - 1)
    return r


def rank_to_path(rank: int, length: int, b: int) -> tuple[int, ...]:
    digits = []
    for _ in range(length):
        rank, rem = divmod(rank, b)
        digits.append(rem + 1)
    return tuple(reversed(digits))


def _block_start(b: int, x: int) -> int:
    # index of the first wait state of layer x in canonical order
    if x == 0:
        return 1
    return 1 + 2 * _layer_sum(b, x - 1)


def encode_state(state: StateId, shape: GraphShape) -> int:
    """Canonical integer index of a state (home first, then layer by layer
    waits before decisions, ends after the last wait layer, fail last).

    Only needed by tabular agents and enumeration; cursors never use it.
    """
    b, d = shape.branching, shape.depth
    k = state.kind
    if k is StateKind.HOME:
        return 0
    if k is StateKind.FAIL:
        return count_states(shape) - 1
    base = _block_start(b, state.depth)
    r = path_rank(state.path, b)
    if k is StateKind.WAIT:
        return base + r
    if k is StateKind.DECISION:
        return base + b ** state.depth + r
    # END: placed after the layer-d waits
    return _block_start(b, d) + b ** d + r


def decode_state(index: int, shape: GraphShape) -> StateId:
    """Inverse of :func:`encode_state`."""
    b, d = shape.branching, shape.depth
    total = count_states(shape)
    if not 0 <= index < total:
        raise ConfigError(f"state index {index} out of range [0, {total})")
    if index == 0:
        return HOME_STATE
    if index == total - 1:
        return FAIL_STATE
    for x in range(d + 1):
        base = _block_start(b, x)
        layer = b ** x
        if index < base + layer:
            return StateId(StateKind.WAIT, x, rank_to_path(index - base, x, b))
        if x < d and index < base + 2 * layer:
            return StateId(StateKind.DECISION, x, rank_to_path(index - base - layer, x, b))
        if x == d:
            return StateId(StateKind.END, d, rank_to_path(index - base - layer, d, b))
    raise AssertionError("unreachable")


def enumerate_states(shape: GraphShape, max_states: int | None = None) -> Iterator[StateId]:
    """Yield every state exactly once, in canonical index order.

    Lazy; nothing is materialized, so arbitrarily large graphs can be
    streamed.  If ``max_states`` is given and the graph exceeds it, raise
    before yielding anything.
    """
    total = count_states(shape)
    if max_states is not None and total > max_states:
        raise ConfigError(
            f"graph has {total} states, over the caller budget of {max_states}")
    b, d = shape.branching, shape.depth
    yield HOME_STATE
    for x in range(d + 1):
        layer = b ** x
        for r in range(layer):
            yield StateId(StateKind.WAIT, x, rank_to_path(r, x, b))
        if x < d:
            for r in range(layer):
                yield StateId(StateKind.DECISION, x, rank_to_path(r, x, b))
        else:
            for r in range(layer):
                yield StateId(StateKind.END, d, rank_to_path(r, d, b))
    yield FAIL_STATE


def wait_rank(depth: int, path: Sequence[int], b: int) -> int:
    """Position of a wait state among all wait states, layer-major."""
    return (_layer_sum(b, depth - 1) if depth > 0 else 0) + path_rank(path, b)


def decision_rank(depth: int, path: Sequence[int], b: int) -> int:
    """Position of a decision state among all decision states, layer-major."""
    return (_layer_sum(b, depth - 1) if depth > 0 else 0) + path_rank(path, b)
