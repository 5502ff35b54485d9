import pytest

from ctgraph import (
    ConfigError,
    GraphShape,
    StateId,
    StateKind,
    count_decision_states,
    count_end_states,
    count_states,
    count_wait_states,
    decode_state,
    encode_state,
    enumerate_states,
)


@pytest.mark.parametrize("b,d,expected", [
    (2, 2, 16),
    (3, 10, 177148),
    (2, 1, 8),
    (3, 2, 28),
    (2, 4, 64),
    (2, 16, 262144),
])
def test_count_states(b, d, expected):
    assert count_states(GraphShape(b, d)) == expected


@pytest.mark.parametrize("b,d,expected", [
    (2, 4, 16),
    (3, 10, 59049),
    (2, 1, 2),
    (2, 16, 65536),
])
def test_count_end_states(b, d, expected):
    assert count_end_states(GraphShape(b, d)) == expected


def test_layer_counts_smallest_baseline():
    # depth-2 binary graph: 3 decision states, 7 wait states, 4 leaves
    shape = GraphShape(2, 2)
    assert count_decision_states(shape) == 3
    assert count_wait_states(shape) == 7
    assert count_end_states(shape) == 4


def test_enumerate_unit_graph_exact_order():
    shape = GraphShape(2, 1)
    got = list(enumerate_states(shape))
    expected = [
        StateId(StateKind.HOME),
        StateId(StateKind.WAIT, 0, ()),
        StateId(StateKind.DECISION, 0, ()),
        StateId(StateKind.WAIT, 1, (1,)),
        StateId(StateKind.WAIT, 1, (2,)),
        StateId(StateKind.END, 1, (1,)),
        StateId(StateKind.END, 1, (2,)),
        StateId(StateKind.FAIL),
    ]
    assert got == expected


@pytest.mark.parametrize("b,d", [(2, 1), (2, 2), (2, 5), (3, 1), (3, 4), (4, 3)])
def test_enumeration_matches_count_and_is_duplicate_free(b, d):
    shape = GraphShape(b, d)
    states = list(enumerate_states(shape))
    assert len(states) == count_states(shape)
    assert len(set(states)) == len(states)


def test_end_states_cover_all_paths():
    shape = GraphShape(2, 3)
    ends = [s for s in enumerate_states(shape) if s.kind is StateKind.END]
    assert len(ends) == 8
    assert all(len(s.path) == 3 for s in ends)
    assert all(1 <= c <= 2 for s in ends for c in s.path)
    assert len({s.path for s in ends}) == 8


@pytest.mark.parametrize("b,d", [(2, 1), (2, 3), (3, 2), (3, 3)])
def test_encode_decode_round_trip(b, d):
    shape = GraphShape(b, d)
    for index, state in enumerate(enumerate_states(shape)):
        assert encode_state(state, shape) == index
        assert decode_state(index, shape) == state


def test_decode_rejects_out_of_range():
    shape = GraphShape(2, 1)
    with pytest.raises(ConfigError):
        decode_state(8, shape)
    with pytest.raises(ConfigError):
        decode_state(-1, shape)


@pytest.mark.parametrize("kwargs", [
    dict(branching=1, depth=2),
    dict(branching=2, depth=0),
    dict(branching=2, depth=2, wait_prob=1.0),
    dict(branching=2, depth=2, wait_prob=1.2),
    dict(branching=2, depth=2, wait_prob=-0.1),
])
def test_shape_invariants_rejected(kwargs):
    with pytest.raises(ConfigError):
        GraphShape(**kwargs)


def test_count_overflow_is_explicit():
    with pytest.raises(OverflowError):
        count_states(GraphShape(3, 50))
    with pytest.raises(OverflowError):
        count_end_states(GraphShape(2, 80))


def test_enumerate_budget_exceeded():
    shape = GraphShape(2, 10)
    with pytest.raises(ConfigError, match="budget"):
        list(enumerate_states(shape, max_states=100))


def test_state_validate():
    shape = GraphShape(2, 2)
    StateId(StateKind.WAIT, 1, (2,)).validate(shape)
    StateId(StateKind.END, 2, (1, 2)).validate(shape)
    with pytest.raises(ConfigError):
        StateId(StateKind.WAIT, 1, (3,)).validate(shape)
    with pytest.raises(ConfigError):
        StateId(StateKind.END, 1, (1,)).validate(shape)
    with pytest.raises(ConfigError):
        StateId(StateKind.HOME, 1, (1,)).validate(shape)
