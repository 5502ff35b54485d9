import numpy as np
import pytest

from ctgraph import RngStreams, STREAM_NAMES


def test_same_seed_reproduces_every_stream():
    a = RngStreams.from_seed(123)
    b = RngStreams.from_seed(123)
    for name in STREAM_NAMES:
        assert a.stream(name).random() == b.stream(name).random()


def test_streams_are_mutually_distinct():
    streams = RngStreams.from_seed(7)
    draws = [streams.stream(name).random() for name in STREAM_NAMES]
    assert len(set(draws)) == len(draws)


def test_single_matches_bundle():
    bundle = RngStreams.from_seed(99)
    for name in STREAM_NAMES:
        solo = RngStreams.single(99, name)
        assert solo.random() == bundle.stream(name).random()


def test_different_seeds_differ():
    a = RngStreams.from_seed(1).dynamics.random(4)
    b = RngStreams.from_seed(2).dynamics.random(4)
    assert not np.allclose(a, b)


def test_unknown_stream_name():
    streams = RngStreams.from_seed(0)
    with pytest.raises(KeyError):
        streams.stream("nope")
