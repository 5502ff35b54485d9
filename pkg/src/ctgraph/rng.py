"""Named, independent random substreams derived from one master seed.

Each concern of the simulation owns its own PCG64 stream so that, e.g.,
turning observation noise on or off never shifts the transition draws.
Streams are spawned from ``numpy.random.SeedSequence``, which guarantees
pairwise independence and reproducibility from (master seed, stream name).
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

# Fixed order: the spawn index of each stream is its position here.
STREAM_NAMES = (
    "dynamics",      # wait-state escape draws
    "obs_choice",    # which class a state shows this step
    "obs_augment",   # per-read rotation and pixel noise
    "reward_noise",  # gaussian reward sampling
    "task_gen",      # goal sequences, curriculum draws
    "policy",        # action draws of stochastic reference policies
)


@dataclass
class RngStreams:
    master_seed: int
    dynamics: np.random.Generator
    obs_choice: np.random.Generator
    obs_augment: np.random.Generator
    reward_noise: np.random.Generator
    task_gen: np.random.Generator
    policy: np.random.Generator

    @classmethod
    def from_seed(cls, master_seed: int) -> "RngStreams":
        children = np.random.SeedSequence(master_seed).spawn(len(STREAM_NAMES))
        gens = {name: np.random.default_rng(children[i])
                for i, name in enumerate(STREAM_NAMES)}
        return cls(master_seed=master_seed, **gens)

    @staticmethod
    def single(master_seed: int, name: str) -> np.random.Generator:
        """Rebuild one stream from (master seed, name) alone."""
        idx = STREAM_NAMES.index(name)
        child = np.random.SeedSequence(master_seed).spawn(len(STREAM_NAMES))[idx]
        return np.random.default_rng(child)

    def stream(self, name: str) -> np.random.Generator:
        if name not in STREAM_NAMES:
            raise KeyError(f"unknown stream {name!r}, expected one of {STREAM_NAMES}")
        return getattr(self, name)


def stream_field_names() -> tuple[str, ...]:
    return tuple(f.name for f in fields(RngStreams) if f.name != "master_seed")
