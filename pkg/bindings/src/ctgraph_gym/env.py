"""Gym-style surface over the ctgraph engine.

The wrapper never reimplements environment logic: it marshals every call
to the engine, so there is exactly one source of truth for transitions,
observations, and rewards.  One handle owns one engine instance and must
be used from a single thread; independent handles share nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ctgraph import (
    ContractError,
    CtGraphEnv,
    GraphSpec,
    PRESET_NAMES,
    load_config,
    observation_shape,
    preset,
)


@dataclass(frozen=True)
class Discrete:
    """Action space: integers 0..n-1."""

    n: int

    def contains(self, value: int) -> bool:
        return isinstance(value, (int, np.integer)) and 0 <= value < self.n


@dataclass(frozen=True)
class Box:
    """Observation space: reals in [low, high] of a fixed shape."""

    shape: tuple[int, ...]
    low: float = 0.0
    high: float = 1.0


def resolve_spec(source: str | Path | GraphSpec, seed: int | None = None) -> GraphSpec:
    """Accept a preset name, a JSON config path, or an assembled spec."""
    if isinstance(source, GraphSpec):
        return replace(source, seed=seed) if seed is not None else source
    if isinstance(source, str) and source in PRESET_NAMES:
        return preset(source, seed=seed)
    spec = load_config(source)
    return replace(spec, seed=seed) if seed is not None else spec


class CtGraphGymEnv:
    """make / reset / step / close over one engine instance.

    ``step`` returns ``(observation, reward, done, info)`` with the
    observation as an ndarray of reals and ``info`` carrying the debug
    fields ``state_kind``, ``depth``, ``path`` and ``obs_class``.
    """

    def __init__(self, source: str | Path | GraphSpec, seed: int | None = None):
        spec = resolve_spec(source, seed=seed)
        self._env = CtGraphEnv(spec)
        self.spec = spec
        self.action_space = Discrete(self._env.n_actions)
        self.observation_space = Box(shape=observation_shape(spec.obs, spec.shape))
        self._closed = False

    @property
    def task(self):
        return self._env.task

    @property
    def last_obs_class(self) -> int | None:
        return self._env.last_obs_class

    def _check_open(self) -> None:
        if self._closed:
            raise ContractError("operation on a closed environment handle")

    def reset(self) -> np.ndarray:
        self._check_open()
        return self._env.reset().payload

    def step(self, action: int) -> tuple[np.ndarray, float, bool, dict]:
        self._check_open()
        obs, reward, done, info = self._env.step(int(action))
        return obs.payload, reward, done, info

    def close(self) -> None:
        self._closed = True

    def __enter__(self) -> "CtGraphGymEnv":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def make(source: str | Path | GraphSpec, seed: int | None = None) -> CtGraphGymEnv:
    """Build an environment from a preset name, config path, or spec."""
    return CtGraphGymEnv(source, seed=seed)
