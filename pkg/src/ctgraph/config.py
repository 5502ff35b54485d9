"""JSON configuration schema, validation, and named baseline presets.

The on-disk schema groups parameters the same way the runtime does::

    {
      "seed": 1,
      "graph_shape":  {"d": 2, "b": 2, "p": 0.0},
      "reward":       {"high_r": 1.0, "fail_r": 0.0, "std_r": 0.0,
                       "mode": "needle"},
      "observations": {"MDP_D": true, "MDP_W": true,
                       "D_IDs": [2, 4], "W_IDs": [5, 11]},
      "image_set":    {"seed": 1, "1D": true, "nr_images": 12,
                       "noise_on_read": 0.0, "rotation_on_read": 0.0}
    }

Optional keys: ``reward.goal`` pins the goal leaf (used by curriculum
exports; drawn from the seed when absent), ``observations.H_IDs`` /
``observations.E_IDs`` widen the home/end percept ranges for fully
stochastic observation experiments.  Unknown keys are rejected.
All range and cardinality checks happen here, never at step time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .observations import ObservationConfig
from .topology import GraphShape, count_decision_states, count_wait_states

REWARD_MODES = ("needle", "gradient", "stochastic")

# Reserved percepts: 0 = home (fail shows it too), 1 = graph end.
RESERVED_HOME_ID = 0
RESERVED_END_ID = 1


@dataclass(frozen=True)
class RewardSettings:
    high_r: float = 1.0
    fail_r: float = 0.0
    std_r: float = 0.0
    mode: str = "needle"
    goal: tuple[int, ...] | None = None

    def validate(self, shape: GraphShape) -> None:
        if self.mode not in REWARD_MODES:
            raise ConfigError(
                f"reward.mode must be one of {REWARD_MODES}, got {self.mode!r}")
        if self.std_r < 0:
            raise ConfigError(f"reward.std_r must be >= 0, got {self.std_r}")
        if self.goal is not None:
            if len(self.goal) != shape.depth:
                raise ConfigError(
                    f"reward.goal must have length d={shape.depth}, got {list(self.goal)}")
            if any(not 1 <= g <= shape.branching for g in self.goal):
                raise ConfigError(
                    f"reward.goal entries must be in 1..{shape.branching}: {list(self.goal)}")


@dataclass(frozen=True)
class GraphSpec:
    """The full environment configuration: seed, tree shape, reward
    settings, and observation settings."""

    seed: int
    shape: GraphShape
    reward: RewardSettings
    obs: ObservationConfig

    def validate(self) -> "GraphSpec":
        self.reward.validate(self.shape)
        self.obs.validate(self.shape)
        return self


def _require_keys(group: Mapping[str, Any], allowed: dict[str, bool], where: str) -> None:
    for key in group:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")
    for key, required in allowed.items():
        if required and key not in group:
            raise ConfigError(f"missing key {key!r} in {where}")


def _as_range(value: Any, where: str) -> tuple[int, int]:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, int) for v in value)):
        raise ConfigError(f"{where} must be a two-integer [lo, hi] range, got {value!r}")
    return (value[0], value[1])


def parse_config(data: Mapping[str, Any], source: str = "<config>") -> GraphSpec:
    if not isinstance(data, Mapping):
        raise ConfigError(f"{source}: top level must be a JSON object")
    _require_keys(data, {"seed": True, "graph_shape": True, "reward": True,
                         "observations": True, "image_set": True}, source)

    if not isinstance(data["seed"], int):
        raise ConfigError(f"{source}: seed must be an integer")

    gs = data["graph_shape"]
    _require_keys(gs, {"d": True, "b": True, "p": True}, f"{source}:graph_shape")
    if not isinstance(gs["p"], (int, float)) or isinstance(gs["p"], bool):
        raise ConfigError(f"{source}: graph_shape.p must be a number")
    shape = GraphShape(branching=gs["b"], depth=gs["d"], wait_prob=float(gs["p"]))

    rw = data["reward"]
    _require_keys(rw, {"high_r": True, "fail_r": True, "std_r": True,
                       "mode": False, "goal": False}, f"{source}:reward")
    goal = rw.get("goal")
    if goal is not None:
        if not isinstance(goal, (list, tuple)) or not all(isinstance(g, int) for g in goal):
            raise ConfigError(f"{source}: reward.goal must be a list of integers")
        goal = tuple(goal)
    reward = RewardSettings(
        high_r=float(rw["high_r"]),
        fail_r=float(rw["fail_r"]),
        std_r=float(rw["std_r"]),
        mode=rw.get("mode", "needle"),
        goal=goal,
    )

    ob = data["observations"]
    _require_keys(ob, {"MDP_D": True, "MDP_W": True, "W_IDs": True, "D_IDs": True,
                       "H_IDs": False, "E_IDs": False}, f"{source}:observations")
    for flag in ("MDP_D", "MDP_W"):
        if not isinstance(ob[flag], bool):
            raise ConfigError(f"{source}: observations.{flag} must be true or false")

    im = data["image_set"]
    _require_keys(im, {"seed": True, "1D": True, "nr_images": True,
                       "noise_on_read": True, "rotation_on_read": True},
                  f"{source}:image_set")
    if not isinstance(im["seed"], int):
        raise ConfigError(f"{source}: image_set.seed must be an integer")
    if not isinstance(im["1D"], bool):
        raise ConfigError(f"{source}: image_set.1D must be true or false")
    if not isinstance(im["nr_images"], int):
        raise ConfigError(f"{source}: image_set.nr_images must be an integer")

    obs = ObservationConfig(
        one_d=im["1D"],
        nr_images=im["nr_images"],
        mdp_d=ob["MDP_D"],
        mdp_w=ob["MDP_W"],
        d_ids=_as_range(ob["D_IDs"], f"{source}:observations.D_IDs"),
        w_ids=_as_range(ob["W_IDs"], f"{source}:observations.W_IDs"),
        h_ids=_as_range(ob["H_IDs"], f"{source}:observations.H_IDs")
        if "H_IDs" in ob else (RESERVED_HOME_ID, RESERVED_HOME_ID),
        e_ids=_as_range(ob["E_IDs"], f"{source}:observations.E_IDs")
        if "E_IDs" in ob else (RESERVED_END_ID, RESERVED_END_ID),
        noise_on_read=float(im["noise_on_read"]),
        rotation_on_read=float(im["rotation_on_read"]),
        image_seed=im["seed"],
    )
    return GraphSpec(seed=data["seed"], shape=shape, reward=reward, obs=obs).validate()


def load_config(path: str | Path) -> GraphSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_config(data, source=str(path))


def spec_to_dict(spec: GraphSpec) -> dict[str, Any]:
    data: dict[str, Any] = {
        "seed": spec.seed,
        "graph_shape": {"d": spec.shape.depth, "b": spec.shape.branching,
                        "p": spec.shape.wait_prob},
        "reward": {"high_r": spec.reward.high_r, "fail_r": spec.reward.fail_r,
                   "std_r": spec.reward.std_r, "mode": spec.reward.mode},
        "observations": {"MDP_D": spec.obs.mdp_d, "MDP_W": spec.obs.mdp_w,
                         "W_IDs": list(spec.obs.w_ids), "D_IDs": list(spec.obs.d_ids)},
        "image_set": {"seed": spec.obs.image_seed, "1D": spec.obs.one_d,
                      "nr_images": spec.obs.nr_images,
                      "noise_on_read": spec.obs.noise_on_read,
                      "rotation_on_read": spec.obs.rotation_on_read},
    }
    if spec.reward.goal is not None:
        data["reward"]["goal"] = list(spec.reward.goal)
    if spec.obs.h_ids != (RESERVED_HOME_ID, RESERVED_HOME_ID):
        data["observations"]["H_IDs"] = list(spec.obs.h_ids)
    if spec.obs.e_ids != (RESERVED_END_ID, RESERVED_END_ID):
        data["observations"]["E_IDs"] = list(spec.obs.e_ids)
    return data


def write_config(spec: GraphSpec, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(spec_to_dict(spec), indent=2) + "\n")
    return path


def _fully_observable_ranges(shape: GraphShape) -> dict[str, Any]:
    # decision ids right after the reserved pair, wait ids after those
    n_dec = count_decision_states(shape)
    n_wait = count_wait_states(shape)
    d_lo = RESERVED_END_ID + 1
    w_lo = d_lo + n_dec
    return {"d_ids": (d_lo, d_lo + n_dec - 1),
            "w_ids": (w_lo, w_lo + n_wait - 1),
            "nr_images": w_lo + n_wait}


def _build_presets() -> dict[str, GraphSpec]:
    presets: dict[str, GraphSpec] = {}

    def add(name: str, shape: GraphShape, obs: ObservationConfig) -> None:
        presets[name] = GraphSpec(seed=1, shape=shape, reward=RewardSettings(),
                                  obs=obs).validate()

    fo1 = GraphShape(branching=2, depth=2, wait_prob=0.0)
    r = _fully_observable_ranges(fo1)
    add("CT-FO-B1", fo1, ObservationConfig(
        one_d=True, nr_images=r["nr_images"], mdp_d=True, mdp_w=True,
        d_ids=r["d_ids"], w_ids=r["w_ids"], image_seed=1))

    fo2 = GraphShape(branching=2, depth=3, wait_prob=0.5)
    r = _fully_observable_ranges(fo2)
    add("CT-FO-B2", fo2, ObservationConfig(
        one_d=True, nr_images=r["nr_images"], mdp_d=True, mdp_w=True,
        d_ids=r["d_ids"], w_ids=r["w_ids"], image_seed=1))

    add("CT-SU-B1", GraphShape(branching=2, depth=2, wait_prob=0.0),
        ObservationConfig(one_d=False, nr_images=5, mdp_d=False, mdp_w=False,
                          d_ids=(2, 2), w_ids=(3, 3), image_seed=1))

    add("CT-CO-B1", GraphShape(branching=2, depth=2, wait_prob=0.0),
        ObservationConfig(one_d=False, nr_images=103, mdp_d=False, mdp_w=False,
                          d_ids=(2, 2), w_ids=(3, 102), image_seed=1))

    add("CT-POSR-B1", GraphShape(branching=2, depth=2, wait_prob=0.5),
        ObservationConfig(one_d=False, nr_images=5, mdp_d=False, mdp_w=False,
                          d_ids=(2, 2), w_ids=(3, 3), image_seed=1))
    return presets


PRESETS = _build_presets()
PRESET_NAMES = tuple(PRESETS)


def preset(name: str, seed: int | None = None) -> GraphSpec:
    """Return a named baseline configuration, optionally re-seeded."""
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; valid names: {', '.join(PRESET_NAMES)}") from None
    if seed is not None:
        spec = replace(spec, seed=seed)
    return spec
