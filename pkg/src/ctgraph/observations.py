"""Stochastic observation process: class sets, state-to-class mapping,
and per-read augmentation.

Observation classes are synthetic 12x12 images built by upscaling a random
4x4 blueprint over the alphabet {0,1,2} by a factor of 3 and applying one
of three base rotations (0, 30 or 60 degrees), for a distinct-image space
of 3 * 3**16 = 3**17.  Pixel values are normalized to {0, 0.5, 1}; each
read optionally re-rotates the canonical image by a small random angle
(bilinear, zero fill) and adds i.i.d. uniform pixel noise, then clips to
[0, 1].

Class ids 0 and 1 are reserved by default: 0 is the home percept (also
emitted by the fail state, which "sends the agent home"), 1 is the
graph-end percept.  Decision and wait states draw from the configured
``d_ids`` / ``w_ids`` ranges, either pinned one-to-one to states (MDP
mode) or re-sampled uniformly on every visit (POMDP modes).
"""

from __future__ import annotations

import csv
import functools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import ConfigError, ContractError
from .rng import RngStreams
from .topology import (
    GraphShape,
    StateId,
    StateKind,
    count_decision_states,
    count_states,
    count_wait_states,
    decision_rank,
    encode_state,
    wait_rank,
)

BLUEPRINT_SIDE = 4
UPSCALE = 3
IMAGE_SIDE = BLUEPRINT_SIDE * UPSCALE  # 12
BASE_ROTATIONS = (0.0, 30.0, 60.0)
DISTINCT_IMAGE_SPACE = len(BASE_ROTATIONS) * 3 ** (BLUEPRINT_SIDE * BLUEPRINT_SIDE)

MIN_IMAGES = 5


@dataclass(frozen=True)
class ObservationConfig:
    """Observation-side configuration.

    ``w_ids``/``d_ids`` are inclusive class-id ranges for wait and decision
    states; ``h_ids``/``e_ids`` default to the reserved singletons for the
    home and end percepts and only need widening for fully stochastic
    observation experiments.
    """

    one_d: bool = False
    nr_images: int = MIN_IMAGES
    mdp_d: bool = True
    mdp_w: bool = True
    d_ids: tuple[int, int] = (2, 2)
    w_ids: tuple[int, int] = (3, 3)
    h_ids: tuple[int, int] = (0, 0)
    e_ids: tuple[int, int] = (1, 1)
    noise_on_read: float = 0.0
    rotation_on_read: float = 0.0
    image_seed: int = 1

    def validate(self, shape: GraphShape) -> None:
        if self.nr_images < MIN_IMAGES:
            raise ConfigError(
                f"image_set.nr_images must be {MIN_IMAGES} or higher, got {self.nr_images}")
        if self.nr_images > DISTINCT_IMAGE_SPACE:
            raise ConfigError(
                f"image_set.nr_images={self.nr_images} exceeds the distinct-image "
                f"space 3**17 = {DISTINCT_IMAGE_SPACE}")
        if self.noise_on_read < 0:
            raise ConfigError("image_set.noise_on_read must be >= 0")
        if self.rotation_on_read < 0:
            raise ConfigError("image_set.rotation_on_read must be >= 0")
        ranges = {"D_IDs": self.d_ids, "W_IDs": self.w_ids,
                  "H_IDs": self.h_ids, "E_IDs": self.e_ids}
        for name, (lo, hi) in ranges.items():
            if lo > hi:
                raise ConfigError(f"observations.{name} range is empty: [{lo}, {hi}]")
            if lo < 0 or hi >= self.nr_images:
                raise ConfigError(
                    f"observations.{name}=[{lo}, {hi}] must lie within "
                    f"[0, nr_images-1] = [0, {self.nr_images - 1}]")
        items = list(ranges.items())
        for i, (name_a, ra) in enumerate(items):
            for name_b, rb in items[i + 1:]:
                if ra[0] <= rb[1] and rb[0] <= ra[1]:
                    raise ConfigError(
                        f"observations.{name_a} and observations.{name_b} overlap: "
                        f"{ra} vs {rb}")
        # MDP flags need one id per state; check now so step time never fails
        if self.mdp_d:
            need = count_decision_states(shape)
            have = self.d_ids[1] - self.d_ids[0] + 1
            if have < need:
                raise ConfigError(
                    f"observations.MDP_D=true needs {need} decision ids but "
                    f"D_IDs={list(self.d_ids)} provides {have}")
        if self.mdp_w:
            need = count_wait_states(shape)
            have = self.w_ids[1] - self.w_ids[0] + 1
            if have < need:
                raise ConfigError(
                    f"observations.MDP_W=true needs {need} wait ids but "
                    f"W_IDs={list(self.w_ids)} provides {have}")


@dataclass(frozen=True, eq=False)
class ImageClass:
    class_id: int
    blueprint: np.ndarray = field(repr=False)   # 4x4 over {0,1,2}
    base_rotation: float
    canonical: np.ndarray = field(repr=False)   # 12x12 float in [0, 1]


@dataclass(frozen=True, eq=False)
class Observation:
    class_id: int
    payload: np.ndarray | None = None


def _render_canonical(blueprint: np.ndarray, base_rotation: float) -> np.ndarray:
    img = np.kron(blueprint, np.ones((UPSCALE, UPSCALE))) / 2.0
    if base_rotation:
        img = ndimage.rotate(img, base_rotation, reshape=False, order=1,
                             mode="constant", cval=0.0)
        img = np.clip(img, 0.0, 1.0)
    return np.ascontiguousarray(img, dtype=np.float64)


@functools.lru_cache(maxsize=32)
def build_image_set(cfg: ObservationConfig) -> tuple[ImageClass, ...]:
    """Deterministically build the class set from ``cfg.image_seed``.

    Blueprints are drawn uniformly over the 3**16 space and base rotations
    uniformly over {0, 30, 60}; colliding (blueprint, rotation) pairs are
    re-drawn so classes are pairwise distinct.
    """
    if cfg.nr_images > DISTINCT_IMAGE_SPACE:
        raise ConfigError(
            f"nr_images={cfg.nr_images} exceeds the distinct-image space")
    rng = np.random.default_rng(np.random.SeedSequence(cfg.image_seed))
    seen: set[bytes] = set()
    classes: list[ImageClass] = []
    while len(classes) < cfg.nr_images:
        blueprint = rng.integers(0, 3, size=(BLUEPRINT_SIDE, BLUEPRINT_SIDE))
        rotation = float(BASE_ROTATIONS[rng.integers(0, len(BASE_ROTATIONS))])
        key = blueprint.tobytes() + bytes([int(rotation) // 30])
        if key in seen:
            continue
        seen.add(key)
        classes.append(ImageClass(
            class_id=len(classes),
            blueprint=blueprint,
            base_rotation=rotation,
            canonical=_render_canonical(blueprint, rotation),
        ))
    return tuple(classes)


def class_for_parts(kind: StateKind, depth: int, path: tuple[int, ...],
                    cfg: ObservationConfig, shape: GraphShape,
                    obs_rng: "np.random.Generator") -> int:
    """Kernel of :func:`class_for_state` over primitive state parts; the
    episode engine calls this directly to avoid per-step allocations."""
    if kind is StateKind.DECISION:
        lo, hi = cfg.d_ids
        if cfg.mdp_d:
            return lo + decision_rank(depth, path, shape.branching)
    elif kind is StateKind.WAIT:
        lo, hi = cfg.w_ids
        if cfg.mdp_w:
            return lo + wait_rank(depth, path, shape.branching)
    elif kind is StateKind.END:
        lo, hi = cfg.e_ids
    else:  # HOME and FAIL both show the home percept
        lo, hi = cfg.h_ids
    if lo == hi:
        return lo
    return int(obs_rng.integers(lo, hi + 1))


def class_for_state(state: StateId, cfg: ObservationConfig, shape: GraphShape,
                    streams: RngStreams) -> int:
    """Class id shown by ``state`` this step.

    Home and fail share the reserved home percept; ends get the end
    percept.  Decision/wait states use a fixed per-state id under the MDP
    flags, otherwise a fresh uniform draw from their range on every call
    (wait states re-roll even on self-transitions).
    """
    return class_for_parts(state.kind, state.depth, state.path, cfg, shape,
                           streams.obs_choice)


def render(class_id: int, cfg: ObservationConfig, streams: RngStreams,
           state: StateId | None = None,
           shape: GraphShape | None = None) -> Observation:
    """Produce one observation instance of ``class_id``.

    2D mode: canonical image, re-rotated by a uniform angle within
    +/- rotation_on_read (bilinear, zero fill), plus per-pixel uniform
    noise within +/- noise_on_read, clipped to [0, 1].

    1D mode returns the one-hot encoding of the underlying state
    (``state`` and ``shape`` required) and ignores augmentation.
    """
    if cfg.one_d:
        if state is None or shape is None:
            raise ContractError("1D rendering needs the underlying state and shape")
        return Observation(class_id=class_id, payload=one_hot(state, shape))
    classes = build_image_set(cfg)
    if not 0 <= class_id < len(classes):
        raise ConfigError(f"class id {class_id} outside the built set of {len(classes)}")
    img = classes[class_id].canonical
    rng = streams.obs_augment
    if cfg.rotation_on_read > 0:
        angle = rng.uniform(-cfg.rotation_on_read, cfg.rotation_on_read)
        img = ndimage.rotate(img, angle, reshape=False, order=1,
                             mode="constant", cval=0.0)
    else:
        img = img.copy()
    if cfg.noise_on_read > 0:
        img += rng.uniform(-cfg.noise_on_read, cfg.noise_on_read, img.shape)
    np.clip(img, 0.0, 1.0, out=img)
    return Observation(class_id=class_id, payload=img)


def one_hot(state: StateId, shape: GraphShape) -> np.ndarray:
    vec = np.zeros(count_states(shape))
    vec[encode_state(state, shape)] = 1.0
    return vec


def observation_shape(cfg: ObservationConfig, shape: GraphShape) -> tuple[int, ...]:
    if cfg.one_d:
        return (count_states(shape),)
    return (IMAGE_SIDE, IMAGE_SIDE)


def write_image_set(cfg: ObservationConfig, out_dir: str | Path) -> list[Path]:
    """Dump every canonical class as an ASCII PGM (P2, 12x12, maxval 255)
    plus a CSV manifest of (class_id, rotation, flattened blueprint)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    classes = build_image_set(cfg)
    written: list[Path] = []
    for cls in classes:
        pixels = np.rint(cls.canonical * 255).astype(int)
        lines = [f"P2", f"{IMAGE_SIDE} {IMAGE_SIDE}", "255"]
        lines += [" ".join(str(v) for v in row) for row in pixels]
        path = out / f"class_{cls.class_id:03d}.pgm"
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    manifest = out / "manifest.csv"
    with manifest.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class_id", "rotation"]
                        + [f"b{i:02d}" for i in range(BLUEPRINT_SIDE ** 2)])
        for cls in classes:
            writer.writerow([cls.class_id, cls.base_rotation]
                            + [int(v) for v in cls.blueprint.ravel()])
    written.append(manifest)
    return written
