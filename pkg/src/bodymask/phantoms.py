"""Seed-deterministic synthetic phantoms with exact ground truth.

Real clinical images cannot ship with the package, so tests and demos
run on geometric phantoms: bright body shapes over Gaussian background
noise, optionally contaminated by caricatures of common background
artifacts (scanner table arc, jewelry blob, beam streaks).  The ground
truth mask is the union of the body shapes only; artifacts are never
part of the truth.

Noise is drawn from the 64-bit counter-based Philox generator, so the
same spec produces bit-identical images on every platform.  Generated
intensities are clamped at zero: the emulated modalities record
non-negative signal, and negative noise excursions would otherwise
wrap to bright values in the raw uint8 cast.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np

from .image_model import BinaryMask2D, ScalarImage2D


def _disk(height: int, width: int, row: float, col: float, radius: float) -> np.ndarray:
    rr, cc = np.ogrid[:height, :width]
    return (rr - row) ** 2 + (cc - col) ** 2 <= radius**2


@dataclass(frozen=True)
class Disk:
    row: float
    col: float
    radius: float
    intensity: float

    def render(self, height: int, width: int) -> np.ndarray:
        return _disk(height, width, self.row, self.col, self.radius)


@dataclass(frozen=True)
class Rectangle:
    top: int
    left: int
    bottom: int  # inclusive
    right: int  # inclusive
    intensity: float

    def render(self, height: int, width: int) -> np.ndarray:
        out = np.zeros((height, width), dtype=bool)
        out[self.top : self.bottom + 1, self.left : self.right + 1] = True
        return out


@dataclass(frozen=True)
class Ring:
    """Annulus: pixels between the inner and outer radius."""

    row: float
    col: float
    outer_radius: float
    inner_radius: float
    intensity: float

    def render(self, height: int, width: int) -> np.ndarray:
        outer = _disk(height, width, self.row, self.col, self.outer_radius)
        inner = _disk(height, width, self.row, self.col, self.inner_radius)
        return outer & ~inner


@dataclass(frozen=True)
class CShape:
    """Annulus with a horizontal slot cut from center to the east edge.

    The slot (``gap_width`` rows tall) connects the inner cavity to the
    outside background, so hole filling leaves the cavity open unless a
    stroke thickness bridges the gap.
    """

    row: int
    col: int
    outer_radius: float
    inner_radius: float
    gap_width: int
    intensity: float

    def render(self, height: int, width: int) -> np.ndarray:
        wall = Ring(self.row, self.col, self.outer_radius, self.inner_radius, 0).render(
            height, width
        )
        lo = self.row - (self.gap_width - 1) // 2
        hi = self.row + self.gap_width // 2
        rr, cc = np.ogrid[:height, :width]
        slot = (rr >= lo) & (rr <= hi) & (cc >= self.col)
        return wall & ~slot


@dataclass(frozen=True)
class TableArc:
    """Thin bright arc below the body, like a patient table in CT."""

    row: float
    col: float
    radius: float
    thickness: float
    intensity: float

    def render(self, height: int, width: int) -> np.ndarray:
        rr, cc = np.ogrid[:height, :width]
        dist = np.sqrt((rr - self.row) ** 2 + (cc - self.col) ** 2)
        return (np.abs(dist - self.radius) <= self.thickness / 2) & (rr >= self.row)


@dataclass(frozen=True)
class JewelrySpot:
    """Small detached bright blob outside the body."""

    row: float
    col: float
    radius: float
    intensity: float

    def render(self, height: int, width: int) -> np.ndarray:
        return _disk(height, width, self.row, self.col, self.radius)


@dataclass(frozen=True)
class Streak:
    """Bright rays fanning out from a point, like metal beam streaks."""

    row: float
    col: float
    count: int
    length: float
    intensity: float

    def render(self, height: int, width: int) -> np.ndarray:
        out = np.zeros((height, width), dtype=bool)
        ts = np.arange(0.0, self.length, 0.25)
        for k in range(self.count):
            angle = 2.0 * np.pi * k / self.count
            rows = np.round(self.row + ts * np.sin(angle)).astype(int)
            cols = np.round(self.col + ts * np.cos(angle)).astype(int)
            keep = (rows >= 0) & (rows < height) & (cols >= 0) & (cols < width)
            out[rows[keep], cols[keep]] = True
        return out


Shape = Union[Disk, Rectangle, Ring, CShape]
Artifact = Union[TableArc, JewelrySpot, Streak]

_SHAPE_KINDS = {"disk": Disk, "rectangle": Rectangle, "ring": Ring, "c_shape": CShape}
_ARTIFACT_KINDS = {"table": TableArc, "jewelry": JewelrySpot, "streak": Streak}
_KIND_OF = {cls: kind for kind, cls in {**_SHAPE_KINDS, **_ARTIFACT_KINDS}.items()}


@dataclass(frozen=True)
class PhantomSpec:
    width: int
    height: int
    shapes: tuple[Shape, ...]
    noise_mean: float = 10.0
    noise_sigma: float = 5.0
    artifact: Artifact | None = None
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("phantom dimensions must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        object.__setattr__(self, "shapes", tuple(self.shapes))

    def to_json(self) -> str:
        def tag(obj):
            d = asdict(obj)
            d["kind"] = _KIND_OF[type(obj)]
            return d

        return json.dumps(
            {
                "width": self.width,
                "height": self.height,
                "noise_mean": self.noise_mean,
                "noise_sigma": self.noise_sigma,
                "seed": self.seed,
                "shapes": [tag(s) for s in self.shapes],
                "artifact": tag(self.artifact) if self.artifact else None,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "PhantomSpec":
        raw = json.loads(text)

        def untag(d, kinds):
            d = dict(d)
            kind = d.pop("kind")
            if kind not in kinds:
                raise ValueError(f"unknown phantom element kind {kind!r}")
            return kinds[kind](**d)

        return cls(
            width=raw["width"],
            height=raw["height"],
            shapes=tuple(untag(s, _SHAPE_KINDS) for s in raw["shapes"]),
            noise_mean=raw.get("noise_mean", 10.0),
            noise_sigma=raw.get("noise_sigma", 5.0),
            artifact=untag(raw["artifact"], _ARTIFACT_KINDS) if raw.get("artifact") else None,
            seed=raw.get("seed", 0),
        )


def generate(spec: PhantomSpec) -> tuple[ScalarImage2D, BinaryMask2D]:
    """Render a phantom: (image, ground-truth body mask).

    The image is background noise plus additive shape intensities, with
    the artifact (if any) layered on top and everything clamped at 0.
    The truth depends only on the body shapes, never on noise or
    artifact.
    """
    h, w = spec.height, spec.width
    rng = np.random.Generator(np.random.Philox(spec.seed))
    image = rng.normal(spec.noise_mean, spec.noise_sigma, size=(h, w))
    truth = np.zeros((h, w), dtype=bool)
    for shape in spec.shapes:
        member = shape.render(h, w)
        image[member] += shape.intensity
        truth |= member
    if spec.artifact is not None:
        image[spec.artifact.render(h, w)] += spec.artifact.intensity
    np.maximum(image, 0.0, out=image)
    return ScalarImage2D(image, source_dtype="float64"), BinaryMask2D(truth)
