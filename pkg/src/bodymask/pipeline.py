"""The main body/background separation pipeline.

For a 2D image the stages run in a fixed order: convert to uint8 (raw
wrap cast, or the normalizing path when enabled), take the Otsu
threshold of the histogram, binarize, find all contours, select by
contour number, draw them (filled or stroked), and finally fill any
remaining holes.  3D volumes are processed slice by slice with the same
2D function.

Degenerate inputs (constant images) yield an empty mask plus a warning
instead of an exception, so batch runs over heterogeneous slices never
abort halfway.  The display window (vmin/vmax) affects rendering only
and can never change the mask.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .contours import draw_contours, find_contours, select_contours
from .image_model import (
    BinaryMask2D,
    ByteImage2D,
    ScalarImage2D,
    _check_scalar_values,
    _freeze,
    cast_wrap_uint8,
    window_render,
)
from .morphology import fill_holes
from .normalization import ZeroVarianceError, clipped_fraction, normalize_for_uint8
from .otsu import binarize, histogram, otsu_threshold

PANEL_GAP = 8  # separator width between panel panes, pixels


@dataclass(frozen=True)
class MaskPipelineConfig:
    """Hyperparameters of the separation pipeline.

    Attributes:
        normalization: use the z-score/outlier-limit path instead of the
            raw wrap cast (default off).
        limit: outlier limit in z-score units (default 3).
        contour_numbers: ranks of the contours the mask is built from
            (1 = largest); None means all contours.
        thickness: -1 draws contours filled (default); >= 1 draws
            stroked outlines of that thickness.
        plot: emit display panels (default on).  Never changes the mask.
        vmin / vmax: optional display window for the input pane.
        slice_axis: axis to slice 3D volumes along (default 0).
    """

    normalization: bool = False
    limit: float = 3.0
    contour_numbers: tuple[int, ...] | None = None
    thickness: int = -1
    plot: bool = True
    vmin: float | None = None
    vmax: float | None = None
    slice_axis: int = 0

    def __post_init__(self):
        if self.limit <= 0:
            raise ValueError(f"limit must be positive, got {self.limit}")
        object.__setattr__(self, "limit", float(self.limit))
        if self.thickness == 0 or self.thickness < -1:
            raise ValueError(f"thickness must be -1 or >= 1, got {self.thickness}")
        if self.contour_numbers is not None:
            numbers = tuple(int(k) for k in self.contour_numbers)
            if any(k < 1 for k in numbers):
                raise ValueError("contour numbers must be >= 1")
            object.__setattr__(self, "contour_numbers", numbers)
        if self.vmin is not None and self.vmax is not None and self.vmin >= self.vmax:
            raise ValueError(f"vmin ({self.vmin}) must be < vmax ({self.vmax})")
        if self.slice_axis not in (0, 1, 2):
            raise ValueError(f"slice_axis must be 0, 1, or 2, got {self.slice_axis}")

    @classmethod
    def from_dict(cls, raw: dict) -> "MaskPipelineConfig":
        """Build from a JSON-style dict (preset files, CLI merges).

        ``normalization`` and ``plot`` accept booleans or the strings
        "on"/"off"; missing keys fall back to defaults; unknown keys are
        rejected.
        """
        known = {
            "normalization",
            "limit",
            "contour_numbers",
            "thickness",
            "plot",
            "vmin",
            "vmax",
            "slice_axis",
        }
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(raw)
        for key in ("normalization", "plot"):
            if key in kwargs:
                kwargs[key] = _parse_on_off(kwargs[key], key)
        if kwargs.get("contour_numbers") is not None:
            kwargs["contour_numbers"] = tuple(kwargs["contour_numbers"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "normalization": "on" if self.normalization else "off",
            "limit": self.limit,
            "contour_numbers": list(self.contour_numbers)
            if self.contour_numbers is not None
            else None,
            "thickness": self.thickness,
            "plot": "on" if self.plot else "off",
            "vmin": self.vmin,
            "vmax": self.vmax,
            "slice_axis": self.slice_axis,
        }


def _parse_on_off(value, name: str) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered == "on":
            return True
        if lowered == "off":
            return False
    raise ValueError(f"{name} must be 'on', 'off', or a boolean, got {value!r}")


@dataclass
class MaskReport:
    """Per-run diagnostics for inspection and tuning."""

    threshold_used: int
    degenerate: bool
    contour_count: int
    selected_areas: list[int] = field(default_factory=list)
    clipped_fraction: float | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold_used,
            "degenerate": self.degenerate,
            "contour_count": self.contour_count,
            "selected_areas": list(self.selected_areas),
            "clipped_fraction": self.clipped_fraction,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class Volume3D:
    """3D scalar volume; axis order is (axis0, axis1, axis2), row-major."""

    data: np.ndarray
    source_dtype: str = "float64"

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3 or min(data.shape) < 1:
            raise ValueError(f"expected a non-empty 3D array, got shape {data.shape}")
        _check_scalar_values(data, self.source_dtype)
        object.__setattr__(self, "data", _freeze(data))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape


@dataclass(frozen=True)
class BinaryMask3D:
    """3D mask with values in {0, 1}."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3 or min(data.shape) < 1:
            raise ValueError(f"expected a non-empty 3D array, got shape {data.shape}")
        if data.dtype == np.bool_:
            data = data.astype(np.uint8)
        if not np.all(np.isin(np.unique(data), (0, 1))):
            raise ValueError("mask values must be 0 or 1")
        object.__setattr__(self, "data", _freeze(data.astype(np.uint8)))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape


def _empty_report(threshold: int, warning: str, clipped: float | None) -> MaskReport:
    return MaskReport(
        threshold_used=threshold,
        degenerate=True,
        contour_count=0,
        selected_areas=[],
        clipped_fraction=clipped,
        warnings=[warning],
    )


def body_mask_2d(
    img: ScalarImage2D, config: MaskPipelineConfig | None = None
) -> tuple[BinaryMask2D, MaskReport]:
    """Separate the body from the background of a 2D image.

    Returns the binary mask (1 = body) and a report with the threshold,
    contour statistics, and any warnings.  Constant images produce an
    empty mask plus a warning rather than an error; an out-of-range
    contour number raises ContourSelectionError.
    """
    if config is None:
        config = MaskPipelineConfig()
    empty = BinaryMask2D(np.zeros((img.height, img.width), dtype=np.uint8))

    clipped = None
    if config.normalization:
        try:
            byte = normalize_for_uint8(img, limit=config.limit)
        except ZeroVarianceError:
            warning = "zero-variance image: normalization impossible, mask left empty"
            return empty, _empty_report(0, warning, None)
        clipped = clipped_fraction(byte)
    else:
        byte = cast_wrap_uint8(img)

    result = otsu_threshold(histogram(byte))
    if result.degenerate:
        warning = "degenerate histogram: single intensity value, mask left empty"
        return empty, _empty_report(result.threshold, warning, clipped)

    initial = binarize(byte, result.threshold)
    contours = find_contours(initial)
    selected = select_contours(contours, config.contour_numbers)
    drawn = draw_contours(img.width, img.height, selected, thickness=config.thickness)
    final = fill_holes(drawn)

    report = MaskReport(
        threshold_used=result.threshold,
        degenerate=False,
        contour_count=len(contours),
        selected_areas=sorted((ct.enclosed_area for ct in selected), reverse=True),
        clipped_fraction=clipped,
        warnings=[],
    )
    return final, report


def body_mask_3d(
    vol: Volume3D,
    config: MaskPipelineConfig | None = None,
    workers: int = 1,
) -> tuple[BinaryMask3D, list[MaskReport]]:
    """Apply the 2D pipeline to every slice of a volume.

    Slice i of the output equals ``body_mask_2d`` on slice i of the
    input, bit for bit; normalization statistics are per-slice.  With
    ``workers > 1`` slices run on a thread pool; results are assembled
    in slice order either way, so the output is identical.
    """
    if config is None:
        config = MaskPipelineConfig()
    axis = config.slice_axis
    count = vol.data.shape[axis]

    def run(i: int) -> tuple[BinaryMask2D, MaskReport]:
        piece = np.take(vol.data, i, axis=axis)
        return body_mask_2d(ScalarImage2D(piece, vol.source_dtype), config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(count)))
    else:
        results = [run(i) for i in range(count)]

    stacked = np.stack([mask.data for mask, _ in results], axis=axis)
    return BinaryMask3D(stacked), [report for _, report in results]


def render_panel(
    img: ScalarImage2D,
    byte: ByteImage2D,
    mask: BinaryMask2D,
    vmin: float | None = None,
    vmax: float | None = None,
) -> ByteImage2D:
    """Three-pane byte raster: [windowed input | uint8 image | mask].

    Panes are separated by 8-pixel black gaps, so the panel is
    3*width + 16 pixels wide.  The first pane honors the vmin/vmax
    display window; the mask pane shows 0/255.
    """
    if not (img.data.shape == byte.data.shape == mask.data.shape):
        raise ValueError(
            f"panel inputs disagree on shape: {img.data.shape}, "
            f"{byte.data.shape}, {mask.data.shape}"
        )
    gap = np.zeros((img.height, PANEL_GAP), dtype=np.uint8)
    panes = [
        window_render(img, vmin, vmax).data,
        gap,
        byte.data,
        gap,
        mask.data * np.uint8(255),
    ]
    return ByteImage2D(np.hstack(panes))


def pipeline_byte_image(img: ScalarImage2D, config: MaskPipelineConfig) -> ByteImage2D:
    """The uint8 image the pipeline thresholds (for panels/figures).

    Falls back to the wrap cast when normalization is requested but the
    image is constant, mirroring body_mask_2d's degenerate handling.
    """
    if config.normalization:
        try:
            return normalize_for_uint8(img, limit=config.limit)
        except ZeroVarianceError:
            return cast_wrap_uint8(img)
    return cast_wrap_uint8(img)
