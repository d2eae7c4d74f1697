"""Core raster types and elementary intensity transforms.

All images are stored as 2D numpy arrays in row-major order with shape
``(height, width)``; pixel coordinates are ``(row, col)``.  Values are
immutable after construction (the backing arrays are marked read-only),
so every type here is safe to share between threads.

Rounding convention used throughout the package: round half away from
zero (``round_half_away``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SOURCE_DTYPES = ("uint8", "uint16", "int16", "float64")

_INT_RANGES = {
    "uint8": (0, 255),
    "uint16": (0, 65535),
    "int16": (-32768, 32767),
}


class InvalidWindowError(ValueError):
    """Raised when an explicit display window has vmin >= vmax."""


def round_half_away(values: np.ndarray) -> np.ndarray:
    """Round to the nearest integer, halves away from zero.

    numpy's own ``round`` rounds halves to even, which is not what the
    rest of the package expects, so every quantization step goes through
    this helper.
    """
    values = np.asarray(values, dtype=np.float64)
    return np.copysign(np.floor(np.abs(values) + 0.5), values)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


def _check_scalar_values(data: np.ndarray, source_dtype: str) -> None:
    """Shared invariants for scalar rasters (2D images and 3D volumes)."""
    if not np.all(np.isfinite(data)):
        raise ValueError("image contains NaN or Inf values")
    if source_dtype not in SOURCE_DTYPES:
        raise ValueError(f"unknown source_dtype {source_dtype!r}")
    if source_dtype in _INT_RANGES:
        lo, hi = _INT_RANGES[source_dtype]
        if not np.array_equal(data, np.trunc(data)):
            raise ValueError(f"{source_dtype} image has non-integral values")
        if data.min() < lo or data.max() > hi:
            raise ValueError(f"values outside {source_dtype} range [{lo}, {hi}]")


@dataclass(frozen=True)
class ScalarImage2D:
    """Real-valued 2D image plus a record of the dtype it was read from.

    Args:
        data: 2D array of finite scalars, shape (height, width).
        source_dtype: one of ``uint8``, ``uint16``, ``int16``, ``float64``.
            For the integer tags every value must be integral and within
            the dtype's range.
    """

    data: np.ndarray
    source_dtype: str = "float64"

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2D array, got shape {data.shape}")
        _check_scalar_values(data, self.source_dtype)
        object.__setattr__(self, "data", _freeze(data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ByteImage2D:
    """2D image with integer values in [0, 255]."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2D array, got shape {data.shape}")
        if data.dtype != np.uint8:
            if data.min() < 0 or data.max() > 255 or not np.array_equal(data, np.trunc(data)):
                raise ValueError("byte image values must be integers in [0, 255]")
            data = data.astype(np.uint8)
        object.__setattr__(self, "data", _freeze(data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class BinaryMask2D:
    """2D mask with values in {0, 1}; 1 marks the body/foreground."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2D array, got shape {data.shape}")
        if data.dtype == np.bool_:
            data = data.astype(np.uint8)
        vals = np.unique(data)
        if not np.all(np.isin(vals, (0, 1))):
            raise ValueError("mask values must be 0 or 1")
        object.__setattr__(self, "data", _freeze(data.astype(np.uint8)))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def foreground_count(self) -> int:
        return int(self.data.sum())


def cast_wrap_uint8(img: ScalarImage2D) -> ByteImage2D:
    """Cast to uint8 with wrap-around (mod 256) semantics.

    Each value is truncated toward zero, then reduced mod 256 into
    [0, 255].  This keeps the historical overflow behaviour of integer
    casts (e.g. -2000 becomes 48) instead of saturating; the wrapped
    image is what the thresholding stage operates on when normalization
    is off.  Total function: any finite input is accepted.
    """
    wrapped = np.mod(np.trunc(img.data), 256.0)
    return ByteImage2D(wrapped.astype(np.uint8))


def window_render(
    img: ScalarImage2D,
    vmin: float | None = None,
    vmax: float | None = None,
) -> ByteImage2D:
    """Linear grayscale display windowing, for display panels only.

    Values <= vmin render black (0) and values >= vmax render white
    (255); values between are mapped linearly.  Absent bounds default to
    the image min/max, emulating an automatic colormap range.  The
    output never feeds the masking path.

    Raises:
        InvalidWindowError: if both bounds are given and vmin >= vmax.
    """
    if vmin is not None and vmax is not None and vmin >= vmax:
        raise InvalidWindowError(f"vmin ({vmin}) must be < vmax ({vmax})")
    data = img.data
    lo = float(data.min()) if vmin is None else float(vmin)
    hi = float(data.max()) if vmax is None else float(vmax)
    if hi <= lo:
        # Degenerate default window (constant image): everything is <= lo.
        return ByteImage2D(np.where(data <= lo, 0, 255).astype(np.uint8))
    scaled = round_half_away((data - lo) * 255.0 / (hi - lo))
    out = np.where(data <= lo, 0.0, np.where(data >= hi, 255.0, np.clip(scaled, 0.0, 255.0)))
    return ByteImage2D(out.astype(np.uint8))
