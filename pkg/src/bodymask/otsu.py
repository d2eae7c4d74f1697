"""Histogram construction and Otsu's global threshold.

The threshold maximizes the between-class variance

    sigma_b^2(t) = w0 * w1 * (mu0 - mu1)^2

over split points t in [0, 254], where class 0 holds bins <= t and
class 1 holds bins > t.  Splits that leave either class empty are
skipped; ties are broken toward the smallest t.  The argmax comparison
is carried out in exact integer arithmetic (cross-multiplication of the
rational variance expressions) so the tie-break is never at the mercy of
floating-point noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image_model import BinaryMask2D, ByteImage2D


@dataclass(frozen=True)
class ThresholdResult:
    """Otsu threshold plus its between-class variance.

    ``degenerate`` is set when the histogram has a single occupied bin:
    no split separates two classes, the threshold is that bin's value
    and the variance is 0.
    """

    threshold: int
    between_class_variance: float
    degenerate: bool = False


def histogram(img: ByteImage2D) -> np.ndarray:
    """Counts per intensity: a length-256 int64 array."""
    return np.bincount(img.data.ravel(), minlength=256).astype(np.int64)


def otsu_threshold(counts: np.ndarray) -> ThresholdResult:
    """Smallest t in [0, 254] maximizing the between-class variance.

    Args:
        counts: length-256 array of non-negative pixel counts.

    Raises:
        ValueError: if the histogram is malformed or empty.
    """
    counts = np.asarray(counts)
    if counts.shape != (256,):
        raise ValueError(f"expected 256 histogram bins, got shape {counts.shape}")
    if np.any(counts < 0):
        raise ValueError("histogram counts must be non-negative")
    bins = [int(c) for c in counts]
    total = sum(bins)
    if total < 1:
        raise ValueError("empty histogram")

    occupied = [i for i, c in enumerate(bins) if c > 0]
    if len(occupied) == 1:
        return ThresholdResult(occupied[0], 0.0, degenerate=True)

    total_sum = sum(i * c for i, c in enumerate(bins))
    # sigma_b^2(t) = (s0*n1 - s1*n0)^2 / (N^2 * n0 * n1); the N^2 factor is
    # constant, so compare a^2/(n0*n1) exactly with Python integers.
    n0 = 0
    s0 = 0
    best_t = -1
    best_num = -1
    best_den = 1
    for t in range(255):
        n0 += bins[t]
        s0 += t * bins[t]
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        a = s0 * n1 - (total_sum - s0) * n0
        num = a * a
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t = t
            best_num = num
            best_den = den
    variance = best_num / (best_den * total * total)
    return ThresholdResult(best_t, float(variance))


def binarize(img: ByteImage2D, threshold: int) -> BinaryMask2D:
    """Pixels strictly above the threshold become 1, the rest 0."""
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {threshold}")
    return BinaryMask2D((img.data > threshold).astype(np.uint8))
