"""Binary hole filling and the Chebyshev dilation used for strokes.

Background connectivity is fixed at 4 (cross-shaped neighborhood): a
cavity that leaks out only through a diagonal gap still counts as a
hole.  Flood fills use an explicit deque, never recursion, so image size
cannot blow the stack.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .image_model import BinaryMask2D


def _reachable_background(foreground: np.ndarray) -> np.ndarray:
    """Background pixels 4-connected to the image border.

    ``foreground`` is a 2D bool array; blocked cells are never entered.
    """
    h, w = foreground.shape
    reached = np.zeros((h, w), dtype=bool)
    queue: deque[tuple[int, int]] = deque()
    for c in range(w):
        for r in (0, h - 1):
            if not foreground[r, c] and not reached[r, c]:
                reached[r, c] = True
                queue.append((r, c))
    for r in range(h):
        for c in (0, w - 1):
            if not foreground[r, c] and not reached[r, c]:
                reached[r, c] = True
                queue.append((r, c))
    while queue:
        r, c = queue.popleft()
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= nr < h and 0 <= nc < w and not foreground[nr, nc] and not reached[nr, nc]:
                reached[nr, nc] = True
                queue.append((nr, nc))
    return reached


def fill_holes(mask: BinaryMask2D) -> BinaryMask2D:
    """Turn every enclosed background region into foreground.

    A background pixel is enclosed when its 4-connected background
    component does not touch the image border.  Idempotent, and never
    removes foreground.
    """
    foreground = mask.data.astype(bool)
    reached = _reachable_background(foreground)
    return BinaryMask2D((foreground | ~reached).astype(np.uint8))


def dilate_chebyshev(mask: BinaryMask2D, radius: int) -> BinaryMask2D:
    """Dilate by a square structuring element of half-width ``radius``.

    Equivalent to a max filter over the (2r+1) x (2r+1) window, clipped
    at the image edges.  Radius 0 is the identity.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    data = mask.data.astype(bool)
    if radius == 0:
        return BinaryMask2D(data.astype(np.uint8))
    # The Chebyshev ball is a square, so the dilation separates per axis.
    out = data.copy()
    for shift in range(1, radius + 1):
        out[shift:, :] |= data[:-shift, :]
        out[:-shift, :] |= data[shift:, :]
    data = out
    out = data.copy()
    for shift in range(1, radius + 1):
        out[:, shift:] |= data[:, :-shift]
        out[:, :-shift] |= data[:, shift:]
    return BinaryMask2D(out.astype(np.uint8))
