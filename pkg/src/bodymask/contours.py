"""Contour extraction, ranking, and rasterization for binary masks.

A contour is a closed walk of pixel coordinates along the boundary of a
connected region: one ``outer`` contour per 8-connected foreground
component and one ``hole`` contour per 4-connected background component
fully enclosed by foreground.  Border following starts at a region's
topmost-then-leftmost pixel and scans neighbors in a fixed rotation
order, so results are deterministic.

Contours are ranked by enclosed area (filled pixel count, boundary
included), largest first; ties break on the topmost-then-leftmost start
pixel.  "Contour number" k refers to the k-th entry of that ranking,
counting from 1.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .image_model import BinaryMask2D
from .morphology import _reachable_background, dilate_chebyshev

FILL = -1

# 8-neighborhood offsets (row, col) starting at West: clockwise and
# counter-clockwise in image coordinates (row grows downward).
_CW = ((0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1))
_CCW = ((0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1))
_CCW_INDEX = {off: i for i, off in enumerate(_CCW)}


class ContourSelectionError(ValueError):
    """Raised when a requested contour number has no matching contour."""


@dataclass(frozen=True)
class Contour:
    """Closed boundary chain of one region.

    Attributes:
        points: (n, 2) int array of (row, col); consecutive points are
            8-adjacent and the last is adjacent to the first.  Pixels
            may repeat where the walk squeezes through 1-px necks.
        kind: "outer" for foreground borders, "hole" for enclosed
            background borders.
        enclosed_area: pixel count of interior plus boundary.
        bbox: (min_row, min_col, max_row, max_col) over the chain.
    """

    points: np.ndarray
    kind: str
    enclosed_area: int
    bbox: tuple[int, int, int, int]

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.int64))
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def start(self) -> tuple[int, int]:
        return int(self.points[0, 0]), int(self.points[0, 1])


def _label_components(region: np.ndarray, eight_connected: bool):
    """BFS labeling of True cells; returns (labels, components).

    ``components`` is a list of (label, start, touches_border) in raster
    discovery order, so ``start`` is each component's topmost-leftmost
    pixel.
    """
    h, w = region.shape
    labels = np.zeros((h, w), dtype=np.int32)
    offsets = _CW if eight_connected else ((0, -1), (-1, 0), (0, 1), (1, 0))
    components = []
    label = 0
    for r0 in range(h):
        for c0 in range(w):
            if not region[r0, c0] or labels[r0, c0]:
                continue
            label += 1
            touches = False
            labels[r0, c0] = label
            queue = deque([(r0, c0)])
            while queue:
                r, c = queue.popleft()
                if r == 0 or r == h - 1 or c == 0 or c == w - 1:
                    touches = True
                for dr, dc in offsets:
                    nr, nc = r + dr, c + dc
                    if 0 <= nr < h and 0 <= nc < w and region[nr, nc] and not labels[nr, nc]:
                        labels[nr, nc] = label
                        queue.append((nr, nc))
            components.append((label, (r0, c0), touches))
    return labels, components


def _trace_border(labels: np.ndarray, label: int, start: tuple[int, int]) -> list[tuple[int, int]]:
    """Follow the border of one labeled region, classic border-following.

    ``start`` must be the region's topmost-leftmost pixel, so its West
    neighbor is guaranteed to lie outside the region.  The first
    neighbor is found clockwise from West; afterwards each step scans
    counter-clockwise from just past the previous pixel.  The walk stops
    when it is about to re-traverse its first edge.
    """
    h, w = labels.shape
    r0, c0 = start

    def inside(r: int, c: int) -> bool:
        return 0 <= r < h and 0 <= c < w and labels[r, c] == label

    first = None
    for dr, dc in _CW:
        if inside(r0 + dr, c0 + dc):
            first = (r0 + dr, c0 + dc)
            break
    if first is None:
        return [(r0, c0)]  # isolated pixel

    chain = [(r0, c0)]
    prev = first
    curr = (r0, c0)
    while True:
        base = _CCW_INDEX[(prev[0] - curr[0], prev[1] - curr[1])]
        nxt = prev  # fallback never used: prev itself is scanned last
        for k in range(1, 9):
            dr, dc = _CCW[(base + k) % 8]
            if inside(curr[0] + dr, curr[1] + dc):
                nxt = (curr[0] + dr, curr[1] + dc)
                break
        if nxt == (r0, c0) and curr == first:
            break
        prev, curr = curr, nxt
        chain.append(curr)
    return chain


def _fill_chain(height: int, width: int, points: np.ndarray) -> np.ndarray:
    """Bool raster of chain plus interior.

    Interior means pixels with no 4-connected path to the image frame
    that avoids the chain; chain points outside the canvas are ignored.
    """
    blocked = np.zeros((height, width), dtype=bool)
    for r, c in np.asarray(points):
        if 0 <= r < height and 0 <= c < width:
            blocked[r, c] = True
    return ~_reachable_background(blocked)


def _make_contour(height: int, width: int, chain: list[tuple[int, int]], kind: str) -> Contour:
    pts = np.array(chain, dtype=np.int64)
    area = int(_fill_chain(height, width, pts).sum())
    bbox = (int(pts[:, 0].min()), int(pts[:, 1].min()), int(pts[:, 0].max()), int(pts[:, 1].max()))
    return Contour(points=pts, kind=kind, enclosed_area=area, bbox=bbox)


def find_contours(mask: BinaryMask2D) -> list[Contour]:
    """All outer and hole contours of the mask, ranked largest first.

    Outer and hole contours share one flat ranking (no hierarchy).  An
    empty mask yields an empty list.
    """
    fg = mask.data.astype(bool)
    h, w = fg.shape
    contours: list[Contour] = []

    labels, comps = _label_components(fg, eight_connected=True)
    for label, start, _ in comps:
        chain = _trace_border(labels, label, start)
        contours.append(_make_contour(h, w, chain, "outer"))

    labels, comps = _label_components(~fg, eight_connected=False)
    for label, start, touches in comps:
        if touches:
            continue  # open background, not a hole
        chain = _trace_border(labels, label, start)
        contours.append(_make_contour(h, w, chain, "hole"))

    contours.sort(key=lambda ct: (-ct.enclosed_area, ct.start))
    return contours


def select_contours(
    contours: list[Contour],
    contour_numbers: list[int] | tuple[int, ...] | None = None,
) -> list[Contour]:
    """Pick contours by rank (1 = largest); None keeps the whole set.

    Selected masks are later combined by union, so asking for [2, 3]
    yields the second- and third-largest contours together.

    Raises:
        ContourSelectionError: if any requested rank is out of range.
    """
    if contour_numbers is None:
        return list(contours)
    selected = []
    for k in contour_numbers:
        if not 1 <= k <= len(contours):
            raise ContourSelectionError(
                f"contour_number {k} out of range: image has {len(contours)} contour(s)"
            )
        selected.append(contours[k - 1])
    return selected


def draw_contours(
    width: int,
    height: int,
    contours: list[Contour],
    thickness: int = FILL,
) -> BinaryMask2D:
    """Rasterize contours onto a fresh canvas.

    With ``thickness == FILL`` (-1, the default) each contour is drawn
    filled (interior plus boundary) and the fills are unioned.  With
    ``thickness >= 1`` only the chains are drawn, dilated by a Chebyshev
    disc of radius ``thickness // 2`` to emulate stroked outlines.

    Raises:
        ValueError: for thickness 0 or < -1.
    """
    if thickness == 0 or thickness < FILL:
        raise ValueError(f"thickness must be -1 (fill) or >= 1, got {thickness}")
    canvas = np.zeros((height, width), dtype=bool)
    if thickness == FILL:
        for ct in contours:
            canvas |= _fill_chain(height, width, ct.points)
        return BinaryMask2D(canvas.astype(np.uint8))
    for ct in contours:
        for r, c in ct.points:
            if 0 <= r < height and 0 <= c < width:
                canvas[r, c] = True
    stroke = BinaryMask2D(canvas.astype(np.uint8))
    return dilate_chebyshev(stroke, thickness // 2)


def contours_to_json(contours: list[Contour]) -> str:
    """Debug dump: list of {kind, area, points=[[row, col], ...]}."""
    return json.dumps(
        [
            {"kind": ct.kind, "area": ct.enclosed_area, "points": ct.points.tolist()}
            for ct in contours
        ]
    )
