"""Matplotlib report figures for the report path.

The pipeline's canonical visual output is the deterministic byte panel
from :func:`bodymask.pipeline.render_panel`; these figures are the
human-friendly companion written next to it when reporting is enabled —
same three panes, but with titles, and rendered through matplotlib.
Everything uses the Agg backend so headless batch runs work.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .image_model import BinaryMask2D, ByteImage2D, ScalarImage2D


def save_figure(
    img: ScalarImage2D,
    byte: ByteImage2D,
    mask: BinaryMask2D,
    path: str | Path,
    vmin: float | None = None,
    vmax: float | None = None,
    title: str | None = None,
) -> None:
    """Render input / uint8 / mask side by side and save to ``path``.

    Args:
        img: the original scalar image, shown with the display window.
        byte: the uint8 image the threshold was computed on.
        mask: the final binary mask.
        path: output file; the extension picks the format (.png, .pdf, ...).
        vmin / vmax: optional display window for the input pane; defaults
            to the image's own range, exactly like the byte panel.
        title: optional figure-level caption (e.g. the threshold used).
    """
    fig, axes = plt.subplots(1, 3, figsize=(9.6, 3.4))
    panes = [
        (img.data, "input", vmin, vmax),
        (byte.data, "uint8", 0, 255),
        (mask.data, "mask", 0, 1),
    ]
    for ax, (data, label, lo, hi) in zip(axes, panes):
        ax.imshow(data, cmap="gray", vmin=lo, vmax=hi, interpolation="nearest")
        ax.set_title(label)
        ax.set_axis_off()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
