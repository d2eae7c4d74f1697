"""Batch command-line front end for the separation pipeline.

Each input is processed independently: one input failing to load or
segment never stops the others.  Exit codes form a ladder so wrapper
scripts can triage entire batches:

* 0 — every input processed cleanly;
* 1 — at least one input degenerated (constant image) but was handled;
* 2 — at least one input failed outright (unreadable, bad contour rank);
* 3 — usage error (unknown flag, malformed value, bad preset).

``--report`` writes a JSON manifest (schema in MANIFEST_SCHEMA below)
plus a CSV summary next to it, and renders a matplotlib figure for each
2D input alongside the mask.  Display windowing (--vmin/--vmax) only
affects panels and figures, never the mask bytes.
"""

from __future__ import annotations

import argparse
import csv
import glob
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .figures import save_figure
from .image_io import (
    _IMAGE_SUFFIXES,
    load_image,
    load_volume,
    save_mask,
    save_mask_volume,
    save_panel,
)
from .image_model import BinaryMask2D, ScalarImage2D
from .pipeline import (
    MaskPipelineConfig,
    body_mask_2d,
    body_mask_3d,
    pipeline_byte_image,
    render_panel,
)

# JSON schema (draft-07) of the --report manifest: an array with one
# entry per input.  Scalar report fields hold per-slice arrays for
# volumes, with full per-slice detail under "slices"; failed entries
# carry null report fields plus an "error" message.
MANIFEST_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "array",
    "items": {
        "type": "object",
        "required": [
            "input",
            "config",
            "mask_path",
            "panel_path",
            "threshold",
            "degenerate",
            "contour_count",
            "selected_areas",
            "clipped_fraction",
            "warnings",
            "status",
        ],
        "properties": {
            "input": {"type": "string"},
            "config": {"type": "object"},
            "mask_path": {"type": ["string", "null"]},
            "panel_path": {"type": ["string", "null"]},
            "figure_path": {"type": ["string", "null"]},
            "threshold": {
                "type": ["integer", "array", "null"],
                "items": {"type": "integer"},
            },
            "degenerate": {"type": ["boolean", "null"]},
            "contour_count": {"type": ["integer", "null"]},
            "selected_areas": {
                "type": ["array", "null"],
                "items": {"type": "integer"},
            },
            "clipped_fraction": {"type": ["number", "null"]},
            "warnings": {"type": "array", "items": {"type": "string"}},
            "status": {"enum": ["ok", "warned", "failed"]},
            "slices": {"type": "array", "items": {"type": "object"}},
            "error": {"type": "string"},
        },
        "additionalProperties": False,
    },
}

_CSV_COLUMNS = [
    "input",
    "status",
    "threshold",
    "degenerate",
    "contour_count",
    "clipped_fraction",
    "mask_path",
]


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit 3, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(3)


def _contour_list(text: str) -> tuple[int, ...]:
    try:
        numbers = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None
    if not numbers or any(k < 1 for k in numbers):
        raise argparse.ArgumentTypeError("contour numbers must be integers >= 1")
    return numbers


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="bodymask",
        description="Separate the body region from the dark background of "
        "2D/3D grayscale radiological images.",
    )
    parser.add_argument(
        "--input", required=True, help="image file, glob pattern, or directory"
    )
    parser.add_argument(
        "--output-dir", default=".", help="where masks and panels are written"
    )
    parser.add_argument(
        "--normalize",
        choices=("on", "off"),
        default=None,
        help="z-score/outlier-limit path instead of the raw uint8 cast "
        "(default off)",
    )
    parser.add_argument(
        "--limit", type=float, default=None, help="outlier limit (default 3)"
    )
    parser.add_argument(
        "--contour-number",
        type=_contour_list,
        default=None,
        metavar="K[,K...]",
        help="contour ranks to keep, 1 = largest (default: all)",
    )
    parser.add_argument(
        "--thickness",
        type=int,
        default=None,
        help="-1 fills contours (default); n >= 1 strokes outlines",
    )
    parser.add_argument(
        "--plot",
        choices=("on", "off"),
        default=None,
        help="write three-pane panels next to masks (default on)",
    )
    parser.add_argument("--vmin", type=float, default=None, help="display window low")
    parser.add_argument("--vmax", type=float, default=None, help="display window high")
    parser.add_argument(
        "--volume",
        action="store_true",
        help="treat the input as a 3D volume (directory of slices or .raw)",
    )
    parser.add_argument(
        "--slice-axis",
        type=int,
        choices=(0, 1, 2),
        default=None,
        help="axis to slice volumes along (default 0; requires --volume)",
    )
    parser.add_argument(
        "--config",
        default=None,
        metavar="PRESET",
        help="JSON config file or the name of a shipped preset; "
        "explicit flags override its values",
    )
    parser.add_argument(
        "--report",
        default=None,
        metavar="PATH",
        help="write a JSON run manifest here, a CSV summary next to it, "
        "and a figure per 2D input",
    )
    return parser


def available_presets() -> list[str]:
    """Names of the shipped per-modality preset configurations."""
    root = resources.files("bodymask") / "presets"
    return sorted(entry.name[: -len(".json")] for entry in root.iterdir())


def load_preset(name_or_path: str) -> dict:
    """Read a config dict from a JSON file or a shipped preset name."""
    path = Path(name_or_path)
    if path.is_file():
        return json.loads(path.read_text())
    if path.suffix == "" and "/" not in name_or_path:
        shipped = resources.files("bodymask") / "presets" / f"{name_or_path}.json"
        if shipped.is_file():
            return json.loads(shipped.read_text())
    raise ValueError(
        f"no config file or preset named {name_or_path!r} "
        f"(shipped presets: {', '.join(available_presets())})"
    )


def _resolve_config(args, parser: argparse.ArgumentParser) -> MaskPipelineConfig:
    """defaults < preset file < explicit flags."""
    merged: dict = {}
    if args.config is not None:
        try:
            merged.update(load_preset(args.config))
        except (ValueError, OSError, json.JSONDecodeError) as exc:
            parser.error(str(exc))
    overrides = {
        "normalization": args.normalize,
        "limit": args.limit,
        "contour_numbers": args.contour_number,
        "thickness": args.thickness,
        "plot": args.plot,
        "vmin": args.vmin,
        "vmax": args.vmax,
        "slice_axis": args.slice_axis,
    }
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return MaskPipelineConfig.from_dict(merged)
    except (ValueError, TypeError) as exc:
        parser.error(str(exc))


def _expand_inputs(pattern: str) -> list[Path]:
    """A file, a directory of images, or a glob, in sorted order."""
    path = Path(pattern)
    if path.is_dir():
        return sorted(
            p for p in path.iterdir()
            if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
        )
    if glob.has_magic(pattern):
        return [Path(p) for p in sorted(glob.glob(pattern))]
    return [path]


def _failed_entry(source: str, config: MaskPipelineConfig, message: str) -> dict:
    return {
        "input": source,
        "config": config.to_dict(),
        "mask_path": None,
        "panel_path": None,
        "figure_path": None,
        "threshold": None,
        "degenerate": None,
        "contour_count": None,
        "selected_areas": None,
        "clipped_fraction": None,
        "warnings": [],
        "status": "failed",
        "error": message,
    }


def _process_2d(
    path: Path, config: MaskPipelineConfig, out_dir: Path, want_figure: bool
) -> dict:
    img = load_image(path)
    mask, report = body_mask_2d(img, config)
    byte = pipeline_byte_image(img, config)

    mask_path = out_dir / f"{path.stem}_mask.png"
    save_mask(mask, mask_path)

    panel_path = None
    if config.plot:
        panel_path = out_dir / f"{path.stem}_panel.png"
        save_panel(
            render_panel(img, byte, mask, config.vmin, config.vmax), panel_path
        )

    figure_path = None
    if want_figure:
        figure_path = out_dir / f"{path.stem}_figure.png"
        caption = (
            "degenerate input"
            if report.degenerate
            else f"threshold {report.threshold_used}"
        )
        save_figure(
            img, byte, mask, figure_path, config.vmin, config.vmax, title=caption
        )

    entry = {
        "input": str(path),
        "config": config.to_dict(),
        "mask_path": str(mask_path),
        "panel_path": str(panel_path) if panel_path else None,
        "figure_path": str(figure_path) if figure_path else None,
        **report.to_dict(),
        "status": "warned" if report.warnings else "ok",
    }
    return entry


def _process_volume(path: Path, config: MaskPipelineConfig, out_dir: Path) -> dict:
    vol = load_volume(path)
    mask3, reports = body_mask_3d(vol, config)

    stem = path.name if path.is_dir() else path.stem
    mask_dir = out_dir / f"{stem}_mask"
    save_mask_volume(mask3, mask_dir, axis=config.slice_axis)

    panel_dir = None
    if config.plot:
        panel_dir = out_dir / f"{stem}_panels"
        panel_dir.mkdir(parents=True, exist_ok=True)
        for i in range(vol.data.shape[config.slice_axis]):
            piece = ScalarImage2D(
                np.take(vol.data, i, axis=config.slice_axis), vol.source_dtype
            )
            byte = pipeline_byte_image(piece, config)
            mask2 = np.take(mask3.data, i, axis=config.slice_axis)
            panel = render_panel(
                piece, byte, BinaryMask2D(mask2), config.vmin, config.vmax
            )
            save_panel(panel, panel_dir / f"panel_{i:04d}.png")

    warnings = [
        f"slice {i}: {w}" for i, rep in enumerate(reports) for w in rep.warnings
    ]
    entry = {
        "input": str(path),
        "config": config.to_dict(),
        "mask_path": str(mask_dir),
        "panel_path": str(panel_dir) if panel_dir else None,
        "figure_path": None,
        "threshold": [rep.threshold_used for rep in reports],
        "degenerate": any(rep.degenerate for rep in reports),
        "contour_count": sum(rep.contour_count for rep in reports),
        "selected_areas": [],
        "clipped_fraction": None,
        "warnings": warnings,
        "slices": [rep.to_dict() for rep in reports],
        "status": "warned" if warnings else "ok",
    }
    return entry


def _write_report(manifest: list[dict], report_path: Path) -> None:
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(json.dumps(manifest, indent=2) + "\n")
    csv_path = report_path.with_suffix(".csv")
    with csv_path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=_CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for entry in manifest:
            row = {key: entry.get(key) for key in _CSV_COLUMNS}
            if isinstance(row["threshold"], list):
                row["threshold"] = ";".join(str(t) for t in row["threshold"])
            writer.writerow(row)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.slice_axis is not None and not args.volume:
        parser.error("--slice-axis requires --volume")
    config = _resolve_config(args, parser)

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    want_figure = args.report is not None

    manifest: list[dict] = []
    if args.volume:
        targets: list[Path] = [Path(args.input)]
    else:
        targets = _expand_inputs(args.input)
        if not targets:
            manifest.append(
                _failed_entry(args.input, config, "no inputs matched the pattern")
            )

    for target in targets:
        try:
            if args.volume:
                entry = _process_volume(target, config, out_dir)
            else:
                entry = _process_2d(target, config, out_dir, want_figure)
        except Exception as exc:  # isolate per-input failures
            entry = _failed_entry(str(target), config, str(exc))
            print(f"error: {target}: {exc}", file=sys.stderr)
        manifest.append(entry)

    if args.report is not None:
        _write_report(manifest, Path(args.report))

    statuses = {entry["status"] for entry in manifest}
    if "failed" in statuses:
        return 2
    if "warned" in statuses:
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
