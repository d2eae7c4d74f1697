"""Reading and writing the pixel formats the pipeline consumes.

Three formats cover every supported source dtype:

* PGM (P2 ASCII or P5 binary, maxval up to 65535) for unsigned data;
* grayscale PNG, 8- or 16-bit, via Pillow;
* ``.raw`` little-endian pixel dumps with an adjacent ``.json`` sidecar
  describing width/height (and depth for volumes) plus the dtype, which
  is the only route for signed int16 and float64 data.

Loading never rescales values — normalization is an explicit pipeline
stage, not an I/O side effect.  DICOM/NIfTI are out of scope; convert
clinical data to one of the above first.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from .image_model import BinaryMask2D, ByteImage2D, ScalarImage2D
from .pipeline import BinaryMask3D, Volume3D

_RAW_DTYPES = {
    "uint8": np.dtype("u1"),
    "uint16": np.dtype("<u2"),
    "int16": np.dtype("<i2"),
    "float64": np.dtype("<f8"),
}
_IMAGE_SUFFIXES = (".pgm", ".png", ".raw")

# Pillow modes we accept as grayscale; anything else (RGB, palette, ...)
# is rejected rather than silently converted.
_GRAY_PNG_MODES = ("L", "I", "I;16", "I;16B")


# --------------------------------------------------------------------------
# loading


def load_image(path: str | Path) -> ScalarImage2D:
    """Load a single 2D grayscale image.

    Args:
        path: a ``.pgm``, ``.png``, or ``.raw`` file (the latter with an
            adjacent ``.json`` sidecar).

    Returns:
        The image with ``source_dtype`` recorded from the file: PGM/PNG
        with maxval <= 255 load as uint8, deeper ones as uint16, raw
        files as whatever the sidecar declares.

    Raises:
        ValueError: unsupported format, color PNG, malformed or
            truncated file, sidecar mismatch, or non-finite float data.
        FileNotFoundError: missing file or sidecar.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        data, tag = _read_pgm(path)
    elif suffix == ".png":
        data, tag = _read_png(path)
    elif suffix == ".raw":
        data, tag, depth = _read_raw(path)
        if depth is not None and depth != 1:
            raise ValueError(
                f"{path}: sidecar declares a volume (depth={depth}); use load_volume"
            )
        if data.ndim == 3:
            data = data[0]
    else:
        raise ValueError(f"{path}: unsupported image format {suffix!r}")
    return ScalarImage2D(data, tag)


def load_volume(path: str | Path) -> Volume3D:
    """Load a 3D volume from a directory of slices or a raw dump.

    A directory is read as one 2D image per file in lexicographic name
    order, stacked along axis 0; all slices must agree on dimensions
    and dtype.  A ``.raw`` file needs ``depth`` in its sidecar.

    Raises:
        ValueError: empty directory, inconsistent slices (the message
            names the offending file), or a raw sidecar without depth.
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(
            p for p in path.iterdir()
            if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
        )
        if not files:
            raise ValueError(f"{path}: no image files found")
        first = load_image(files[0])
        slices = [first.data]
        for p in files[1:]:
            img = load_image(p)
            if img.data.shape != first.data.shape:
                raise ValueError(
                    f"{p}: slice dimensions {img.data.shape} do not match "
                    f"{files[0].name} {first.data.shape}"
                )
            if img.source_dtype != first.source_dtype:
                raise ValueError(
                    f"{p}: slice dtype {img.source_dtype} does not match "
                    f"{files[0].name} {first.source_dtype}"
                )
            slices.append(img.data)
        return Volume3D(np.stack(slices, axis=0), first.source_dtype)
    if path.suffix.lower() == ".raw":
        data, tag, depth = _read_raw(path)
        if depth is None:
            raise ValueError(f"{path}: sidecar has no depth; use load_image for 2D")
        return Volume3D(data, tag)
    raise ValueError(f"{path}: expected a directory or a .raw file")


def _read_pgm(path: Path) -> tuple[np.ndarray, str]:
    blob = path.read_bytes()
    magic, pos = _pgm_token(blob, 0, path)
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"{path}: not a PGM file (magic {magic!r})")
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _pgm_token(blob, pos, path)
        try:
            fields.append(int(token))
        except ValueError:
            raise ValueError(f"{path}: bad PGM {name} {token!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ValueError(f"{path}: bad PGM dimensions {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise ValueError(f"{path}: PGM maxval {maxval} outside [1, 65535]")

    if magic == b"P5":
        # Exactly one whitespace byte separates the header from the raster.
        pos += 1
        dtype = np.dtype("u1") if maxval <= 255 else np.dtype(">u2")
        needed = width * height * dtype.itemsize
        raster = blob[pos : pos + needed]
        if len(raster) < needed:
            raise ValueError(
                f"{path}: truncated PGM raster ({len(raster)} of {needed} bytes)"
            )
        data = np.frombuffer(raster, dtype=dtype).reshape(height, width)
    else:
        values = []
        for _ in range(width * height):
            try:
                token, pos = _pgm_token(blob, pos, path)
            except ValueError:
                raise ValueError(
                    f"{path}: truncated PGM raster ({len(values)} of "
                    f"{width * height} values)"
                ) from None
            values.append(int(token))
        data = np.array(values, dtype=np.int64).reshape(height, width)
    if data.min() < 0 or data.max() > maxval:
        raise ValueError(f"{path}: pixel value outside [0, maxval={maxval}]")
    return data, ("uint8" if maxval <= 255 else "uint16")


def _pgm_token(blob: bytes, pos: int, path: Path) -> tuple[bytes, int]:
    """Next whitespace-delimited header token, skipping # comments."""
    n = len(blob)
    while pos < n:
        c = blob[pos]
        if c in b" \t\r\n":
            pos += 1
        elif c == ord("#"):
            while pos < n and blob[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and blob[pos] not in b" \t\r\n":
        pos += 1
    if start == pos:
        raise ValueError(f"{path}: truncated PGM header")
    return blob[start:pos], pos


def _read_png(path: Path) -> tuple[np.ndarray, str]:
    with Image.open(path) as im:
        mode = im.mode
        if mode not in _GRAY_PNG_MODES:
            raise ValueError(
                f"{path}: PNG mode {mode!r} is not grayscale "
                f"(expected one of {_GRAY_PNG_MODES})"
            )
        data = np.asarray(im)
    if mode == "L":
        return data, "uint8"
    if data.min() < 0 or data.max() > 65535:
        raise ValueError(f"{path}: PNG values outside the uint16 range")
    return data, "uint16"


def _read_raw(path: Path) -> tuple[np.ndarray, str, int | None]:
    sidecar = path.with_suffix(".json")
    if not sidecar.exists():
        raise FileNotFoundError(f"{path}: missing sidecar {sidecar}")
    meta = json.loads(sidecar.read_text())
    known = {"width", "height", "depth", "dtype"}
    unknown = set(meta) - known
    if unknown:
        raise ValueError(f"{sidecar}: unknown sidecar keys {sorted(unknown)}")
    for key in ("width", "height"):
        if not isinstance(meta.get(key), int) or meta[key] < 1:
            raise ValueError(f"{sidecar}: {key} must be a positive integer")
    depth = meta.get("depth")
    if depth is not None and (not isinstance(depth, int) or depth < 1):
        raise ValueError(f"{sidecar}: depth must be a positive integer")
    tag = meta.get("dtype")
    if tag not in _RAW_DTYPES:
        raise ValueError(
            f"{sidecar}: dtype must be one of {sorted(_RAW_DTYPES)}, got {tag!r}"
        )
    width, height = meta["width"], meta["height"]
    dtype = _RAW_DTYPES[tag]
    expected = width * height * (depth or 1) * dtype.itemsize
    blob = path.read_bytes()
    if len(blob) != expected:
        raise ValueError(
            f"{path}: {len(blob)} bytes on disk but sidecar implies {expected}"
        )
    data = np.frombuffer(blob, dtype=dtype)
    if tag == "float64" and not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: float64 data contains NaN or Inf")
    if depth is None:
        return data.reshape(height, width), tag, None
    return data.reshape(depth, height, width), tag, depth


# --------------------------------------------------------------------------
# saving


def save_mask(mask: BinaryMask2D, path: str | Path) -> None:
    """Write a binary mask as 8-bit grayscale with values {0, 255}.

    The extension picks the codec: ``.png`` or ``.pgm``.  Loading the
    file back and dividing by 255 recovers the mask bit-exactly.
    """
    _write_gray(mask.data * np.uint8(255), Path(path))


def save_panel(panel: ByteImage2D, path: str | Path) -> None:
    """Write a rendered panel (any uint8 raster) as ``.png`` or ``.pgm``."""
    _write_gray(panel.data, Path(path))


def save_image(img: ScalarImage2D, path: str | Path) -> None:
    """Write a scalar image; mostly used to build fixtures and phantoms.

    uint8/uint16 images may go to ``.pgm`` or ``.png``; int16 and
    float64 require ``.raw`` (a sidecar is written alongside).
    """
    path = Path(path)
    if path.suffix.lower() == ".raw":
        _write_raw(img.data, img.source_dtype, path, depth=None)
        return
    if img.source_dtype == "uint8":
        _write_gray(img.data.astype(np.uint8), path)
    elif img.source_dtype == "uint16":
        _write_gray(img.data.astype(np.uint16), path)
    else:
        raise ValueError(
            f"{path}: {img.source_dtype} images must be saved as .raw"
        )


def save_volume(vol: Volume3D, path: str | Path) -> None:
    """Write a volume as ``.raw`` plus sidecar (depth = axis-0 extent)."""
    path = Path(path)
    if path.suffix.lower() != ".raw":
        raise ValueError(f"{path}: volumes are saved as .raw")
    _write_raw(vol.data, vol.source_dtype, path, depth=vol.data.shape[0])


def save_mask_volume(
    mask: BinaryMask3D, directory: str | Path, axis: int = 0
) -> list[Path]:
    """Write a 3D mask as numbered per-slice files mask_0000.png, ...

    Slices are taken along ``axis`` (the pipeline's slice axis) and the
    directory is created if needed.  Returns the written paths in slice
    order.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(mask.data.shape[axis]):
        piece = np.take(mask.data, i, axis=axis)
        out = directory / f"mask_{i:04d}.png"
        save_mask(BinaryMask2D(piece), out)
        paths.append(out)
    return paths


def _write_gray(data: np.ndarray, path: Path) -> None:
    suffix = path.suffix.lower()
    if suffix == ".png":
        Image.fromarray(data).save(path)
    elif suffix == ".pgm":
        maxval = 255 if data.dtype == np.uint8 else 65535
        header = f"P5\n{data.shape[1]} {data.shape[0]}\n{maxval}\n".encode("ascii")
        raster = data.tobytes() if maxval == 255 else data.astype(">u2").tobytes()
        path.write_bytes(header + raster)
    else:
        raise ValueError(f"{path}: unsupported extension {suffix!r} (use .png or .pgm)")


def _write_raw(
    data: np.ndarray, tag: str, path: Path, depth: int | None
) -> None:
    sidecar = {"width": data.shape[-1], "height": data.shape[-2], "dtype": tag}
    if depth is not None:
        sidecar["depth"] = depth
    path.write_bytes(data.astype(_RAW_DTYPES[tag]).tobytes())
    path.with_suffix(".json").write_text(json.dumps(sidecar) + "\n")
