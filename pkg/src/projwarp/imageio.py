"""8-bit grayscale image files: binary PGM (P5) natively, PNG through Pillow."""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np

from .errors import ImageFormatError


def _pgm_tokens(data: bytes, count: int):
    """First ``count`` header tokens and the offset of the raster."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PGM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise ImageFormatError(f"{path}: not a binary PGM (P5) file")
    (magic, w, h, maxval), pos = _pgm_tokens(data, 4)
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise ImageFormatError(f"{path}: malformed PGM header") from None
    if width < 1 or height < 1:
        raise ImageFormatError(f"{path}: bad PGM size {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(f"{path}: unsupported PGM maxval {maxval} (only 8-bit, 255)")
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise ImageFormatError(f"{path}: truncated PGM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(img, path):
    a = np.ascontiguousarray(img, dtype=np.uint8)
    if a.ndim != 2:
        raise ImageFormatError("only single-channel images can be written")
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (a.shape[1], a.shape[0]))
        fh.write(a.tobytes())


def luma601(rgb) -> np.ndarray:
    """Integer BT.601 luma, rounded half away from zero."""
    rgb = np.asarray(rgb, dtype=np.int64)
    y = (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000
    return y.astype(np.uint8)


def read_png(path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        if im.mode == "L":
            return np.asarray(im, dtype=np.uint8).copy()
        if im.mode in ("I", "I;16", "I;16B", "I;16L", "F") or im.mode.startswith("I;"):
            raise ImageFormatError(f"{path}: unsupported PNG depth (mode {im.mode})")
        if im.mode == "1":
            return np.asarray(im.convert("L"), dtype=np.uint8).copy()
        rgb = np.asarray(im.convert("RGB"))
    warnings.warn(f"{path}: converting {im.mode} image to grayscale (BT.601 luma)")
    return luma601(rgb)


def write_png(img, path):
    from PIL import Image

    Image.fromarray(np.ascontiguousarray(img, dtype=np.uint8), mode="L").save(path)


def load_image(path) -> np.ndarray:
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        return read_png(path)
    return read_pgm(path)


def save_image(img, path):
    if Path(path).suffix.lower() == ".png":
        write_png(img, path)
    else:
        write_pgm(img, path)
