"""Synthetic test images: document-like pages, checkerboards, zone plates."""

from __future__ import annotations

import string
from pathlib import Path

import numpy as np

from .imageio import load_image, save_image

IMAGE_SUFFIXES = (".pgm", ".png")


def checkerboard(width, height, period=2, low=0, high=255) -> np.ndarray:
    """Checkerboard whose cells are ``period // 2`` pixels wide."""
    cell = max(period // 2, 1)
    yy, xx = np.mgrid[0:height, 0:width]
    return np.where(((xx // cell) + (yy // cell)) % 2 == 0, high, low).astype(np.uint8)


def zone_plate(size, k=None) -> np.ndarray:
    """Radial chirp ``cos(k r^2)``; the default ``k`` reaches Nyquist at the corners."""
    c = (size - 1) / 2.0
    # local frequency is 2 k r radians per pixel
    k = np.pi / (2.0 * c * np.sqrt(2.0)) if k is None else k
    yy, xx = np.mgrid[0:size, 0:size] - c
    return np.floor(127.5 + 127.5 * np.cos(k * (xx * xx + yy * yy)) + 0.5).astype(np.uint8)


def document_image(size=128, seed=0) -> np.ndarray:
    """Dark text lines on a light, slightly uneven page."""
    from PIL import Image, ImageDraw, ImageFont

    rng = np.random.default_rng(seed)
    scale = 4
    big = size * scale
    page = Image.new("L", (big, big), int(rng.integers(215, 250)))
    draw = ImageDraw.Draw(page)
    font_px = int(rng.integers(9, 14)) * scale
    try:
        font = ImageFont.load_default(size=font_px)
    except TypeError:
        font = ImageFont.load_default()
    alphabet = string.ascii_letters + string.digits + "  .,"
    y = int(rng.integers(2, 8)) * scale
    margin = int(rng.integers(3, 10)) * scale
    while y < big - font_px:
        line = "".join(rng.choice(list(alphabet), size=int(rng.integers(18, 40))))
        ink = int(rng.integers(0, 70))
        draw.text((margin, y), line, fill=ink, font=font)
        if rng.random() < 0.2:
            draw.line([(margin, y + font_px + scale), (big - margin, y + font_px + scale)],
                      fill=ink, width=scale)
        y += int(font_px * rng.uniform(1.3, 1.8))
    # box-downsample the oversampled page to the target size
    a = np.asarray(page, dtype=np.float64).reshape(size, scale, size, scale).mean(axis=(1, 3))
    a += rng.normal(0.0, 2.0, a.shape)
    return np.clip(np.floor(a + 0.5), 0, 255).astype(np.uint8)


def document_corpus(count=5, size=128, seed=0):
    return [document_image(size, seed * 1000 + i) for i in range(count)]


def write_corpus(images, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, img in enumerate(images):
        paths.append(directory / f"img_{i:03d}.pgm")
        save_image(img, paths[-1])
    return paths


def center_crop(img, size):
    h, w = img.shape
    if size is None or (h <= size and w <= size):
        return img
    ch, cw = min(h, size), min(w, size)
    y0, x0 = (h - ch) // 2, (w - cw) // 2
    return img[y0:y0 + ch, x0:x0 + cw].copy()


def load_corpus(directory, size=None):
    directory = Path(directory)
    paths = sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    return [(p.name, center_crop(load_image(p), size)) for p in paths]
