"""Mip-map chains and rip-map grids built by 2:1 box reduction.

Images are 2-D ``uint8`` arrays indexed ``[row, column]``. Reductions are
carried in float64 and each stored level is rounded to 8 bits, so a stored
level never inherits the rounding of the level above it. Odd trailing
rows/columns are averaged over the pixels that exist.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import _core
from .kernels import as_float_image, kernel_args


def _halve(a: np.ndarray, axis: int) -> np.ndarray:
    n = a.shape[axis]
    if n == 1:
        return a.copy()
    even = a.take(np.arange(0, n, 2), axis=axis)
    odd = a.take(np.arange(1, n, 2), axis=axis)
    out = even.copy()
    m = odd.shape[axis]
    head = [slice(None)] * a.ndim
    head[axis] = slice(0, m)
    head = tuple(head)
    out[head] = (even[head] + odd) * 0.5
    return out


def _round8(a: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(a + 0.5), 0, 255).astype(np.uint8)


def _pack(levels):
    ws = np.array([lv.shape[1] for lv in levels], dtype=np.int64)
    hs = np.array([lv.shape[0] for lv in levels], dtype=np.int64)
    offs = np.zeros(len(levels), dtype=np.int64)
    offs[1:] = np.cumsum(ws * hs)[:-1]
    flat = np.concatenate([lv.ravel().astype(np.float64) for lv in levels])
    return flat, offs, ws, hs


class MipPyramid:
    """Isotropic chain; ``levels[0]`` is the source, each next level half size."""

    def __init__(self, levels):
        self.levels = list(levels)

    def __len__(self):
        return len(self.levels)

    @property
    def max_level(self) -> int:
        return len(self.levels) - 1

    @cached_property
    def packed(self):
        return _pack(self.levels)

    def extra_memory_ratio(self) -> float:
        return sum(lv.size for lv in self.levels[1:]) / self.levels[0].size


class RipMap:
    """Anisotropic grid; ``grid[kx][ky]`` is reduced 2**kx across and 2**ky down."""

    def __init__(self, grid):
        self.grid = [list(col) for col in grid]

    @property
    def shape(self):
        return len(self.grid), len(self.grid[0])

    def entry(self, kx, ky) -> np.ndarray:
        return self.grid[kx][ky]

    @cached_property
    def packed(self):
        return _pack([e for col in self.grid for e in col])

    def extra_memory_ratio(self) -> float:
        total = sum(e.size for col in self.grid for e in col)
        base = self.grid[0][0].size
        return (total - base) / base


def build_mipmap(img) -> MipPyramid:
    src = np.asarray(img)
    cur = as_float_image(src)
    levels = [src.astype(np.uint8, copy=True)]
    while max(cur.shape) > 1:
        cur = _halve(_halve(cur, 1), 0)
        levels.append(_round8(cur))
    return MipPyramid(levels)


def build_ripmap(img) -> RipMap:
    src = np.asarray(img)
    col = as_float_image(src)
    grid = []
    while True:
        entries = []
        cur = col
        while True:
            entries.append(_round8(cur))
            if cur.shape[0] == 1:
                break
            cur = _halve(cur, 0)
        grid.append(entries)
        if col.shape[1] == 1:
            break
        col = _halve(col, 1)
    grid[0][0] = src.astype(np.uint8, copy=True)
    return RipMap(grid)


def sample_mip(p: MipPyramid, u: float, v: float, level: float, k) -> float:
    """Blend the two nearest levels around a real-valued ``level``."""
    flat, offs, ws, hs = p.packed
    code, alpha, lut, bins = kernel_args(k)
    cnt = np.zeros(_core.N_COUNTERS, dtype=np.int64)
    return _core.sample_mip(flat, offs, ws, hs, len(p), float(u), float(v), float(level),
                            code, alpha, lut, bins, np.empty(12), cnt)


def sample_rip(r: RipMap, u: float, v: float, lx: float, ly: float, k) -> float:
    """Bilinear blend of the four grid entries around ``(lx, ly)``."""
    flat, offs, ws, hs = r.packed
    gx, gy = r.shape
    code, alpha, lut, bins = kernel_args(k)
    cnt = np.zeros(_core.N_COUNTERS, dtype=np.int64)
    return _core.sample_rip(flat, offs, ws, hs, gx, gy, float(u), float(v), float(lx), float(ly),
                            code, alpha, lut, bins, np.empty(12), cnt)


def dump_levels(structure, directory, save):
    """Write every level through ``save(array, path)``; returns the paths."""
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    if isinstance(structure, MipPyramid):
        for k, lv in enumerate(structure.levels):
            paths.append(directory / f"mip_{k:02d}.pgm")
            save(lv, paths[-1])
    else:
        gx, gy = structure.shape
        for kx in range(gx):
            for ky in range(gy):
                paths.append(directory / f"rip_{kx:02d}_{ky:02d}.pgm")
                save(structure.entry(kx, ky), paths[-1])
    return paths
