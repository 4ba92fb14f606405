"""Inverse-mapping warp, instrumentation and a brute-force reference resampler."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _backend, _core, _vector
from .geometry import (Homography, ScanlineDecomposition, chain_stages, invert, project)
from .kernels import BILINEAR, as_float_image, kernel_args
from .pyramids import MipPyramid, RipMap, build_mipmap, build_ripmap
from .samplers import SamplerConfig


@dataclass
class TapStats:
    pixels_processed: int = 0
    interpolations: int = 0
    interpolation_taps: int = 0
    structure_samples: int = 0
    multiplications: int = 0

    def __iadd__(self, other: "TapStats"):
        self.pixels_processed += other.pixels_processed
        self.interpolations += other.interpolations
        self.interpolation_taps += other.interpolation_taps
        self.structure_samples += other.structure_samples
        self.multiplications += other.multiplications
        return self

    @property
    def taps_per_pixel(self) -> float:
        return self.interpolation_taps / max(self.pixels_processed, 1)

    @property
    def samples_per_pixel(self) -> float:
        return self.structure_samples / max(self.pixels_processed, 1)

    @classmethod
    def from_counters(cls, pixels, cnt):
        # per-row counters are summed in row order, so merging is deterministic
        tot = np.asarray(cnt, dtype=np.int64).reshape(-1, _core.N_COUNTERS).sum(axis=0)
        return cls(int(pixels), int(tot[_core.I_INTERP]), int(tot[_core.I_TAPS]),
                   int(tot[_core.I_SAMPLES]), int(tot[_core.I_MULTS]))


@dataclass
class WarpRequest:
    """Warp ``source`` by ``homography`` (source plane -> output plane)."""

    source: np.ndarray
    homography: Homography
    out_width: int
    out_height: int
    sampler: SamplerConfig = field(default_factory=SamplerConfig)

    def __post_init__(self):
        if self.out_width < 1 or self.out_height < 1:
            raise ValueError(f"output extent must be positive, got {self.out_width}x{self.out_height}")


@dataclass
class Prefilter:
    """Pyramids for one source image, built on first use."""

    source: np.ndarray
    mipmap: Optional[MipPyramid] = None
    ripmap: Optional[RipMap] = None
    build_seconds: float = 0.0

    def ensure(self, cfg: SamplerConfig):
        t0 = time.perf_counter()
        if cfg.needs_mipmap and self.mipmap is None:
            self.mipmap = build_mipmap(self.source)
        if cfg.needs_ripmap and self.ripmap is None:
            self.ripmap = build_ripmap(self.source)
        self.build_seconds += time.perf_counter() - t0
        return self


def _grid_for(cfg: SamplerConfig, source, pre: Optional[Prefilter]):
    if cfg.needs_mipmap:
        p = pre.mipmap
        return (*p.packed, len(p), 1)
    if cfg.needs_ripmap:
        r = pre.ripmap
        return (*r.packed, *r.shape)
    a = as_float_image(source)
    h, w = a.shape
    return (a.ravel(), np.zeros(1, np.int64), np.array([w], np.int64),
            np.array([h], np.int64), 1, 1)


def warp_raw(req: WarpRequest, *, workers: int = 1, backend: Optional[str] = None,
             prefilter: Optional[Prefilter] = None):
    """Like :func:`warp` but returns the float image before quantization."""
    backend = _backend.resolve(backend)
    cfg = req.sampler
    d = ScanlineDecomposition.from_backward(invert(req.homography), req.out_width, req.out_height)
    if cfg.needs_mipmap or cfg.needs_ripmap:
        if prefilter is None:
            prefilter = Prefilter(np.asarray(req.source))
        prefilter.ensure(cfg)
    grid = _grid_for(cfg, req.source, prefilter)
    kargs = kernel_args(cfg.kernel)
    out = np.empty((req.out_height, req.out_width))
    cnt = np.zeros((req.out_height, _core.N_COUNTERS), dtype=np.int64)
    if backend == "numba":
        prev = _backend.set_threads(workers)
        try:
            _core.warp_rows(cfg.code, cfg.n, cfg.seed, *grid, d.ftab, d.gtab, d.p,
                            *kargs, out, cnt)
        finally:
            _backend.set_threads(prev)
    else:
        _vector.warp_rows(cfg.code, cfg.n, cfg.seed, grid, (d.ftab, d.gtab, d.p),
                          kargs, out, cnt, workers=workers)
    return out, TapStats.from_counters(out.size, cnt)


def warp(req: WarpRequest, *, workers: int = 1, backend: Optional[str] = None,
         prefilter: Optional[Prefilter] = None):
    """Warp and quantize; returns ``(uint8 image, TapStats)``."""
    out, stats = warp_raw(req, workers=workers, backend=backend, prefilter=prefilter)
    return _core.quantize(out), stats


def reference_resample(src, h: Homography, out_size, grid: int = 32, block_rows: int = 4):
    """Dense box-filter oracle: ``grid x grid`` bilinear samples per output pixel.

    Independent of the scanline tables and the compiled core: every sample
    is projected directly through the inverse matrix and interpolated with
    plain numpy.
    """
    out_w, out_h = out_size
    a = as_float_image(src)
    ih, iw = a.shape
    hinv = invert(h)
    # raises the same horizon error as the tables when the raster is inadmissible
    ScanlineDecomposition.from_backward(hinv, out_w, out_h)
    offs = (np.arange(grid) + 0.5) / grid - 0.5
    out = np.empty((out_h, out_w))
    xs = np.arange(out_w, dtype=np.float64)
    for r0 in range(0, out_h, block_rows):
        ys = np.arange(r0, min(r0 + block_rows, out_h), dtype=np.float64)
        sy = ys[:, None, None, None] + offs[None, None, :, None]
        sx = xs[None, :, None, None] + offs[None, None, None, :]
        u, v = project(hinv, sx, sy)
        u = np.clip(u, -2.0, iw + 1.0)
        v = np.clip(v, -2.0, ih + 1.0)
        x0 = np.floor(u).astype(np.int64)
        y0 = np.floor(v).astype(np.int64)
        fx, fy = u - x0, v - y0
        xa, xb = np.clip(x0, 0, iw - 1), np.clip(x0 + 1, 0, iw - 1)
        ya, yb = np.clip(y0, 0, ih - 1), np.clip(y0 + 1, 0, ih - 1)
        val = ((1 - fy) * ((1 - fx) * a[ya, xa] + fx * a[ya, xb])
               + fy * ((1 - fx) * a[yb, xa] + fx * a[yb, xb]))
        out[r0:r0 + len(ys)] = val.mean(axis=(2, 3))
    return _core.quantize(out)


@dataclass
class ChainResult:
    image: np.ndarray
    stats: TapStats
    warp_seconds: float
    build_seconds: float


def run_chain(src, hs: Sequence[Homography], cfg: SamplerConfig, *, workers: int = 1,
              backend: Optional[str] = None) -> ChainResult:
    """Warp through ``hs`` in order, re-quantizing between stages.

    Pyramid construction time is accounted separately from warp time.
    """
    src = np.asarray(src, dtype=np.uint8)
    height, width = src.shape
    cur = src
    stats = TapStats()
    warp_s = build_s = 0.0
    for h, out_w, out_h in chain_stages(list(hs), width, height):
        pre = Prefilter(cur).ensure(cfg)
        build_s += pre.build_seconds
        t0 = time.perf_counter()
        cur, st = warp(WarpRequest(cur, h, out_w, out_h, cfg), workers=workers,
                       backend=backend, prefilter=pre)
        warp_s += time.perf_counter() - t0
        stats += st
    return ChainResult(cur, stats, warp_s, build_s)


def warp_chain(src, hs: Sequence[Homography], cfg: SamplerConfig = SamplerConfig("point", 1, 0, BILINEAR),
               **kwargs) -> np.ndarray:
    return run_chain(src, hs, cfg, **kwargs).image
