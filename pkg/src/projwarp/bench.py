"""Quality/speed comparison of sampler x kernel pairs on composed warps.

Each image is pushed through a random triple of homographies whose
composition is the identity; the result is compared with the original by
PSNR. Reported time is the warp chain only, pyramid construction is a
separate column.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .corpus import load_corpus
from .engine import TapStats, WarpRequest, run_chain, warp
from .errors import DataError, DegenerateReferenceError
from .geometry import Homography, random_composed_triple
from .kernels import ALL_KERNELS, KERNEL_NAMES, parse_kernel
from .samplers import (DEFAULT_FAST_CAP, DEFAULT_SUPER_GRID, METHODS, SamplerConfig,
                       parse_sampler)

CSV_COLUMNS = ("sampler", "kernel", "time_s", "psnr_db", "taps_per_pixel",
               "samples_per_pixel", "build_time_s")


def psnr(a, b) -> float:
    """PSNR of ``a`` against the reference ``b``; the peak is ``max(b)``.

    Identical images give ``inf``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"PSNR needs equal shapes, got {a.shape} and {b.shape}")
    peak = b.max()
    if peak <= 0:
        raise DegenerateReferenceError("reference image is all zero; PSNR undefined")
    err = np.sum((a - b) ** 2)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(a.size * peak * peak / err)


def method_grid(super_n=DEFAULT_SUPER_GRID, fast_n=DEFAULT_FAST_CAP, seed=0):
    """All 25 sampler x kernel pairs, sampler-major in the usual table order."""
    samplers = [SamplerConfig("point"), SamplerConfig("super", super_n),
                SamplerConfig("mip"), SamplerConfig("rip"), SamplerConfig("fast", fast_n, seed)]
    return [s.with_kernel(k) for s in samplers for k in ALL_KERNELS]


def parse_methods(spec: str) -> List[SamplerConfig]:
    """``all`` or comma-separated ``<sampler>+<kernel>`` pairs."""
    spec = spec.strip()
    if spec == "all":
        return method_grid()
    out = []
    for item in filter(None, (s.strip() for s in spec.split(","))):
        sampler, sep, kernel = item.replace("/", "+").partition("+")
        if not sep:
            raise ValueError(f"method {item!r} must look like <sampler>+<kernel>")
        out.append(parse_sampler(sampler, parse_kernel(kernel)))
    return out


def parse_seeds(spec: str) -> List[int]:
    """``"10"`` means seeds 0..9; ``"3,7,11"`` is an explicit list."""
    spec = spec.strip()
    if "," in spec:
        return [int(s) for s in spec.split(",") if s.strip()]
    return list(range(int(spec)))


def _order(cfg: SamplerConfig):
    return METHODS.index(cfg.method), KERNEL_NAMES.index(cfg.kernel.name)


@dataclass
class BenchConfig:
    seeds: Sequence[int]
    methods: Sequence[SamplerConfig]
    corpus_dir: Optional[Path] = None
    images: Optional[Sequence[Tuple[str, np.ndarray]]] = None
    size: Optional[int] = 128
    repetitions: int = 1
    output_format: str = "csv"
    workers: int = 1
    backend: Optional[str] = None

    def validate(self):
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if not self.methods:
            raise ValueError("at least one method is required")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        if self.images is None and self.corpus_dir is None:
            raise ValueError("either a corpus directory or images are required")
        return self

    def load_images(self):
        if self.images is not None:
            images = [item if isinstance(item, tuple) else (f"image_{i}", item)
                      for i, item in enumerate(self.images)]
        else:
            try:
                images = load_corpus(self.corpus_dir, self.size)
            except OSError as exc:
                raise DataError(f"cannot read corpus {self.corpus_dir}: {exc}") from None
        if not images:
            raise DataError("corpus is empty")
        return images


@dataclass
class BenchRow:
    sampler: str
    kernel: str
    time_s: float
    psnr_db: float
    build_time_s: float
    stats: TapStats = field(default_factory=TapStats)

    @property
    def taps_per_pixel(self):
        return self.stats.taps_per_pixel

    @property
    def samples_per_pixel(self):
        return self.stats.samples_per_pixel


@dataclass
class BenchReport:
    rows: List[BenchRow]

    def row(self, sampler: str, kernel: str) -> BenchRow:
        for r in self.rows:
            if r.sampler == sampler and r.kernel == kernel:
                return r
        raise KeyError((sampler, kernel))


def warm_up(methods, backend=None):
    """Trigger JIT compilation outside the timed region."""
    img = np.zeros((8, 8), np.uint8)
    h = Homography.scaling(0.75)
    for cfg in methods:
        warp(WarpRequest(img, h, 6, 6, cfg), backend=backend)


def run_benchmark(cfg: BenchConfig, progress=None) -> BenchReport:
    cfg.validate()
    images = cfg.load_images()
    methods = sorted(cfg.methods, key=_order)
    warm_up(methods, cfg.backend)
    rows = []
    for m in methods:
        times, psnrs, builds = [], [], []
        stats = TapStats()
        for name, img in images:
            h, w = img.shape
            for seed in cfg.seeds:
                triple = random_composed_triple(seed, (w, h))
                reps = []
                for _ in range(cfg.repetitions):
                    res = run_chain(img, triple, m, workers=cfg.workers, backend=cfg.backend)
                    reps.append(res.warp_seconds)
                times.append(statistics.median(reps))
                builds.append(res.build_seconds)
                # the original is always the reference (peak taken from it)
                psnrs.append(psnr(res.image, img))
                stats += res.stats
        row = BenchRow(m.token, m.kernel.token, float(np.mean(times)), float(np.mean(psnrs)),
                       float(np.mean(builds)), stats)
        rows.append(row)
        if progress is not None:
            progress(row)
    return BenchReport(rows)


def _fmt_psnr_csv(v):
    return "inf" if math.isinf(v) else f"{v:.4f}"


def emit_report(report: BenchReport, fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps([
            {"sampler": r.sampler, "kernel": r.kernel, "time_s": r.time_s,
             "psnr_db": None if math.isinf(r.psnr_db) else r.psnr_db,
             "taps_per_pixel": r.taps_per_pixel, "samples_per_pixel": r.samples_per_pixel,
             "build_time_s": r.build_time_s}
            for r in report.rows], indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        w.writerow([r.sampler, r.kernel, f"{r.time_s:.6f}", _fmt_psnr_csv(r.psnr_db),
                    f"{r.taps_per_pixel:.4f}", f"{r.samples_per_pixel:.4f}",
                    f"{r.build_time_s:.6f}"])
    return buf.getvalue()
