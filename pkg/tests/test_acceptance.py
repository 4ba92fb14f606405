"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible even when pytest
captures output) before asserting.
"""

import csv
import io
import math
import statistics
import time

import numpy as np
import pytest

from projwarp.bench import BenchConfig, emit_report, method_grid, psnr, run_benchmark, warm_up
from projwarp.corpus import checkerboard
from projwarp.engine import Prefilter, WarpRequest, reference_resample, warp
from projwarp.geometry import Homography, invert
from projwarp.kernels import (ALL_KERNELS, BICUBIC, BILINEAR, BSPLINE, HERMITE, NEAREST,
                              eval_kernel, kernel_values, support_radius)
from projwarp.pyramids import build_mipmap, build_ripmap
from projwarp.samplers import SamplerConfig

pytestmark = pytest.mark.slow

INTERPOLATING = [NEAREST, BILINEAR, BICUBIC, HERMITE]


@pytest.fixture
def verdict(capsys):
    def report(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
                  + (f"  [{detail}]" if detail else ""))
        assert ok, detail
    return report


def test_c01_identity_exactness(verdict):
    img = np.random.default_rng(2024).integers(0, 256, (256, 256)).astype(np.uint8)
    cfgs = [SamplerConfig(m, 16 if m == "fast" else 1, kernel=k)
            for m in ("point", "mip", "rip", "fast") for k in INTERPOLATING]
    warm_up(cfgs)
    t0 = time.perf_counter()
    bad = []
    for cfg in cfgs:
        out, _ = warp(WarpRequest(img, Homography.identity(), 256, 256, cfg))
        if not np.array_equal(out, img):
            bad.append(f"{cfg.token}+{cfg.kernel.token}")
    elapsed = time.perf_counter() - t0
    verdict(1, "identity reproduces a 256x256 image bit-exactly", not bad and elapsed < 1.0,
            f"{len(cfgs)} warps in {elapsed:.3f}s; mismatches: {bad or 'none'}")


def test_c02_kernel_values(verdict):
    cases = [(BICUBIC, 0.5, 0.5625), (BICUBIC, 1.5, -0.0625), (BSPLINE, 0.0, 2 / 3),
             (BSPLINE, 1.0, 1 / 6), (HERMITE, 0.5, 7 / 12), (HERMITE, 1.5, -3 / 32),
             (HERMITE, 2.5, 1 / 96)]
    worst = max(abs(float(eval_kernel(k, s)) - v) for k, s, v in cases)
    verdict(2, "hand-derived kernel values", worst <= 1e-12, f"max error {worst:.2e}")


def test_c03_partition_of_unity(verdict):
    offsets = np.random.default_rng(3).uniform(0, 1, 1000)
    worst = 0.0
    for kern in ALL_KERNELS:
        r = math.ceil(support_radius(kern)) + 1
        ks = np.arange(-r, r + 1)
        sums = kernel_values(kern, offsets[:, None] - ks[None, :]).sum(axis=1)
        worst = max(worst, float(np.abs(sums - 1).max()))
    verdict(3, "kernel weights sum to 1 at 1000 offsets", worst <= 1e-9, f"max error {worst:.2e}")


def test_c04_tap_contracts(verdict):
    img = np.random.default_rng(4).integers(0, 256, (96, 96)).astype(np.uint8)
    h = Homography([[0.8, 0.1, 3.0], [-0.05, 0.9, 2.0], [5e-4, 7e-4, 1.0]])
    got = []
    for kern in ALL_KERNELS:
        _, st = warp(WarpRequest(img, h, 64, 64, SamplerConfig("point", kernel=kern)))
        got.append(st.interpolation_taps / st.interpolations)
    verdict(4, "taps per interpolated point 1/4/16/16/36", got == [1, 4, 16, 16, 36], str(got))


def test_c05_sample_contracts(verdict):
    img = np.random.default_rng(5).integers(0, 256, (256, 256)).astype(np.uint8)
    # strong perspective so FAST sees anisotropy up to and past its cap
    h = Homography([[0.5, 0.0, 0.0], [0.0, 0.05, 0.0], [0.0, 2e-3, 1.0]])
    got = {}
    for m, n in (("point", 1), ("super", 7), ("mip", 1), ("rip", 1), ("fast", 16)):
        _, st = warp(WarpRequest(img, h, 100, 12, SamplerConfig(m, n)))
        got[m] = st.samples_per_pixel
    ok = (got["point"] == 1 and got["super"] == 49 and got["mip"] == 2 and got["rip"] == 4
          and got["fast"] <= 16)
    verdict(5, "samples per pixel 1/49/2/4/<=16", ok, str(got))


def test_c06_memory_contracts(verdict):
    img = np.zeros((512, 512), np.uint8)
    mip = build_mipmap(img).extra_memory_ratio()
    rip = build_ripmap(img).extra_memory_ratio()
    verdict(6, "extra memory at 512x512", 0.333 <= mip <= 0.334 and 2.99 <= rip <= 3.01,
            f"mip {mip:.5f}, rip {rip:.5f}")


def test_c07_quality_orderings(verdict, docs):
    methods = [SamplerConfig("point", kernel=NEAREST), SamplerConfig("point", kernel=BILINEAR),
               SamplerConfig("mip", kernel=BILINEAR), SamplerConfig("fast", 16, kernel=BILINEAR)]
    t0 = time.perf_counter()
    rep = run_benchmark(BenchConfig(seeds=range(5), methods=methods, images=docs))
    elapsed = time.perf_counter() - t0
    pn = rep.row("point", "nearest").psnr_db
    pb = rep.row("point", "bilinear").psnr_db
    mb = rep.row("mip", "bilinear").psnr_db
    fb = rep.row("fast:16", "bilinear").psnr_db
    slack = 0.5
    a, b, c = pb - pn >= 1 - slack, mb <= pb + slack, fb >= mb - slack
    verdict(7, "point+bilinear > point+nearest, mip <= point, FAST >= mip",
            a and b and c and elapsed < 300,
            f"nearest {pn:.2f}, bilinear {pb:.2f}, mip {mb:.2f}, fast {fb:.2f} dB; "
            f"(a) {a} (b) {b} (c) {c}; {elapsed:.0f}s")


def test_c08_timing_orderings(verdict, natural_images):
    src = natural_images["camera"]
    h = Homography([[0.45, 0.05, 10.0], [0.02, 0.5, 5.0], [2e-4, 4e-4, 1.0]])
    pre = Prefilter(src)
    pre.mipmap, pre.ripmap  # build outside the timed region
    names = ("point", "mip", "rip", "fast", "super")
    failures, lines = [], []
    for kern in ALL_KERNELS:
        cfgs = {m: SamplerConfig(m, {"fast": 16, "super": 7}.get(m, 1), kernel=kern)
                for m in names}
        warm_up(cfgs.values())
        times = {m: [] for m in names}
        for _ in range(7):
            # interleaved so drift hits every method alike
            for m, cfg in cfgs.items():
                t0 = time.perf_counter()
                warp(WarpRequest(src, h, 256, 256, cfg), prefilter=pre)
                times[m].append(time.perf_counter() - t0)
        med = {m: statistics.median(v) for m, v in times.items()}
        if not (med["point"] < med["mip"] < med["rip"]
                and med["point"] < med["fast"] < med["super"]):
            failures.append(kern.name)
        lines.append(kern.name + " " + "/".join(f"{med[m] * 1e3:.0f}" for m in names))
    verdict(8, "median time point<mip<rip and point<FAST<super(49)", not failures,
            "ms point/mip/rip/fast/super: " + "; ".join(lines))


def test_c09_oracle_equivalence(verdict, natural_images):
    vals = {}
    for name, img in natural_images.items():
        h, w = img.shape
        ref = reference_resample(img, Homography.scaling(0.25), (w // 4, h // 4))
        sup, _ = warp(WarpRequest(img, Homography.scaling(0.25), w // 4, h // 4,
                                  SamplerConfig("super", 7, kernel=BILINEAR)))
        vals[name] = psnr(sup, ref)
    verdict(9, "super 7x7 bilinear vs reference at 4:1 >= 40 dB", min(vals.values()) >= 40,
            ", ".join(f"{k} {v:.1f} dB" for k, v in vals.items()))


def test_c10_antialiasing(verdict):
    board = checkerboard(256, 256, 2)
    # a 4:1 minification with slight perspective; an exactly axis-aligned 4:1 map
    # lands every point sample on one colour, leaving point sampling nothing to beat
    h = invert(Homography([[4.1, 0.05, 0.3], [0.02, 4.0, 0.2], [2e-4, 1e-4, 1.0]]))
    bad, lines = [], []
    for kern in ALL_KERNELS:
        var = {}
        for m, n in (("point", 1), ("super", 7), ("mip", 1), ("rip", 1), ("fast", 16)):
            out, _ = warp(WarpRequest(board, h, 60, 60, SamplerConfig(m, n, kernel=kern)))
            var[m] = float(out.astype(np.float64).var())
        if not all(var[m] < var["point"] for m in ("super", "mip", "rip", "fast")):
            bad.append(kern.name)
        lines.append(kern.name + " " + "/".join(f"{v:.0f}" for v in var.values()))
    verdict(10, "pre-filtered variance below point sampling on a minified checkerboard",
            not bad, "point/super/mip/rip/fast: " + "; ".join(lines))


def _psnr_column(text):
    return [r["psnr_db"] for r in csv.DictReader(io.StringIO(text))]


def test_c11_determinism(verdict, docs):
    img = docs[0]
    h = Homography([[0.6, 0.07, 2.0], [-0.04, 0.55, 4.0], [8e-4, 1e-3, 1.0]])
    grid = method_grid(seed=11)
    images = {}
    for workers in (1, 1, 4):
        images.setdefault(workers, []).append(
            b"".join(warp(WarpRequest(img, h, 100, 90, cfg), workers=workers)[0].tobytes()
                     for cfg in grid))
    same_images = len({blob for runs in images.values() for blob in runs}) == 1
    cols = [_psnr_column(emit_report(run_benchmark(BenchConfig(
        seeds=[3, 8], methods=grid, images=docs[:2], workers=w)))) for w in (1, 1, 4)]
    same_csv = cols[0] == cols[1] == cols[2]
    verdict(11, "byte-identical images and PSNR columns across runs and worker counts",
            same_images and same_csv, f"images {same_images}, csv {same_csv}")
