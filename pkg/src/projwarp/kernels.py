"""One-dimensional interpolation kernels and separable 2-D evaluation.

Five kernels are supported: nearest pixel, bilinear, bicubic (Keys, with a
free ``alpha``), cubic B-spline and a cubic Hermite spline whose derivative
is the 4-point central difference. The Hermite spline is materialized as
its equivalent stationary 6-tap kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core

KERNEL_NAMES = ("nearest", "bilinear", "bicubic", "bspline", "hermite")
_CODES = {name: code for code, name in enumerate(KERNEL_NAMES)}
SUPPORT = {"nearest": 0.5, "bilinear": 1.0, "bicubic": 2.0, "bspline": 2.0, "hermite": 3.0}

DEFAULT_ALPHA = -0.5
DEFAULT_LUT_BINS = 1024


@dataclass(frozen=True)
class Kernel:
    name: str
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if self.name not in _CODES:
            raise ValueError(f"unknown kernel {self.name!r}; expected one of {KERNEL_NAMES}")
        if not math.isfinite(self.alpha):
            raise ValueError("bicubic alpha must be finite")

    @property
    def code(self) -> int:
        return _CODES[self.name]

    @property
    def support(self) -> float:
        return SUPPORT[self.name]

    @property
    def taps(self) -> int:
        """Pixels read per interpolated point."""
        return _core.TAPS_1D[self.code] ** 2

    @property
    def token(self) -> str:
        if self.name == "bicubic" and self.alpha != DEFAULT_ALPHA:
            return f"bicubic:{self.alpha:g}"
        return self.name

    def __str__(self):
        return self.token


NEAREST = Kernel("nearest")
BILINEAR = Kernel("bilinear")
BICUBIC = Kernel("bicubic")
BSPLINE = Kernel("bspline")
HERMITE = Kernel("hermite")
ALL_KERNELS = (NEAREST, BILINEAR, BICUBIC, BSPLINE, HERMITE)


@dataclass(frozen=True, eq=False)
class KernelLUT:
    """Piecewise-constant kernel table over ``|s|``, looked up by nearest bin.

    Bin ``i`` covers ``[i, i + 1) / bins_per_unit`` and holds the kernel value
    at the bin centre (a bin straddling the support edge uses the centre of
    its in-support part). The kernel is symmetric, so only ``s >= 0`` is
    stored.
    """

    kernel: Kernel
    bins_per_unit: int
    table: np.ndarray = field(repr=False)

    @property
    def name(self) -> str:
        return self.kernel.name

    @property
    def code(self) -> int:
        return self.kernel.code

    @property
    def taps(self) -> int:
        return self.kernel.taps

    @property
    def token(self) -> str:
        return f"{self.kernel.token}@lut{self.bins_per_unit}"

    def __call__(self, s):
        return _core.lut_weight(self.table, self.bins_per_unit, float(s))


def parse_kernel(token: str) -> Kernel:
    """Parse ``nearest | bilinear | bicubic[:alpha] | bspline | hermite``."""
    name, _, arg = token.strip().lower().partition(":")
    if name not in _CODES:
        raise ValueError(f"unknown kernel token {token!r}")
    if not arg:
        return Kernel(name)
    if name != "bicubic":
        raise ValueError(f"kernel {name!r} takes no parameter")
    try:
        return Kernel(name, float(arg))
    except ValueError:
        raise ValueError(f"bad bicubic alpha in {token!r}") from None


def support_radius(k: Kernel) -> float:
    return k.support


def eval_kernel(k: Kernel, s: float) -> float:
    return _core.kernel_weight(k.code, float(k.alpha), float(s))


def kernel_values(k: Kernel, s) -> np.ndarray:
    """Vectorized :func:`eval_kernel`."""
    a = np.abs(np.asarray(s, dtype=np.float64))
    out = np.zeros_like(a)
    name, alpha = k.name, float(k.alpha)
    if name == "nearest":
        out[a < 0.5] = 1.0
    elif name == "bilinear":
        m = a < 1.0
        out[m] = 1.0 - a[m]
    elif name == "bicubic":
        m1, m2 = a < 1.0, (a >= 1.0) & (a < 2.0)
        out[m1] = _core.cubic_inner(a[m1], alpha)
        out[m2] = _core.cubic_outer(a[m2], alpha)
    elif name == "bspline":
        m1, m2 = a < 1.0, (a >= 1.0) & (a < 2.0)
        out[m1] = _core.bspline_inner(a[m1])
        out[m2] = _core.bspline_outer(a[m2])
    else:
        m1, m2, m3 = a < 1.0, (a >= 1.0) & (a < 2.0), (a >= 2.0) & (a < 3.0)
        out[m1] = _core.hermite_inner(a[m1])
        out[m2] = _core.hermite_mid(a[m2])
        out[m3] = _core.hermite_outer(a[m3])
    return out


def build_lut(k: Kernel, bins_per_unit: int = DEFAULT_LUT_BINS) -> KernelLUT:
    if bins_per_unit < 1:
        raise ValueError("bins_per_unit must be >= 1")
    nbins = int(math.ceil(k.support * bins_per_unit))
    lo = np.arange(nbins) / bins_per_unit
    hi = np.minimum((np.arange(nbins) + 1) / bins_per_unit, k.support)
    centres = 0.5 * (lo + hi)
    table = kernel_values(k, centres)
    table.setflags(write=False)
    return KernelLUT(k, int(bins_per_unit), table)


def kernel_args(k):
    """``(code, alpha, lut, bins)`` as consumed by the compiled core."""
    if isinstance(k, KernelLUT):
        return k.code, float(k.kernel.alpha), np.asarray(k.table, dtype=np.float64), k.bins_per_unit
    return k.code, float(k.alpha), np.zeros(1), 0


def as_float_image(img) -> np.ndarray:
    a = np.asarray(img)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a nonempty 2-D image, got shape {a.shape}")
    return np.ascontiguousarray(a, dtype=np.float64)


def interpolate2d(img, k, u: float, v: float, counter=None) -> float:
    """Kernel interpolation of ``img`` at continuous coordinates ``(u, v)``.

    ``u`` indexes columns and ``v`` rows. Out-of-image taps clamp to the
    edge. The result is not clamped to the 8-bit range. Pass a length-4
    int64 array as ``counter`` to collect interpolation/tap counts.
    """
    a = as_float_image(img)
    h, w = a.shape
    code, alpha, lut, bins = kernel_args(k)
    cnt = np.zeros(_core.N_COUNTERS, dtype=np.int64) if counter is None else counter
    return _core.interp(a.ravel(), 0, w, h, float(u), float(v), code, alpha, lut, bins,
                        np.empty(12), cnt)
