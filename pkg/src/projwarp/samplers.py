"""Sampling strategies: where, and how densely, each output pixel is sampled.

``point``   one sample at the pixel centre
``super``   an n x n box-filtered grid
``mip``     one blended sample from the mip level matching the local scale
``rip``     one blended sample from the rip-map entry matching each axis
``fast``    up to n jittered mip samples along the major axis of anisotropy

The functions here evaluate a single output pixel and return the value
before quantization; whole images go through :func:`projwarp.engine.warp`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from . import _core
from .geometry import JacobianEstimate, ScanlineDecomposition, jacobian
from .kernels import BILINEAR, Kernel, KernelLUT, as_float_image, kernel_args
from .pyramids import MipPyramid, RipMap

METHODS = ("point", "super", "mip", "rip", "fast")
_METHOD_CODES = {name: code for code, name in enumerate(METHODS)}

DEFAULT_SUPER_GRID = 7
DEFAULT_FAST_CAP = 16


@dataclass(frozen=True)
class SamplerConfig:
    method: str = "point"
    n: int = 1
    seed: int = 0
    kernel: Union[Kernel, KernelLUT] = BILINEAR

    def __post_init__(self):
        if self.method not in _METHOD_CODES:
            raise ValueError(f"unknown sampler {self.method!r}; expected one of {METHODS}")
        if self.n < 1:
            raise ValueError("sample grid / cap must be >= 1")

    @property
    def code(self) -> int:
        return _METHOD_CODES[self.method]

    @property
    def needs_mipmap(self) -> bool:
        return self.method in ("mip", "fast")

    @property
    def needs_ripmap(self) -> bool:
        return self.method == "rip"

    @property
    def token(self) -> str:
        if self.method == "super":
            return f"super:{self.n}"
        if self.method == "fast":
            return f"fast:{self.n}" + (f":{self.seed}" if self.seed else "")
        return self.method

    def with_kernel(self, kernel) -> "SamplerConfig":
        return SamplerConfig(self.method, self.n, self.seed, kernel)

    def nominal_samples(self):
        """Structure samples per pixel (an upper bound for ``fast``)."""
        return {"point": 1, "super": self.n * self.n, "mip": 2, "rip": 4, "fast": self.n}[self.method]


def parse_sampler(token: str, kernel=BILINEAR) -> SamplerConfig:
    """Parse ``point | super:<n> | mip | rip | fast:<n>[:seed]``."""
    parts = token.strip().lower().split(":")
    name, args = parts[0], parts[1:]
    try:
        nums = [int(a) for a in args]
    except ValueError:
        raise ValueError(f"bad sampler token {token!r}") from None
    if name in ("point", "mip", "rip") and not nums:
        return SamplerConfig(name, 1, 0, kernel)
    if name == "super" and len(nums) <= 1:
        return SamplerConfig("super", nums[0] if nums else DEFAULT_SUPER_GRID, 0, kernel)
    if name == "fast" and len(nums) <= 2:
        n = nums[0] if nums else DEFAULT_FAST_CAP
        seed = nums[1] if len(nums) > 1 else 0
        return SamplerConfig("fast", n, seed, kernel)
    raise ValueError(f"bad sampler token {token!r}")


class FootprintEstimate(NamedTuple):
    jac: JacobianEstimate
    rho_x: float
    rho_y: float
    scale: float
    minor_scale: float
    major_axis: tuple


def footprint(d: ScanlineDecomposition, x: float, y: float) -> FootprintEstimate:
    """Local stretch of the backward map along each output axis."""
    j = jacobian(d, x, y)
    rho_x = math.hypot(j.du_dx, j.dv_dx)
    rho_y = math.hypot(j.du_dy, j.dv_dy)
    axis = (1.0, 0.0) if rho_x >= rho_y else (0.0, 1.0)
    return FootprintEstimate(j, rho_x, rho_y, max(rho_x, rho_y), min(rho_x, rho_y), axis)


def mip_level(fp: FootprintEstimate) -> float:
    return _core.scale_level(fp.scale)


def rip_levels(fp: FootprintEstimate):
    return _core.scale_level(fp.rho_x), _core.scale_level(fp.rho_y)


def fast_samples(fp: FootprintEstimate, cap: int) -> int:
    return _core.fast_count(fp.rho_x, fp.rho_y, cap)


def _single(img):
    a = as_float_image(img)
    h, w = a.shape
    return (a.ravel(), np.zeros(1, np.int64), np.array([w], np.int64),
            np.array([h], np.int64), 1, 1)


def _evaluate(grid, d: ScanlineDecomposition, x, y, cfg: SamplerConfig, counter=None):
    if int(x) != x or int(y) != y:
        raise ValueError("sampler evaluation takes integer output pixel coordinates")
    d.check_extent(x, y)
    flat, offs, ws, hs, gx, gy = grid
    code, alpha, lut, bins = kernel_args(cfg.kernel)
    cnt = np.zeros(_core.N_COUNTERS, dtype=np.int64) if counter is None else counter
    return _core.pixel_value(cfg.code, cfg.n, cfg.seed, flat, offs, ws, hs, gx, gy,
                             d.ftab, d.gtab, d.p, int(x), int(y), code, alpha, lut, bins,
                             np.empty(12), cnt)


def _mip_grid(p: MipPyramid):
    return (*p.packed, len(p), 1)


def _rip_grid(r: RipMap):
    return (*r.packed, *r.shape)


def sample_point(img, d, x, y, cfg: SamplerConfig, counter=None) -> float:
    return _evaluate(_single(img), d, x, y, SamplerConfig("point", 1, 0, cfg.kernel), counter)


def sample_supersample(img, d, x, y, cfg: SamplerConfig, counter=None) -> float:
    return _evaluate(_single(img), d, x, y, SamplerConfig("super", cfg.n, 0, cfg.kernel), counter)


def sample_mipmap_prefiltered(p: MipPyramid, d, x, y, cfg: SamplerConfig, counter=None) -> float:
    return _evaluate(_mip_grid(p), d, x, y, SamplerConfig("mip", 1, 0, cfg.kernel), counter)


def sample_ripmap_prefiltered(r: RipMap, d, x, y, cfg: SamplerConfig, counter=None) -> float:
    return _evaluate(_rip_grid(r), d, x, y, SamplerConfig("rip", 1, 0, cfg.kernel), counter)


def sample_fast(p: MipPyramid, d, x, y, cfg: SamplerConfig, counter=None) -> float:
    return _evaluate(_mip_grid(p), d, x, y,
                     SamplerConfig("fast", cfg.n, cfg.seed, cfg.kernel), counter)
