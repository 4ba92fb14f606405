"""Per-point kernels shared by the scalar API and the compiled warp loop.

Everything here works on plain floats, ints and flat float64 buffers so it
compiles under numba nopython mode. Images (and pyramid levels) are passed
as one flat buffer plus per-level ``offs``/``ws``/``hs`` arrays; a grid of
levels is addressed as ``kx * gy + ky``; a mip chain is a grid with gy=1 whose
entry k is reduced along both axes.

Counters in ``cnt`` are: interpolations, taps, structure samples,
multiplications.
"""

import math

import numpy as np

from ._backend import jit, parallel_jit, prange

NEAREST, BILINEAR, BICUBIC, BSPLINE, HERMITE = 0, 1, 2, 3, 4
POINT, SUPER, MIP, RIP, FAST = 0, 1, 2, 3, 4

TAPS_1D = (1, 2, 4, 4, 6)
# nominal multiplications per interpolated point; informational, not measured
KERNEL_MULTS = (0, 8, 68, 68, 76)
MAP_MULTS = 2
PREFILTER_MULTS = 5

N_COUNTERS = 4
I_INTERP, I_TAPS, I_SAMPLES, I_MULTS = 0, 1, 2, 3

M32 = 0xFFFFFFFF


# Polynomial pieces, in terms of a = |s|. Plain functions so the numpy path
# can apply them to arrays with the same operation order.

def cubic_inner(a, alpha):
    return ((alpha + 2.0) * a - (alpha + 3.0)) * a * a + 1.0


def cubic_outer(a, alpha):
    return alpha * (((a - 5.0) * a + 8.0) * a - 4.0)


def bspline_inner(a):
    return ((3.0 * a - 6.0) * a * a + 4.0) / 6.0


def bspline_outer(a):
    t = 2.0 - a
    return t * t * t / 6.0


def hermite_inner(a):
    return (4.0 * a - 7.0) * a * a / 3.0 + 1.0


def hermite_mid(a):
    x = a - 1.0
    return x * ((15.0 - 7.0 * x) * x - 8.0) / 12.0


def hermite_outer(a):
    x = a - 2.0
    r = 1.0 - x
    return x * r * r / 12.0


_cubic_inner = jit(cubic_inner)
_cubic_outer = jit(cubic_outer)
_bspline_inner = jit(bspline_inner)
_bspline_outer = jit(bspline_outer)
_hermite_inner = jit(hermite_inner)
_hermite_mid = jit(hermite_mid)
_hermite_outer = jit(hermite_outer)


@jit
def kernel_weight(kcode, alpha, s):
    a = abs(s)
    if kcode == NEAREST:
        return 1.0 if a < 0.5 else 0.0
    if kcode == BILINEAR:
        return 1.0 - a if a < 1.0 else 0.0
    if kcode == BICUBIC:
        if a < 1.0:
            return _cubic_inner(a, alpha)
        if a < 2.0:
            return _cubic_outer(a, alpha)
        return 0.0
    if kcode == BSPLINE:
        if a < 1.0:
            return _bspline_inner(a)
        if a < 2.0:
            return _bspline_outer(a)
        return 0.0
    if a < 1.0:
        return _hermite_inner(a)
    if a < 2.0:
        return _hermite_mid(a)
    if a < 3.0:
        return _hermite_outer(a)
    return 0.0


@jit
def lut_weight(lut, bins, s):
    idx = int(abs(s) * bins)
    if idx < lut.shape[0]:
        return lut[idx]
    return 0.0


@jit
def _clampi(i, n):
    if i < 0:
        return 0
    if i >= n:
        return n - 1
    return i


@jit
def interp(flat, off, w, h, u, v, kcode, alpha, lut, bins, wbuf, cnt):
    """Separable kernel interpolation at (u, v) with clamp-to-edge taps.

    Accumulates ``ref + sum w * (I - ref)`` so constant neighbourhoods come
    back exactly; the weights already sum to one.
    """
    cnt[I_INTERP] += 1
    # far-outside coordinates only ever touch edge pixels
    u = min(max(u, -8.0), w + 8.0)
    v = min(max(v, -8.0), h + 8.0)
    if kcode == NEAREST:
        cnt[I_TAPS] += 1
        ix = _clampi(int(math.floor(u + 0.5)), w)
        iy = _clampi(int(math.floor(v + 0.5)), h)
        return flat[off + iy * w + ix]

    n = TAPS_1D[kcode]
    r = n // 2
    x0 = int(math.floor(u)) - r + 1
    y0 = int(math.floor(v)) - r + 1
    for i in range(n):
        if bins > 0:
            wbuf[i] = lut_weight(lut, bins, u - (x0 + i))
            wbuf[6 + i] = lut_weight(lut, bins, v - (y0 + i))
        else:
            wbuf[i] = kernel_weight(kcode, alpha, u - (x0 + i))
            wbuf[6 + i] = kernel_weight(kcode, alpha, v - (y0 + i))

    ref = flat[off + _clampi(y0 + r - 1, h) * w + _clampi(x0 + r - 1, w)]
    acc = 0.0
    for j in range(n):
        row = off + _clampi(y0 + j, h) * w
        racc = 0.0
        for i in range(n):
            racc += wbuf[i] * (flat[row + _clampi(x0 + i, w)] - ref)
        acc += wbuf[6 + j] * racc
        cnt[I_TAPS] += n
    return ref + acc


@jit
def map_xy(ftab, gtab, p, x, y):
    """Backward-map an output point using the per-axis tables.

    Grid points cost two multiplications and one division; off-grid points
    add the fractional part of each linear form.
    """
    ix = _clampi(int(math.floor(x + 0.5)), ftab.shape[1])
    iy = _clampi(int(math.floor(y + 0.5)), gtab.shape[1])
    fx = x - ix
    fy = y - iy
    d = ftab[2, ix] + p[2, 0] * fx + gtab[2, iy] + p[2, 1] * fy
    q = 1.0 / d
    u = q * (ftab[0, ix] + p[0, 0] * fx + gtab[0, iy] + p[0, 1] * fy)
    v = q * (ftab[1, ix] + p[1, 0] * fx + gtab[1, iy] + p[1, 1] * fy)
    return u, v


@jit
def jacobian_xy(ftab, gtab, p, x, y):
    ix = _clampi(int(math.floor(x + 0.5)), ftab.shape[1])
    iy = _clampi(int(math.floor(y + 0.5)), gtab.shape[1])
    fx = x - ix
    fy = y - iy
    d = ftab[2, ix] + p[2, 0] * fx + gtab[2, iy] + p[2, 1] * fy
    q = 1.0 / d
    u = q * (ftab[0, ix] + p[0, 0] * fx + gtab[0, iy] + p[0, 1] * fy)
    v = q * (ftab[1, ix] + p[1, 0] * fx + gtab[1, iy] + p[1, 1] * fy)
    dudx = (p[0, 0] - u * p[2, 0]) * q
    dudy = (p[0, 1] - u * p[2, 1]) * q
    dvdx = (p[1, 0] - v * p[2, 0]) * q
    dvdy = (p[1, 1] - v * p[2, 1]) * q
    return dudx, dudy, dvdx, dvdy


@jit
def column_norms(ftab, gtab, p, x, y):
    dudx, dudy, dvdx, dvdy = jacobian_xy(ftab, gtab, p, x, y)
    return math.sqrt(dudx * dudx + dvdx * dvdx), math.sqrt(dudy * dudy + dvdy * dvdy)


@jit
def scale_level(rho):
    return math.log2(rho) if rho > 1.0 else 0.0


@jit
def fast_count(rho_x, rho_y, n):
    major = max(rho_x, rho_y, 1.0)
    minor = max(min(rho_x, rho_y), 1.0)
    m = int(math.ceil(major / minor - 1e-9))
    return max(1, min(n, m))


@jit
def _mix32(h):
    h = ((h >> 16) ^ h) * 0x45D9F3B & M32
    h = ((h >> 16) ^ h) * 0x45D9F3B & M32
    return (h >> 16) ^ h


@jit
def jitter(seed, x, y, i):
    """Counter-based uniform in [0, 1) keyed on (seed, x, y, i)."""
    h = _mix32((seed & M32) ^ 0x9E3779B9)
    h = _mix32(h ^ (x & M32))
    h = _mix32(h ^ (y & M32))
    h = _mix32(h ^ (i & M32))
    return h / 4294967296.0


@jit
def sample_grid(flat, offs, ws, hs, k, ex, ey, u, v, kcode, alpha, lut, bins, wbuf, cnt):
    """Interpolate entry ``k``, reduced 2**ex across and 2**ey down, at level-0 (u, v)."""
    if ex > 0:
        u = (u + 0.5) / (1 << ex) - 0.5
    if ey > 0:
        v = (v + 0.5) / (1 << ey) - 0.5
    return interp(flat, offs[k], ws[k], hs[k], u, v, kcode, alpha, lut, bins, wbuf, cnt)


@jit
def sample_mip(flat, offs, ws, hs, nlev, u, v, level, kcode, alpha, lut, bins, wbuf, cnt):
    top = nlev - 1
    level = min(max(level, 0.0), float(top))
    lo = int(math.floor(level))
    hi = min(lo + 1, top)
    t = level - lo
    a = sample_grid(flat, offs, ws, hs, lo, lo, lo, u, v, kcode, alpha, lut, bins, wbuf, cnt)
    b = sample_grid(flat, offs, ws, hs, hi, hi, hi, u, v, kcode, alpha, lut, bins, wbuf, cnt)
    return a + t * (b - a)


@jit
def sample_rip(flat, offs, ws, hs, gx, gy, u, v, lx, ly, kcode, alpha, lut, bins, wbuf, cnt):
    lx = min(max(lx, 0.0), float(gx - 1))
    ly = min(max(ly, 0.0), float(gy - 1))
    x0 = int(math.floor(lx))
    y0 = int(math.floor(ly))
    x1 = min(x0 + 1, gx - 1)
    y1 = min(y0 + 1, gy - 1)
    tx = lx - x0
    ty = ly - y0
    a00 = sample_grid(flat, offs, ws, hs, x0 * gy + y0, x0, y0, u, v, kcode, alpha, lut, bins, wbuf, cnt)
    a10 = sample_grid(flat, offs, ws, hs, x1 * gy + y0, x1, y0, u, v, kcode, alpha, lut, bins, wbuf, cnt)
    a01 = sample_grid(flat, offs, ws, hs, x0 * gy + y1, x0, y1, u, v, kcode, alpha, lut, bins, wbuf, cnt)
    a11 = sample_grid(flat, offs, ws, hs, x1 * gy + y1, x1, y1, u, v, kcode, alpha, lut, bins, wbuf, cnt)
    top = a00 + tx * (a10 - a00)
    bot = a01 + tx * (a11 - a01)
    return top + ty * (bot - top)


@jit
def pixel_value(method, n, seed, flat, offs, ws, hs, gx, gy, ftab, gtab, p,
                xi, yi, kcode, alpha, lut, bins, wbuf, cnt):
    """Pre-quantization value of output pixel (xi, yi) for one sampler."""
    x = float(xi)
    y = float(yi)
    kmul = KERNEL_MULTS[kcode]
    if method == POINT:
        u, v = map_xy(ftab, gtab, p, x, y)
        cnt[I_SAMPLES] += 1
        cnt[I_MULTS] += MAP_MULTS + kmul
        return interp(flat, offs[0], ws[0], hs[0], u, v, kcode, alpha, lut, bins, wbuf, cnt)

    if method == SUPER:
        acc = 0.0
        for j in range(n):
            oy = (j + 0.5) / n - 0.5
            for i in range(n):
                ox = (i + 0.5) / n - 0.5
                u, v = map_xy(ftab, gtab, p, x + ox, y + oy)
                acc += interp(flat, offs[0], ws[0], hs[0], u, v,
                              kcode, alpha, lut, bins, wbuf, cnt)
        cnt[I_SAMPLES] += n * n
        cnt[I_MULTS] += n * n * (MAP_MULTS + kmul)
        return acc / (n * n)

    rho_x, rho_y = column_norms(ftab, gtab, p, x, y)
    if method == MIP:
        u, v = map_xy(ftab, gtab, p, x, y)
        cnt[I_SAMPLES] += 2
        cnt[I_MULTS] += 2 * (MAP_MULTS + PREFILTER_MULTS + kmul)
        return sample_mip(flat, offs, ws, hs, gx, u, v, scale_level(max(rho_x, rho_y)),
                          kcode, alpha, lut, bins, wbuf, cnt)

    if method == RIP:
        u, v = map_xy(ftab, gtab, p, x, y)
        cnt[I_SAMPLES] += 4
        cnt[I_MULTS] += 4 * (MAP_MULTS + PREFILTER_MULTS + kmul)
        return sample_rip(flat, offs, ws, hs, gx, gy, u, v,
                          scale_level(rho_x), scale_level(rho_y),
                          kcode, alpha, lut, bins, wbuf, cnt)

    # FAST: jittered strata along the major axis at the minor-axis level
    level = scale_level(min(rho_x, rho_y))
    m = fast_count(rho_x, rho_y, n)
    cnt[I_SAMPLES] += m
    cnt[I_MULTS] += m * (MAP_MULTS + PREFILTER_MULTS + 2 * kmul)
    if m == 1:
        u, v = map_xy(ftab, gtab, p, x, y)
        return sample_mip(flat, offs, ws, hs, gx, u, v, level,
                          kcode, alpha, lut, bins, wbuf, cnt)
    ax = 1.0 if rho_x >= rho_y else 0.0
    ay = 1.0 - ax
    acc = 0.0
    for i in range(m):
        o = (i + jitter(seed, xi, yi, i)) / m - 0.5
        u, v = map_xy(ftab, gtab, p, x + o * ax, y + o * ay)
        acc += sample_mip(flat, offs, ws, hs, gx, u, v, level,
                          kcode, alpha, lut, bins, wbuf, cnt)
    return acc / m


@parallel_jit
def warp_rows(method, n, seed, flat, offs, ws, hs, gx, gy, ftab, gtab, p,
              kcode, alpha, lut, bins, out, cnt):
    """Fill ``out`` (float64, H x W) row-parallel; ``cnt`` is (H, N_COUNTERS)."""
    height, width = out.shape
    for yi in prange(height):
        wbuf = np.empty(12)
        c = cnt[yi]
        for xi in range(width):
            out[yi, xi] = pixel_value(method, n, seed, flat, offs, ws, hs, gx, gy,
                                      ftab, gtab, p, xi, yi, kcode, alpha, lut, bins,
                                      wbuf, c)


def quantize(values):
    """Round half away from zero, then clamp to the 8-bit range."""
    values = np.asarray(values, dtype=np.float64)
    r = np.sign(values) * np.floor(np.abs(values) + 0.5)
    return np.clip(r, 0, 255).astype(np.uint8)
