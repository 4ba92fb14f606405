"""Pure-numpy warp path, vectorized over the pixels of a block of rows.

Mirrors :mod:`projwarp._core` expression for expression so both backends
agree to the last bit wherever libm does.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _core
from ._core import (BICUBIC, BILINEAR, BSPLINE, FAST, I_INTERP, I_MULTS, I_SAMPLES, I_TAPS,
                    KERNEL_MULTS, MAP_MULTS, MIP, NEAREST, POINT, PREFILTER_MULTS, RIP, SUPER,
                    TAPS_1D)

ROW_BLOCK = 16

# np.log2 is off by an ulp from libm now and then; the compiled path uses libm
_log2 = np.frompyfunc(math.log2, 1, 1)


def _clip(i, n):
    return np.clip(i, 0, n - 1)


def weights(kcode, alpha, s, lut, bins):
    a = np.abs(s)
    if bins > 0:
        idx = (a * bins).astype(np.int64)
        ok = idx < lut.shape[0]
        return np.where(ok, lut[np.minimum(idx, lut.shape[0] - 1)], 0.0)
    out = np.zeros_like(a)
    if kcode == NEAREST:
        out[a < 0.5] = 1.0
    elif kcode == BILINEAR:
        m = a < 1.0
        out[m] = 1.0 - a[m]
    elif kcode in (BICUBIC, BSPLINE):
        m1, m2 = a < 1.0, (a >= 1.0) & (a < 2.0)
        if kcode == BICUBIC:
            out[m1] = _core.cubic_inner(a[m1], alpha)
            out[m2] = _core.cubic_outer(a[m2], alpha)
        else:
            out[m1] = _core.bspline_inner(a[m1])
            out[m2] = _core.bspline_outer(a[m2])
    else:
        m1, m2, m3 = a < 1.0, (a >= 1.0) & (a < 2.0), (a >= 2.0) & (a < 3.0)
        out[m1] = _core.hermite_inner(a[m1])
        out[m2] = _core.hermite_mid(a[m2])
        out[m3] = _core.hermite_outer(a[m3])
    return out


def interp(flat, off, w, h, u, v, kcode, alpha, lut, bins, cnt):
    cnt[I_INTERP] += u.size
    u = np.minimum(np.maximum(u, -8.0), w + 8.0)
    v = np.minimum(np.maximum(v, -8.0), h + 8.0)
    if kcode == NEAREST:
        cnt[I_TAPS] += u.size
        ix = _clip(np.floor(u + 0.5).astype(np.int64), w)
        iy = _clip(np.floor(v + 0.5).astype(np.int64), h)
        return flat[off + iy * w + ix]
    n = TAPS_1D[kcode]
    r = n // 2
    x0 = np.floor(u).astype(np.int64) - r + 1
    y0 = np.floor(v).astype(np.int64) - r + 1
    wx = [weights(kcode, alpha, u - (x0 + i), lut, bins) for i in range(n)]
    wy = [weights(kcode, alpha, v - (y0 + j), lut, bins) for j in range(n)]
    cols = [_clip(x0 + i, w) for i in range(n)]
    ref = flat[off + _clip(y0 + r - 1, h) * w + cols[r - 1]]
    acc = np.zeros_like(u)
    for j in range(n):
        row = off + _clip(y0 + j, h) * w
        racc = np.zeros_like(u)
        for i in range(n):
            racc += wx[i] * (flat[row + cols[i]] - ref)
        acc += wy[j] * racc
    cnt[I_TAPS] += u.size * n * n
    return ref + acc


def map_xy(ftab, gtab, p, x, y):
    ix = _clip(np.floor(x + 0.5).astype(np.int64), ftab.shape[1])
    iy = _clip(np.floor(y + 0.5).astype(np.int64), gtab.shape[1])
    fx = x - ix
    fy = y - iy
    d = ftab[2, ix] + p[2, 0] * fx + gtab[2, iy] + p[2, 1] * fy
    q = 1.0 / d
    u = q * (ftab[0, ix] + p[0, 0] * fx + gtab[0, iy] + p[0, 1] * fy)
    v = q * (ftab[1, ix] + p[1, 0] * fx + gtab[1, iy] + p[1, 1] * fy)
    return u, v


def column_norms(ftab, gtab, p, x, y):
    ix = _clip(np.floor(x + 0.5).astype(np.int64), ftab.shape[1])
    iy = _clip(np.floor(y + 0.5).astype(np.int64), gtab.shape[1])
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
    return np.sqrt(dudx * dudx + dvdx * dvdx), np.sqrt(dudy * dudy + dvdy * dvdy)


def scale_level(rho):
    return np.where(rho > 1.0, _log2(np.maximum(rho, 1.0)).astype(np.float64), 0.0)


def fast_count(rho_x, rho_y, n):
    major = np.maximum(np.maximum(rho_x, rho_y), 1.0)
    minor = np.maximum(np.minimum(rho_x, rho_y), 1.0)
    m = np.ceil(major / minor - 1e-9).astype(np.int64)
    return np.clip(m, 1, n)


def _mix32(h):
    m = _core.M32
    h = ((h >> 16) ^ h) * 0x45D9F3B & m
    h = ((h >> 16) ^ h) * 0x45D9F3B & m
    return (h >> 16) ^ h


def jitter(seed, x, y, i):
    m = _core.M32
    h = _mix32(np.int64((seed & m) ^ 0x9E3779B9))
    h = _mix32(h ^ (x & m))
    h = _mix32(h ^ (y & m))
    h = _mix32(h ^ (i & m))
    return h / 4294967296.0


def sample_grid(grid, k, ex, ey, u, v, kargs, cnt):
    flat, offs, ws, hs = grid[:4]
    if ex > 0:
        u = (u + 0.5) / (1 << ex) - 0.5
    if ey > 0:
        v = (v + 0.5) / (1 << ey) - 0.5
    return interp(flat, offs[k], ws[k], hs[k], u, v, *kargs, cnt)


def _grouped(grid, exs, eys, u, v, kargs, cnt, mip=False):
    """Sample per-point grid entries, one vectorized call per distinct entry."""
    gy = grid[5]
    out = np.empty_like(u)
    pairs = np.stack([exs, eys], axis=1)
    for ex, ey in np.unique(pairs, axis=0):
        ex, ey = int(ex), int(ey)
        sel = (exs == ex) & (eys == ey)
        k = ex if mip else ex * gy + ey
        out[sel] = sample_grid(grid, k, ex, ey, u[sel], v[sel], kargs, cnt)
    return out


def sample_mip(grid, u, v, level, kargs, cnt):
    top = grid[4] - 1
    level = np.minimum(np.maximum(level, 0.0), float(top))
    lo = np.floor(level).astype(np.int64)
    hi = np.minimum(lo + 1, top)
    t = level - lo
    a = _grouped(grid, lo, lo, u, v, kargs, cnt, mip=True)
    b = _grouped(grid, hi, hi, u, v, kargs, cnt, mip=True)
    return a + t * (b - a)


def sample_rip(grid, u, v, lx, ly, kargs, cnt):
    gx, gy = grid[4], grid[5]
    lx = np.minimum(np.maximum(lx, 0.0), float(gx - 1))
    ly = np.minimum(np.maximum(ly, 0.0), float(gy - 1))
    x0 = np.floor(lx).astype(np.int64)
    y0 = np.floor(ly).astype(np.int64)
    x1 = np.minimum(x0 + 1, gx - 1)
    y1 = np.minimum(y0 + 1, gy - 1)
    tx = lx - x0
    ty = ly - y0
    a00 = _grouped(grid, x0, y0, u, v, kargs, cnt)
    a10 = _grouped(grid, x1, y0, u, v, kargs, cnt)
    a01 = _grouped(grid, x0, y1, u, v, kargs, cnt)
    a11 = _grouped(grid, x1, y1, u, v, kargs, cnt)
    top = a00 + tx * (a10 - a00)
    bot = a01 + tx * (a11 - a01)
    return top + ty * (bot - top)


def pixel_values(method, n, seed, grid, tables, xi, yi, kargs, cnt):
    ftab, gtab, p = tables
    flat, offs, ws, hs = grid[:4]
    x = xi.astype(np.float64)
    y = yi.astype(np.float64)
    kmul = KERNEL_MULTS[kargs[0]]
    npx = xi.size
    if method == POINT:
        u, v = map_xy(ftab, gtab, p, x, y)
        cnt[I_SAMPLES] += npx
        cnt[I_MULTS] += npx * (MAP_MULTS + kmul)
        return interp(flat, offs[0], ws[0], hs[0], u, v, *kargs, cnt)

    if method == SUPER:
        acc = np.zeros(npx)
        for j in range(n):
            oy = (j + 0.5) / n - 0.5
            for i in range(n):
                ox = (i + 0.5) / n - 0.5
                u, v = map_xy(ftab, gtab, p, x + ox, y + oy)
                acc += interp(flat, offs[0], ws[0], hs[0], u, v, *kargs, cnt)
        cnt[I_SAMPLES] += npx * n * n
        cnt[I_MULTS] += npx * n * n * (MAP_MULTS + kmul)
        return acc / (n * n)

    rho_x, rho_y = column_norms(ftab, gtab, p, x, y)
    if method == MIP:
        u, v = map_xy(ftab, gtab, p, x, y)
        cnt[I_SAMPLES] += 2 * npx
        cnt[I_MULTS] += 2 * npx * (MAP_MULTS + PREFILTER_MULTS + kmul)
        return sample_mip(grid, u, v, scale_level(np.maximum(rho_x, rho_y)), kargs, cnt)

    if method == RIP:
        u, v = map_xy(ftab, gtab, p, x, y)
        cnt[I_SAMPLES] += 4 * npx
        cnt[I_MULTS] += 4 * npx * (MAP_MULTS + PREFILTER_MULTS + kmul)
        return sample_rip(grid, u, v, scale_level(rho_x), scale_level(rho_y), kargs, cnt)

    level = scale_level(np.minimum(rho_x, rho_y))
    m = fast_count(rho_x, rho_y, n)
    total = int(m.sum())
    cnt[I_SAMPLES] += total
    cnt[I_MULTS] += total * (MAP_MULTS + PREFILTER_MULTS + 2 * kmul)
    out = np.empty(npx)
    single = m == 1
    if single.any():
        u, v = map_xy(ftab, gtab, p, x[single], y[single])
        out[single] = sample_mip(grid, u, v, level[single], kargs, cnt)
    multi = ~single
    if multi.any():
        xm, ym, mm, lm = x[multi], y[multi], m[multi], level[multi]
        xim, yim = xi[multi], yi[multi]
        ax = np.where(rho_x[multi] >= rho_y[multi], 1.0, 0.0)
        ay = 1.0 - ax
        acc = np.zeros(xm.size)
        for i in range(int(mm.max())):
            sel = mm > i
            o = (i + jitter(seed, xim[sel], yim[sel], i)) / mm[sel] - 0.5
            u, v = map_xy(ftab, gtab, p, xm[sel] + o * ax[sel], ym[sel] + o * ay[sel])
            acc[sel] += sample_mip(grid, u, v, lm[sel], kargs, cnt)
        out[multi] = acc / mm
    return out


def warp_rows(method, n, seed, grid, tables, kargs, out, cnt, workers=1):
    """Numpy counterpart of :func:`projwarp._core.warp_rows`."""
    height, width = out.shape
    blocks = [(r0, min(r0 + ROW_BLOCK, height)) for r0 in range(0, height, ROW_BLOCK)]

    def run(block):
        r0, r1 = block
        yi, xi = np.mgrid[r0:r1, 0:width]
        c = np.zeros(_core.N_COUNTERS, dtype=np.int64)
        vals = pixel_values(method, n, seed, grid, tables, xi.ravel(), yi.ravel(), kargs, c)
        out[r0:r1] = vals.reshape(r1 - r0, width)
        cnt[r0] += c

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, blocks))
    else:
        for b in blocks:
            run(b)
