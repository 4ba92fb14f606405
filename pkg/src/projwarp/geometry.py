"""Homography algebra and the incremental backward mapping.

A :class:`Homography` maps source-plane coordinates ``(u, v)`` to output
coordinates ``(x, y)``. Warps evaluate the inverse through a
:class:`ScanlineDecomposition`, which tabulates the per-axis linear forms so
each grid sample costs two multiplications and one division.

Pixel ``(i, j)`` sits at continuous coordinates ``(i, j)``; a ``w x h``
raster covers ``[-0.5, w - 0.5] x [-0.5, h - 0.5]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _core
from .errors import DataError, HorizonError, OutOfExtentError, SingularMatrixError

EPS = 1e-12
MAX_TRIPLE_ATTEMPTS = 200


class Homography:
    """Invertible 3x3 projective map, canonicalized so that t33 = 1."""

    __slots__ = ("matrix", "normalized")

    def __init__(self, matrix):
        t = np.array(matrix, dtype=np.float64)
        if t.shape != (3, 3):
            raise ValueError(f"homography must be 3x3, got shape {t.shape}")
        if not np.all(np.isfinite(t)):
            raise SingularMatrixError("homography has non-finite entries")
        self.normalized = abs(t[2, 2]) > EPS
        if self.normalized:
            t = t / t[2, 2]
        norm = np.linalg.norm(t)
        if norm == 0 or abs(np.linalg.det(t)) < EPS * norm**3:
            raise SingularMatrixError("homography is singular")
        t.setflags(write=False)
        self.matrix = t

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    @classmethod
    def scaling(cls, sx, sy=None):
        return cls(np.diag([sx, sx if sy is None else sy, 1.0]))

    @classmethod
    def translation(cls, tx, ty):
        return cls([[1.0, 0.0, tx], [0.0, 1.0, ty], [0.0, 0.0, 1.0]])

    def allclose(self, other, atol=1e-9):
        return np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol)

    def __repr__(self):
        return f"Homography({self.matrix.tolist()!r})"


def invert(h: Homography) -> Homography:
    return Homography(np.linalg.inv(h.matrix))


def compose(a: Homography, b: Homography) -> Homography:
    """Map that applies ``a`` first and then ``b``."""
    return Homography(b.matrix @ a.matrix)


def project(h: Homography, x, y):
    """Apply ``h`` to a point (scalars or broadcastable arrays)."""
    t = h.matrix
    den = t[2, 0] * x + t[2, 1] * y + t[2, 2]
    if np.any(np.abs(den) < EPS):
        raise HorizonError("point lies on the horizon line of the homography")
    return (t[0, 0] * x + t[0, 1] * y + t[0, 2]) / den, (t[1, 0] * x + t[1, 1] * y + t[1, 2]) / den


class JacobianEstimate(NamedTuple):
    du_dx: float
    du_dy: float
    dv_dx: float
    dv_dy: float


@dataclass(frozen=True, eq=False)
class ScanlineDecomposition:
    """Backward projection ``p`` split into per-axis tables.

    ``ftab[i, x] = p[i, 0] * x`` and ``gtab[i, y] = p[i, 1] * y + p[i, 2]``
    for the integer coordinates of a ``width x height`` output raster.
    """

    p: np.ndarray
    width: int
    height: int
    ftab: np.ndarray
    gtab: np.ndarray

    @classmethod
    def from_backward(cls, p, width, height):
        if isinstance(p, Homography):
            p = p.matrix
        p = np.ascontiguousarray(p, dtype=np.float64)
        width, height = int(width), int(height)
        if width < 1 or height < 1:
            raise ValueError(f"output extent must be positive, got {width}x{height}")
        corners = np.array([[-0.5, -0.5], [width - 0.5, -0.5],
                            [-0.5, height - 0.5], [width - 0.5, height - 0.5]])
        # the denominator is affine, so its extremes over the raster are at the corners
        den = p[2, 0] * corners[:, 0] + p[2, 1] * corners[:, 1] + p[2, 2]
        if np.any(np.abs(den) < EPS) or not (np.all(den > 0) or np.all(den < 0)):
            raise HorizonError("horizon line crosses the output raster")
        xs = np.arange(width, dtype=np.float64)
        ys = np.arange(height, dtype=np.float64)
        ftab = np.ascontiguousarray(p[:, 0:1] * xs)
        gtab = np.ascontiguousarray(p[:, 1:2] * ys + p[:, 2:3])
        for a in (p, ftab, gtab):
            a.setflags(write=False)
        return cls(p, width, height, ftab, gtab)

    def check_extent(self, x, y):
        tol = 1e-9
        if not (-0.5 - tol <= x <= self.width - 0.5 + tol
                and -0.5 - tol <= y <= self.height - 0.5 + tol):
            raise OutOfExtentError(
                f"({x}, {y}) outside the {self.width}x{self.height} decomposition extent")


def decompose(h: Homography, out_width: int, out_height: int) -> ScanlineDecomposition:
    """Tabulate the inverse of ``h`` over an output raster."""
    return ScanlineDecomposition.from_backward(invert(h), out_width, out_height)


def map_point(d: ScanlineDecomposition, x: float, y: float):
    d.check_extent(x, y)
    return _core.map_xy(d.ftab, d.gtab, d.p, float(x), float(y))


def jacobian(d: ScanlineDecomposition, x: float, y: float) -> JacobianEstimate:
    """Analytic partial derivatives of the backward map at (x, y)."""
    d.check_extent(x, y)
    return JacobianEstimate(*_core.jacobian_xy(d.ftab, d.gtab, d.p, float(x), float(y)))


def _from_correspondences(src, dst) -> Homography:
    """Exact homography taking four source points onto four targets."""
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for k, ((u, v), (x, y)) in enumerate(zip(src, dst)):
        a[2 * k] = [u, v, 1, 0, 0, 0, -u * x, -v * x]
        a[2 * k + 1] = [0, 0, 0, u, v, 1, -u * y, -v * y]
        b[2 * k], b[2 * k + 1] = x, y
    sol = np.linalg.solve(a, b)
    return Homography(np.append(sol, 1.0).reshape(3, 3))


def raster_corners(width, height):
    return np.array([[-0.5, -0.5], [width - 0.5, -0.5],
                     [width - 0.5, height - 0.5], [-0.5, height - 0.5]])


def bounding_extent(h: Homography, width, height, pad=1, limit=4):
    """Raster that holds the image of a ``width x height`` raster under ``h``.

    Returns ``(shift, out_w, out_h)``: ``shift`` translates mapped coordinates
    into the new raster. Each side is clamped to ``limit`` times the source.
    """
    c = raster_corners(width, height)
    xs, ys = project(h, c[:, 0], c[:, 1])
    x0 = np.floor(xs.min() + 0.5) - pad
    y0 = np.floor(ys.min() + 0.5) - pad
    out_w = int(np.ceil(xs.max() + 0.5) - x0) + pad
    out_h = int(np.ceil(ys.max() + 0.5) - y0) + pad
    out_w = max(1, min(out_w, limit * width))
    out_h = max(1, min(out_h, limit * height))
    return Homography.translation(-x0, -y0), out_w, out_h


def chain_stages(hs, width, height, limit=4):
    """Per-stage matrices and rasters for warping through ``hs`` in order.

    Intermediate rasters are padded bounding boxes; the final stage targets
    the source extent. The translations cancel, so the stage matrices compose
    to the same map as ``hs``.
    """
    stages = []
    prev_shift = Homography.identity()
    cur_w, cur_h = width, height
    for k, h in enumerate(hs):
        local = compose(invert(prev_shift), h)
        if k == len(hs) - 1:
            shift, out_w, out_h = Homography.identity(), width, height
        else:
            shift, out_w, out_h = bounding_extent(local, cur_w, cur_h, limit=limit)
        stages.append((compose(local, shift), out_w, out_h))
        prev_shift = shift
        cur_w, cur_h = out_w, out_h
    return stages


def _singular_values(d: ScanlineDecomposition, x, y):
    j = np.array(_core.jacobian_xy(d.ftab, d.gtab, d.p, x, y)).reshape(2, 2)
    return np.linalg.svd(j, compute_uv=False)


def admissible_chain(hs, width, height, scale_bounds=(0.25, 4.0), samples=5):
    """True if every stage keeps the horizon off its raster and stays in scale bounds."""
    lo, hi = scale_bounds
    try:
        for h, out_w, out_h in chain_stages(hs, width, height):
            d = decompose(h, out_w, out_h)
            for x in np.linspace(-0.5, out_w - 0.5, samples):
                for y in np.linspace(-0.5, out_h - 0.5, samples):
                    s = _singular_values(d, x, y)
                    if s.min() < lo or s.max() > hi:
                        return False
    except (HorizonError, SingularMatrixError):
        return False
    return True


def random_composed_triple(seed: int, extent, jitter=0.2):
    """Three homographies whose composition is the identity.

    The first two factors each move the raster corners by up to ``jitter``
    of the extent; the third undoes their product. Deterministic in ``seed``.
    """
    width, height = extent
    rng = np.random.default_rng(seed)
    rect = raster_corners(width, height)
    span = np.array([width, height], dtype=np.float64)
    for _ in range(MAX_TRIPLE_ATTEMPTS):
        quad1 = rect + rng.uniform(-jitter, jitter, size=(4, 2)) * span
        quad2 = rect + rng.uniform(-jitter, jitter, size=(4, 2)) * span
        try:
            h1 = _from_correspondences(rect, quad1)
            h2 = _from_correspondences(quad1, quad2)
            h3 = invert(compose(h1, h2))
        except (np.linalg.LinAlgError, SingularMatrixError):
            continue
        if admissible_chain((h1, h2, h3), width, height):
            return h1, h2, h3
    raise HorizonError(f"no admissible transformation triple for seed {seed}")


def parse_matrix(text: str) -> Homography:
    """Parse nine whitespace-separated reals (row-major)."""
    try:
        values = [float(tok) for tok in text.split()]
    except ValueError as exc:
        raise DataError(f"malformed matrix text: {exc}") from None
    if len(values) != 9:
        raise DataError(f"matrix text needs 9 values, got {len(values)}")
    return Homography(np.array(values).reshape(3, 3))


def format_matrix(h: Homography) -> str:
    return "\n".join(" ".join(f"{v:.17g}" for v in row) for row in h.matrix) + "\n"


def read_matrix(path) -> Homography:
    with open(path, encoding="ascii") as fh:
        return parse_matrix(fh.read())


def write_matrix(h: Homography, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_matrix(h))
