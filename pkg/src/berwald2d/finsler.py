"""Convex indicatrices and the induced Finsler structures.

Trifocal ellipses as indicatrices, their Minkowski gauge, parallel
translation of indicatrices by a flat connection, the induced norm, the
compatibility check (invariance of the norm under transport) and the
averaged Riemannian metric obtained by integrating the fiberwise Hessian
metric over the indicatrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import DomainError, Point2, as_point
from .connection import Connection2D
from .transport import Curve, DEFAULT_STEPS, holonomy, parallel_transport, transport_matrix

GAUGE_TOL = 1e-12
GAUGE_MAX_BISECTIONS = 80
FIBER_STEP = 1e-4  # Hessian step, relative to |v|
DEFAULT_QUAD_POINTS = 720
ENDPOINT_TOL = 1e-9


@dataclass(frozen=True)
class TrifocalEllipse:
    """Locus where the distances to the collinear foci ``-focal, 0, +focal``
    sum to ``level``.

    The origin is interior iff ``level > 2*|focal|``; the boundary is then a
    smooth strictly convex closed curve (a circle of radius ``level/3`` in
    the degenerate case ``focal = 0``).
    """

    focal: tuple = (1.0, 0.0)
    level: float = 4.0

    def __post_init__(self):
        f1, f2 = float(self.focal[0]), float(self.focal[1])
        object.__setattr__(self, "focal", (f1, f2))
        object.__setattr__(self, "level", float(self.level))
        if not (math.isfinite(f1) and math.isfinite(f2) and math.isfinite(self.level)):
            raise ValueError("focal vector and level must be finite")
        if self.level <= 2.0 * math.hypot(f1, f2):
            raise ValueError("level must exceed twice the focal distance (origin interior)")


def membership(ellipse: TrifocalEllipse, v) -> float:
    """Sum of the three focal distances minus the level: negative inside,
    zero on the curve, positive outside."""
    x, y = float(v[0]), float(v[1])
    f1, f2 = ellipse.focal
    return (
        math.hypot(x + f1, y + f2)
        + math.hypot(x, y)
        + math.hypot(x - f1, y - f2)
        - ellipse.level
    )


def gauge(ellipse: TrifocalEllipse, v) -> float:
    """Minkowski gauge of the ellipse: the unique ``t > 0`` with ``v/t`` on
    the boundary; ``0`` at the origin.  Positively homogeneous of degree one.

    The input is first rescaled to a unit vector (the gauge is exactly
    homogeneous, and this keeps the bracketing well-scaled for arbitrarily
    small or large inputs); the root of the membership function along the
    ray, which is crossed exactly once by convexity, is then bracketed
    geometrically from ``1/level`` and bisected.
    """
    x, y = float(v[0]), float(v[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite vector ({x}, {y})")
    r = math.hypot(x, y)
    if r == 0.0:
        return 0.0
    ux, uy = x / r, y / r
    f1, f2 = ellipse.focal
    level = ellipse.level

    def mem(t):
        w1, w2 = ux / t, uy / t
        return (
            math.hypot(w1 + f1, w2 + f2)
            + math.hypot(w1, w2)
            + math.hypot(w1 - f1, w2 - f2)
            - level
        )

    t = 1.0 / level
    m = mem(t)
    if m == 0.0:
        return r * t
    if m > 0.0:  # unit/t outside: grow t until inside
        lo = t
        hi = 2.0 * t
        while mem(hi) > 0.0:
            lo = hi
            hi *= 2.0
    else:  # unit/t inside: shrink t until outside
        hi = t
        lo = 0.5 * t
        while mem(lo) <= 0.0:
            hi = lo
            lo *= 0.5
    for _ in range(GAUGE_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if mem(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return r * 0.5 * (lo + hi)


def boundary_points(ellipse: TrifocalEllipse, n: int) -> np.ndarray:
    """``n`` points of the boundary at uniformly spaced polar angles (open:
    the closing point is not repeated)."""
    out = np.empty((n, 2))
    for k in range(n):
        a = 2.0 * math.pi * k / n
        u = (math.cos(a), math.sin(a))
        r = 1.0 / gauge(ellipse, u)
        out[k] = (r * u[0], r * u[1])
    return out


def best_fit_ellipse_residual(points: np.ndarray) -> float:
    """Max-abs residual of the least-squares quadratic ``v^T Q v = 1`` fit.

    Zero exactly when the points lie on a centered ellipse; used as a
    numeric witness that an indicatrix is not induced by any quadratic form.
    """
    pts = np.asarray(points, dtype=float)
    A = np.column_stack([pts[:, 0] ** 2, 2.0 * pts[:, 0] * pts[:, 1], pts[:, 1] ** 2])
    coef, *_ = np.linalg.lstsq(A, np.ones(len(pts)), rcond=None)
    return float(np.abs(A @ coef - 1.0).max())


@dataclass(frozen=True)
class FinslerStructure:
    """A base indicatrix spread over the surface by parallel transport.

    The connection must have trivial holonomy for the spread to be
    path-independent; a probe loop around the base point is checked at
    construction.
    """

    base_point: Point2
    base_indicatrix: TrifocalEllipse
    connection: Connection2D
    steps: int = DEFAULT_STEPS
    probe_radius: float = 0.25
    holonomy_tol: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "base_point", as_point(self.base_point))
        if not self.connection.domain(self.base_point):
            raise DomainError(f"base point outside domain: {self.base_point}")
        probe = Curve.circle(self.base_point, self.probe_radius)
        dev = np.abs(holonomy(self.connection, probe, self.steps) - np.eye(2)).max()
        if dev > self.holonomy_tol:
            raise ValueError(
                f"connection holonomy is not trivial (probe deviation {dev:.3e})"
            )

    def canonical_path(self, p) -> Curve:
        """Coordinate straight segment from the base point (both built-in
        domains are convex, so it stays inside)."""
        return Curve.segment(self.base_point, p)


@dataclass(frozen=True)
class TranslatedIndicatrix:
    """The image of the base indicatrix under a linear transport map."""

    base: TrifocalEllipse
    matrix: np.ndarray
    center: Point2

    def boundary(self, n: int) -> np.ndarray:
        """Boundary points of the translate, centered at the origin of the
        tangent plane (add ``center`` for drawing)."""
        return boundary_points(self.base, n) @ self.matrix.T

    def foci(self) -> np.ndarray:
        """The three focal points ``(-X, 0, +X)`` with ``X`` the transported
        focal vector."""
        x = self.matrix @ np.asarray(self.base.focal)
        return np.array([-x, [0.0, 0.0], x])


def indicatrix_at(fs: FinslerStructure, p, path: Curve | None = None,
                  steps: int | None = None) -> TranslatedIndicatrix:
    """Indicatrix at ``p``: the image of the base one under the transport map
    along ``path`` (default: the canonical straight segment)."""
    p = as_point(p)
    if path is None:
        path = fs.canonical_path(p)
    a, b = path.at(0.0), path.at(1.0)
    if max(abs(a.u1 - fs.base_point.u1), abs(a.u2 - fs.base_point.u2)) > ENDPOINT_TOL:
        raise ValueError(f"path starts at {a}, not at the base point {fs.base_point}")
    if max(abs(b.u1 - p.u1), abs(b.u2 - p.u2)) > ENDPOINT_TOL:
        raise ValueError(f"path ends at {b}, not at {p}")
    M = transport_matrix(fs.connection, path, steps or fs.steps)
    return TranslatedIndicatrix(base=fs.base_indicatrix, matrix=M, center=p)


def _solve2(M: np.ndarray, v) -> np.ndarray:
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det) < 1e-14:
        raise ValueError("singular transport matrix")
    x, y = float(v[0]), float(v[1])
    return np.array(
        [(M[1, 1] * x - M[0, 1] * y) / det, (-M[1, 0] * x + M[0, 0] * y) / det]
    )


def finsler_norm(fs: FinslerStructure, p, v, path: Curve | None = None) -> float:
    """The induced norm: gauge of the base indicatrix at the pulled-back
    vector, ``F(p, v) = gauge(M^{-1} v)``."""
    ind = indicatrix_at(fs, p, path)
    return gauge(fs.base_indicatrix, _solve2(ind.matrix, v))


@dataclass(frozen=True)
class CompatibilityReport:
    """Norm values of a transported vector along a curve."""

    ts: np.ndarray
    values: np.ndarray
    reference: float
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return float(np.abs(self.values - self.reference).max())

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def rows(self):
        return [(float(t), float(v)) for t, v in zip(self.ts, self.values)]


def compatibility_check(fs: FinslerStructure, curve: Curve, x0, samples: int = 16,
                        tolerance: float = 1e-6,
                        transport_connection: Connection2D | None = None) -> CompatibilityReport:
    """Transport ``x0`` along the curve and sample the induced norm.

    ``transport_connection`` substitutes a different connection for the
    transport only (the norm stays the one of ``fs``); used as a negative
    control, since the norm is invariant exactly under the structure's own
    connection.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    conn = transport_connection or fs.connection
    res = parallel_transport(conn, curve, x0, fs.steps)
    idx = np.linspace(0, len(res.ts) - 1, samples).round().astype(int)
    values = np.array(
        [finsler_norm(fs, curve.at(res.ts[i]), res.vectors[i]) for i in idx]
    )
    reference = finsler_norm(fs, curve.at(0.0), np.asarray(x0, dtype=float))
    return CompatibilityReport(
        ts=res.ts[idx], values=values, reference=reference, tolerance=tolerance
    )


def riemann_finsler_metric(norm: Callable, v, step: float = FIBER_STEP) -> np.ndarray:
    """Fiberwise Hessian metric ``g_ij = d^2 E / dv^i dv^j`` of ``E = F^2/2``
    at ``v``, by second central differences with a step relative to ``|v|``."""
    v = np.asarray(v, dtype=float)
    h = step * float(np.hypot(v[0], v[1]))
    if h == 0.0:
        raise ValueError("cannot differentiate the energy at the origin")

    def energy(w):
        f = norm(w)
        return 0.5 * f * f

    e0 = energy(v)
    ex_p = energy(v + (h, 0.0))
    ex_m = energy(v - (h, 0.0))
    ey_p = energy(v + (0.0, h))
    ey_m = energy(v - (0.0, h))
    exy_pp = energy(v + (h, h))
    exy_pm = energy(v + (h, -h))
    exy_mp = energy(v + (-h, h))
    exy_mm = energy(v + (-h, -h))
    g11 = (ex_p - 2.0 * e0 + ex_m) / (h * h)
    g22 = (ey_p - 2.0 * e0 + ey_m) / (h * h)
    g12 = (exy_pp - exy_pm - exy_mp + exy_mm) / (4.0 * h * h)
    return np.array([[g11, g12], [g12, g22]])


def averaged_metric(fs: FinslerStructure, p, quad_points: int = DEFAULT_QUAD_POINTS,
                    path: Curve | None = None) -> np.ndarray:
    """Average of the Hessian metric over the indicatrix at ``p``.

    ``gamma_ij = integral g_ij(y) sqrt(det g(y)) r(theta)^2 dtheta`` over a
    uniform angular parametrization ``y(theta) = r(theta)(cos, sin)`` of the
    indicatrix (periodic trapezoid rule, which is spectrally accurate here).
    """
    ind = indicatrix_at(fs, p, path)
    M = ind.matrix
    Minv = np.linalg.inv(M)
    base = fs.base_indicatrix

    def norm(v):
        return gauge(base, (Minv[0, 0] * v[0] + Minv[0, 1] * v[1],
                            Minv[1, 0] * v[0] + Minv[1, 1] * v[1]))

    acc = np.zeros((2, 2))
    n = int(quad_points)
    if n < 8:
        raise ValueError("quad_points must be >= 8")
    for k in range(n):
        a = 2.0 * math.pi * k / n
        u = np.array([math.cos(a), math.sin(a)])
        r = 1.0 / norm(u)
        y = r * u
        g = riemann_finsler_metric(norm, y)
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        if det <= 0.0 or g[0, 0] <= 0.0:
            raise ValueError(
                f"indicatrix not strongly convex: Hessian metric not positive "
                f"definite at angle {a:.6f}"
            )
        acc += g * (math.sqrt(det) * r * r)
    return acc * (2.0 * math.pi / n)
