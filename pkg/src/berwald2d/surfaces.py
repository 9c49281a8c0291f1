"""Built-in surface catalogue and the periodic divergence-representation solver.

Surfaces are registered by name ("euclidean", "hyperbolic", "flat-torus",
"conformal-torus(a, k1, k2)").  Periodic surfaces support solving for the
second component of a vector field whose metric divergence equals minus the
Gauss curvature, checking periodicity of the resulting field, and the
Gauss-Bonnet consistency integral over a fundamental domain.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
import numpy as np

from .geometry import (
    DomainError,
    Metric2D,
    Point2,
    REL_STEP,
    ScalarField,
    VectorField,
    as_point,
    gauss_curvature,
    partial_along,
    relative_step,
)

DEFAULT_QUAD_STEPS = 512
PERIODICITY_TOL = 1e-8

_KINDS = ("plane", "cylinder", "torus")


@dataclass(frozen=True)
class PeriodicSurface:
    """A metric together with declared translation periods.

    ``periods = (a, b)`` with a zero entry meaning non-periodic in that slot;
    ``kappa`` is the surface's analytic curvature field when one is known
    (tested against the numeric Gauss curvature, used to keep the quadrature
    in :func:`solve_x2` cheap); ``potential_kind`` tags surfaces with a
    built-in potential-to-one-form recipe.
    """

    metric: Metric2D
    periods: tuple = (0.0, 0.0)
    kind: str = "plane"
    kappa: ScalarField | None = None
    potential_kind: str | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown surface kind {self.kind!r}")
        a, b = self.periods
        if a < 0 or b < 0:
            raise ValueError("periods must be non-negative")
        expected = "plane" if a == b == 0 else ("torus" if a > 0 and b > 0 else "cylinder")
        if self.kind != expected:
            raise ValueError(f"kind {self.kind!r} inconsistent with periods {self.periods}")

    def curvature(self, p) -> float:
        if self.kappa is not None:
            return self.kappa(p)
        return gauss_curvature(self.metric, p)


def euclidean_surface() -> PeriodicSurface:
    metric = Metric2D(
        fn=lambda p: np.eye(2),
        partials=lambda p: np.zeros((2, 2, 2)),
        name="euclidean",
    )
    return PeriodicSurface(
        metric=metric,
        kappa=ScalarField.constant(0.0, name="kappa=0"),
        potential_kind="euclidean",
        name="euclidean",
    )


def hyperbolic_surface() -> PeriodicSurface:
    def fn(p):
        s = 1.0 / (p.u2 * p.u2)
        return np.array([[s, 0.0], [0.0, s]])

    def partials(p):
        P = np.zeros((2, 2, 2))
        d = -2.0 / p.u2 ** 3
        P[1, 0, 0] = d
        P[1, 1, 1] = d
        return P

    metric = Metric2D(
        fn=fn,
        domain=lambda p: p.u2 > 0.0,
        partials=partials,
        name="hyperbolic",
    )
    return PeriodicSurface(
        metric=metric,
        kappa=ScalarField.constant(-1.0, name="kappa=-1"),
        potential_kind="hyperbolic",
        name="hyperbolic",
    )


def flat_torus(periods=(2 * math.pi, 2 * math.pi)) -> PeriodicSurface:
    metric = Metric2D(
        fn=lambda p: np.eye(2),
        partials=lambda p: np.zeros((2, 2, 2)),
        name="flat-torus",
    )
    return PeriodicSurface(
        metric=metric,
        periods=(float(periods[0]), float(periods[1])),
        kind="torus",
        kappa=ScalarField.constant(0.0, name="kappa=0"),
        potential_kind="euclidean",
        name="flat-torus",
    )


def conformal_torus(amplitude: float = 0.1, k1: float = 1.0, k2: float = 2.0,
                    periods=None) -> PeriodicSurface:
    """Conformally flat torus metric ``exp(2*sigma)*delta`` with
    ``sigma = amplitude * sin(k1*u1) * sin(k2*u2)``.

    With integer wave numbers the natural periods are ``(2*pi, 2*pi)``;
    explicit ``periods`` override the declaration (useful as a negative
    control for the periodicity checks).
    """
    a = float(amplitude)
    k1 = float(k1)
    k2 = float(k2)

    def sigma(p):
        return a * math.sin(k1 * p.u1) * math.sin(k2 * p.u2)

    def sigma_grad(p):
        return (
            a * k1 * math.cos(k1 * p.u1) * math.sin(k2 * p.u2),
            a * k2 * math.sin(k1 * p.u1) * math.cos(k2 * p.u2),
        )

    def fn(p):
        s = math.exp(2.0 * sigma(p))
        return np.array([[s, 0.0], [0.0, s]])

    def partials(p):
        s = math.exp(2.0 * sigma(p))
        g1, g2 = sigma_grad(p)
        P = np.zeros((2, 2, 2))
        P[0, 0, 0] = P[0, 1, 1] = 2.0 * g1 * s
        P[1, 0, 0] = P[1, 1, 1] = 2.0 * g2 * s
        return P

    def kappa(p):
        # K = -exp(-2*sigma) * Laplace(sigma); the product-of-sines profile
        # has Laplace(sigma) = -(k1^2 + k2^2) * sigma.
        p = as_point(p)
        s = sigma(p)
        return (k1 * k1 + k2 * k2) * s * math.exp(-2.0 * s)

    metric = Metric2D(fn=fn, partials=partials, name="conformal-torus")
    if periods is None:
        periods = (2 * math.pi, 2 * math.pi)
    return PeriodicSurface(
        metric=metric,
        periods=(float(periods[0]), float(periods[1])),
        kind="torus",
        kappa=ScalarField(kappa, name="conformal-kappa"),
        name=f"conformal-torus({a:g},{k1:g},{k2:g})",
    )


_NAME_RE = re.compile(r"^([a-z-]+)\s*(?:\(([^)]*)\))?$")


def surface_by_name(name_spec: str, periods=None) -> PeriodicSurface:
    """Catalogue lookup; parametrized entries take arguments in parentheses,
    e.g. ``conformal-torus(0.1, 1, 1)``."""
    m = _NAME_RE.match(name_spec.strip())
    if not m:
        raise ValueError(f"cannot parse surface name {name_spec!r}")
    name, argtext = m.group(1), m.group(2)
    args = [float(x) for x in argtext.split(",")] if argtext else []
    if name == "euclidean":
        if args or periods is not None:
            raise ValueError("euclidean takes no arguments or periods")
        return euclidean_surface()
    if name == "hyperbolic":
        if args or periods is not None:
            raise ValueError("hyperbolic takes no arguments or periods")
        return hyperbolic_surface()
    if name == "flat-torus":
        if args:
            raise ValueError("flat-torus takes no arguments")
        return flat_torus() if periods is None else flat_torus(periods)
    if name == "conformal-torus":
        if len(args) not in (0, 3):
            raise ValueError("conformal-torus takes zero or three arguments (a, k1, k2)")
        if args:
            return conformal_torus(args[0], args[1], args[2], periods=periods)
        return conformal_torus(periods=periods)
    raise ValueError(f"unknown surface {name!r}")


def potential_by_name(name: str) -> ScalarField:
    """Named example potentials for the built-in flat connections."""
    if name == "euclid-quadratic":
        return ScalarField(
            fn=lambda p: -0.5 * (p.u1 * p.u1 + p.u2 * p.u2),
            grad=lambda p: (-p.u1, -p.u2),
            name="euclid-quadratic",
        )
    if name == "hyp-log":
        return ScalarField(
            fn=lambda p: math.log(p.u2),
            grad=lambda p: (0.0, 1.0 / p.u2),
            name="hyp-log",
        )
    raise ValueError(f"unknown potential {name!r}")


def simpson(fn, a: float, b: float, n: int) -> float:
    """Composite Simpson rule with ``n`` subintervals (bumped up to even)."""
    n = int(n)
    if n < 2:
        raise ValueError("quad_steps must be >= 2")
    if n % 2:
        n += 1
    if a == b:
        return 0.0
    h = (b - a) / n
    xs = a + h * np.arange(n + 1)
    ys = np.array([fn(float(x)) for x in xs])
    return float(h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum()))


def solve_x2(surface: PeriodicSurface, x1_field: ScalarField | None, c_fn: ScalarField | None,
             c0: float, p, quad_steps: int = DEFAULT_QUAD_STEPS) -> float:
    """Second component of a divergence-representing field at ``p``.

    ``X2 = -(I + c(u1) + c0) / sqrt(det g)`` with
    ``I = integral_0^{u2} [ kappa*sqrt(det g) + d_1(sqrt(det g) X1) ](u1, t) dt``
    evaluated by composite Simpson quadrature.  The free data ``X1``, ``c``
    and ``c0`` default to zero.
    """
    p = as_point(p)
    metric = surface.metric

    def weighted_x1(q):
        return metric.sqrt_det(q) * x1_field(q)

    def integrand(t):
        q = Point2(p.u1, t)
        if not metric.contains(q):
            raise DomainError(f"integration segment exits domain at {q}")
        val = surface.curvature(q) * metric.sqrt_det(q)
        if x1_field is not None:
            val += partial_along(
                weighted_x1, q, 0, relative_step(q.u1, REL_STEP), metric.domain
            )
        return val

    total = simpson(integrand, 0.0, p.u2, quad_steps)
    if c_fn is not None:
        total += c_fn(Point2(p.u1, 0.0))
    total += float(c0)
    return -total / metric.sqrt_det(p)


def solve_x2_field(surface: PeriodicSurface, x1_field: ScalarField | None = None,
                   c_fn: ScalarField | None = None, c0: float = 0.0,
                   quad_steps: int = DEFAULT_QUAD_STEPS) -> VectorField:
    """The assembled field ``(X1, X2)`` with ``X2`` from :func:`solve_x2`."""

    def comps(p):
        x1 = x1_field(p) if x1_field is not None else 0.0
        return (x1, solve_x2(surface, x1_field, c_fn, c0, p, quad_steps))

    return VectorField(comps, name=f"divergence-solution({surface.name})")


@dataclass(frozen=True)
class PeriodicityReport:
    """Componentwise translation defects of a field over the declared periods."""

    points: tuple
    deltas: dict  # direction index -> (n, 2) array of |X(p + period e_d) - X(p)|
    tolerance: float

    @property
    def max_delta(self) -> float:
        return float(max(np.abs(d).max() for d in self.deltas.values()))

    @property
    def passed(self) -> bool:
        return self.max_delta <= self.tolerance

    def rows(self):
        out = []
        for d, arr in sorted(self.deltas.items()):
            for p, row in zip(self.points, arr):
                out.append((d + 1, p.u1, p.u2, float(row[0]), float(row[1])))
        return out


def _default_period_samples(surface: PeriodicSurface, n: int = 5):
    a = surface.periods[0] or 1.0
    b = surface.periods[1] or 1.0
    us = np.linspace(0.13, 0.93, n)  # avoid lattice-symmetric points
    return [Point2(a * x, b * y) for x in us for y in us]


def check_periodicity(surface: PeriodicSurface, X: VectorField, samples=None,
                      tolerance: float = PERIODICITY_TOL) -> PeriodicityReport:
    """Compare ``X`` with its translate by each declared period."""
    directions = [d for d in (0, 1) if surface.periods[d] > 0]
    if not directions:
        raise ValueError("surface declares no periodic directions")
    pts = tuple(as_point(p) for p in (samples or _default_period_samples(surface)))
    deltas = {}
    for d in directions:
        shift = (surface.periods[0], 0.0) if d == 0 else (0.0, surface.periods[1])
        rows = []
        for p in pts:
            q = Point2(p.u1 + shift[0], p.u2 + shift[1])
            rows.append(np.abs(X.at(q) - X.at(p)))
        deltas[d] = np.array(rows)
    return PeriodicityReport(points=pts, deltas=deltas, tolerance=tolerance)


def metric_periodicity_defect(surface: PeriodicSurface, samples=None) -> float:
    """Max translation defect of ``det g`` and curvature over declared periods."""
    directions = [d for d in (0, 1) if surface.periods[d] > 0]
    if not directions:
        return 0.0
    pts = samples or _default_period_samples(surface)
    worst = 0.0
    for d in directions:
        shift = (surface.periods[0], 0.0) if d == 0 else (0.0, surface.periods[1])
        for p in pts:
            p = as_point(p)
            q = Point2(p.u1 + shift[0], p.u2 + shift[1])
            worst = max(worst, abs(surface.metric.det(q) - surface.metric.det(p)))
            worst = max(worst, abs(surface.curvature(q) - surface.curvature(p)))
    return worst


def verify_field_divergence(surface: PeriodicSurface, X: VectorField, sample,
                            tolerance: float = 1e-5):
    """Residuals of ``gauss_curvature + div(X) = 0`` for an explicit field.

    The curvature used here is the numeric one of the metric, independent of
    the analytic profile consumed by :func:`solve_x2`, so the two routes
    cross-check each other.
    """
    from .connection import DivergenceReport
    from .geometry import divergence

    points = tuple(as_point(p) for p in sample)
    if not points:
        raise ValueError("empty sample")
    residuals = np.array(
        [
            gauss_curvature(surface.metric, p) + divergence(surface.metric, X, p)
            for p in points
        ]
    )
    return DivergenceReport(points=points, residuals=residuals, tolerance=tolerance)


def gauss_bonnet_integral(surface: PeriodicSurface, grid=(64, 64)) -> float:
    """Integral of ``kappa * sqrt(det g)`` over one fundamental domain of a
    torus, by the periodic trapezoid rule; the exact value is zero.

    The curvature here is always the numeric Gauss curvature of the metric,
    independent of any declared analytic profile.
    """
    if surface.kind != "torus":
        raise ValueError("Gauss-Bonnet integral requires a torus")
    n1, n2 = int(grid[0]), int(grid[1])
    if n1 < 2 or n2 < 2:
        raise ValueError("grid must be at least 2x2")
    a, b = surface.periods
    total = 0.0
    for i in range(n1):
        u1 = a * i / n1
        for j in range(n2):
            p = Point2(u1, b * j / n2)
            total += gauss_curvature(surface.metric, p) * surface.metric.sqrt_det(p)
    return total * (a / n1) * (b / n2)
