"""Parallel transport along curves.

Integrates the linear transport equation ``(X^k)' = -(c^i)' X^j G^k_ij(c)``
with classical fixed-step RK4 (reproducible output, no adaptivity), returns
sampled vectors together with the transport matrices, and provides the
closed-form solutions of the two built-in flat connections as independent
oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import DomainError, Point2, ScalarField, as_point
from .connection import Connection2D

CURVE_VELOCITY_STEP = 1e-6
LOOP_CLOSURE_TOL = 1e-12
DEFAULT_STEPS = 1000


@dataclass(frozen=True)
class Curve:
    """A parametrized path ``c: [0, 1] -> R^2``.

    ``velocity_fn`` is the analytic derivative when available; otherwise the
    velocity is taken by central differences in the parameter.
    """

    point: Callable
    velocity_fn: Callable | None = None
    name: str = ""

    def at(self, t: float) -> Point2:
        return as_point(self.point(float(t)))

    def velocity(self, t: float) -> np.ndarray:
        t = float(t)
        if self.velocity_fn is not None:
            return np.asarray(self.velocity_fn(t), dtype=float)
        h = CURVE_VELOCITY_STEP
        a = self.at(t + h)
        b = self.at(t - h)
        return np.array([(a.u1 - b.u1) / (2 * h), (a.u2 - b.u2) / (2 * h)])

    @staticmethod
    def segment(p, q, name: str = "") -> "Curve":
        p = as_point(p)
        q = as_point(q)
        d = (q.u1 - p.u1, q.u2 - p.u2)
        return Curve(
            point=lambda t: Point2(p.u1 + t * d[0], p.u2 + t * d[1]),
            velocity_fn=lambda t: d,
            name=name or f"segment({p.u1:g},{p.u2:g})->({q.u1:g},{q.u2:g})",
        )

    @staticmethod
    def radial(q, name: str = "") -> "Curve":
        """Straight ray from the origin to ``q``."""
        return Curve.segment((0.0, 0.0), q, name=name or f"radial({q[0]:g},{q[1]:g})")

    @staticmethod
    def circle(center, radius: float, angle0: float = 0.0, angle1: float = 2 * math.pi,
               name: str = "") -> "Curve":
        c = as_point(center)
        r = float(radius)
        span = float(angle1) - float(angle0)

        def point(t):
            a = angle0 + span * t
            return Point2(c.u1 + r * math.cos(a), c.u2 + r * math.sin(a))

        def velocity(t):
            a = angle0 + span * t
            return (-r * span * math.sin(a), r * span * math.cos(a))

        return Curve(point, velocity, name=name or f"circle(({c.u1:g},{c.u2:g}),{r:g})")

    @staticmethod
    def constant(p, name: str = "") -> "Curve":
        p = as_point(p)
        return Curve(
            point=lambda t: p,
            velocity_fn=lambda t: (0.0, 0.0),
            name=name or f"constant({p.u1:g},{p.u2:g})",
        )

    @staticmethod
    def polyline(points: Sequence, name: str = "") -> "Curve":
        """Piecewise-linear path through the given points, uniform in ``t``."""
        pts = [as_point(p) for p in points]
        if len(pts) < 2:
            raise ValueError("polyline needs at least two points")
        n = len(pts) - 1

        def locate(t):
            s = min(max(t, 0.0), 1.0) * n
            k = min(int(s), n - 1)
            return k, s - k

        def point(t):
            k, frac = locate(t)
            a, b = pts[k], pts[k + 1]
            return Point2(a.u1 + frac * (b.u1 - a.u1), a.u2 + frac * (b.u2 - a.u2))

        def velocity(t):
            k, _ = locate(t)
            a, b = pts[k], pts[k + 1]
            return (n * (b.u1 - a.u1), n * (b.u2 - a.u2))

        return Curve(point, velocity, name=name or "polyline")


@dataclass(frozen=True)
class TransportResult:
    """Sampled solution of the transport equation along a curve.

    ``vectors[n]`` is the transported vector at ``ts[n]``; ``matrices[n]`` is
    the linear transport map from ``t = 0`` to ``ts[n]`` (columns are the
    transports of the coordinate basis vectors).
    """

    ts: np.ndarray
    vectors: np.ndarray
    matrices: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return self.matrices[-1]


def _coefficient_matrix(conn: Connection2D, curve: Curve, t: float) -> np.ndarray:
    p = curve.at(t)
    G = conn.at(p)
    v = curve.velocity(t)
    A = -(v[0] * G[:, 0, :] + v[1] * G[:, 1, :])
    if not np.isfinite(A).all():
        raise ValueError(f"non-finite connection coefficients along curve at t={t}")
    return A


def parallel_transport(conn: Connection2D, curve: Curve, x0, steps: int = DEFAULT_STEPS) -> TransportResult:
    """RK4 solution of ``Y' = A(t) Y`` with ``A[k, j] = -(c^i)' G^k_ij(c)``.

    The initial vector and the identity matrix are propagated together, so
    the result carries both the sampled vectors and the transport maps.
    """
    steps = int(steps)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (2,):
        raise ValueError("initial vector must have two components")
    h = 1.0 / steps
    state = np.column_stack([x0, np.eye(2)])  # columns: vector, e1, e2
    ts = np.empty(steps + 1)
    states = np.empty((steps + 1, 2, 3))
    ts[0] = 0.0
    states[0] = state
    for n in range(steps):
        t = n * h
        a1 = _coefficient_matrix(conn, curve, t)
        a2 = _coefficient_matrix(conn, curve, t + 0.5 * h)
        a4 = _coefficient_matrix(conn, curve, t + h)
        k1 = a1 @ state
        k2 = a2 @ (state + 0.5 * h * k1)
        k3 = a2 @ (state + 0.5 * h * k2)
        k4 = a4 @ (state + h * k3)
        state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        ts[n + 1] = (n + 1) * h
        states[n + 1] = state
    return TransportResult(ts=ts, vectors=states[:, :, 0], matrices=states[:, :, 1:])


def transport_matrix(conn: Connection2D, curve: Curve, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Transport map ``X(0) -> X(1)``; columns are transported basis vectors."""
    return parallel_transport(conn, curve, (0.0, 0.0), steps).matrix


def holonomy(conn: Connection2D, loop: Curve, steps: int = DEFAULT_STEPS,
             closure_tol: float = LOOP_CLOSURE_TOL) -> np.ndarray:
    """Transport matrix around a closed loop."""
    a, b = loop.at(0.0), loop.at(1.0)
    if max(abs(a.u1 - b.u1), abs(a.u2 - b.u2)) > closure_tol:
        raise ValueError(f"loop endpoints differ: {a} vs {b}")
    return transport_matrix(conn, loop, steps)


def closed_form_euclidean(potential: ScalarField, curve: Curve, r0: float, phi0: float,
                          t: float) -> np.ndarray:
    """Parallel field of the flat Euclidean connection built from a potential:
    ``X(t) = r0 (cos(phi(t) + phi0), -sin(phi(t) + phi0))`` with
    ``phi = potential o c``."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    phi = potential(curve.at(t)) + phi0
    return np.array([r0 * math.cos(phi), -r0 * math.sin(phi)])


def closed_form_hyperbolic(potential: ScalarField, curve: Curve, r0: float, phi0: float,
                           t: float) -> np.ndarray:
    """Parallel field of the flat half-plane connection built from a potential:
    ``X(t) = c2(t) r0 (cos(phi(t) + phi0), sin(phi(t) + phi0))`` with
    ``phi = potential o c``."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    p = curve.at(t)
    if p.u2 <= 0:
        raise DomainError(f"curve leaves the upper half-plane at t={t}: {p}")
    phi = potential(p) + phi0
    return np.array([p.u2 * r0 * math.cos(phi), p.u2 * r0 * math.sin(phi)])


EUCLIDEAN_TRANSPORT_NOTE = (
    "transport convention: on the flat plane the solution is "
    "X(t) = r0*(cos(phi(t)+phi0), -sin(phi(t)+phi0)) with phi the potential "
    "along the curve; with phi decreasing the second component grows, i.e. "
    "the transport ODE rotates (1,0) towards (0,1)."
)
