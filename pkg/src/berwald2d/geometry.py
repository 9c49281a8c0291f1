"""Metric geometry on two-dimensional coordinate patches.

Value types for points and smooth fields, plus the basic differential
operators of a Riemannian metric: Levi-Civita Christoffel symbols, Gauss
curvature, divergence and the musical isomorphisms.  Analytic derivatives
are used whenever a field carries them; everything else falls back to
finite differences with boundary-aware stencils.

Index conventions, fixed throughout the package:

* Christoffel arrays ``G`` have shape ``(2, 2, 2)``; ``G[k, i, j]`` is the
  output component ``k`` for differentiation direction ``i`` acting on
  argument ``j``.
* Curvature arrays ``R`` have shape ``(2, 2, 2, 2)``; ``R[l, k, i, j]`` is
  the ``l`` component of ``R(e_i, e_j) e_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

# Finite-difference policy.  First derivatives of smooth fields use a step
# relative to the coordinate magnitude; derivatives of connection
# coefficients (needed for curvature) use a fixed nominal step with a
# five-point stencil, which keeps the error well below the verification
# tolerances even close to the u2 = 0 boundary of the half-plane.
REL_STEP = 1e-5
CURVATURE_STEP = 1e-4
SINGULAR_DET = 1e-14
_BOUNDARY_PROBE = 10.0  # one-sided stencils within 10*h of the boundary
_SHRINK_TRIES = 4


class DomainError(ValueError):
    """A point, or a finite-difference stencil around it, left the domain."""


class SingularMetricError(ValueError):
    """Metric matrix is numerically singular or not positive definite."""


class Point2(NamedTuple):
    """A point of the coordinate patch."""

    u1: float
    u2: float


def as_point(p) -> Point2:
    q = Point2(float(p[0]), float(p[1]))
    if not (np.isfinite(q.u1) and np.isfinite(q.u2)):
        raise DomainError(f"non-finite point {q}")
    return q


def _shift(p: Point2, axis: int, delta: float) -> Point2:
    if axis == 0:
        return Point2(p.u1 + delta, p.u2)
    return Point2(p.u1, p.u2 + delta)


def relative_step(x: float, h: float) -> float:
    return h * max(1.0, abs(x))


def partial_along(fn, p, axis: int, h: float, domain=None, order: int = 2):
    """Partial derivative of ``fn`` (scalar- or array-valued) along one axis.

    Uses a central stencil of the requested ``order`` (2 or 4) away from the
    domain boundary, switches to second-order one-sided stencils within
    ``10*h`` of it, and shrinks the step when even those do not fit.
    """
    p = as_point(p)
    if domain is not None and not domain(p):
        raise DomainError(f"point outside domain: {p}")
    inside = (lambda q: True) if domain is None else domain
    for _ in range(_SHRINK_TRIES):
        probe = _BOUNDARY_PROBE * h
        if inside(_shift(p, axis, probe)) and inside(_shift(p, axis, -probe)):
            if order == 4:
                f1 = fn(_shift(p, axis, h))
                f2 = fn(_shift(p, axis, 2 * h))
                b1 = fn(_shift(p, axis, -h))
                b2 = fn(_shift(p, axis, -2 * h))
                return (b2 - 8 * b1 + 8 * f1 - f2) / (12 * h)
            return (fn(_shift(p, axis, h)) - fn(_shift(p, axis, -h))) / (2 * h)
        if inside(_shift(p, axis, h)) and inside(_shift(p, axis, 2 * h)):
            f0 = fn(p)
            f1 = fn(_shift(p, axis, h))
            f2 = fn(_shift(p, axis, 2 * h))
            return (-3 * f0 + 4 * f1 - f2) / (2 * h)
        if inside(_shift(p, axis, -h)) and inside(_shift(p, axis, -2 * h)):
            f0 = fn(p)
            f1 = fn(_shift(p, axis, -h))
            f2 = fn(_shift(p, axis, -2 * h))
            return (3 * f0 - 4 * f1 + f2) / (2 * h)
        h = h / 10.0
    raise DomainError(f"finite-difference stencil does not fit inside the domain at {p}")


def _always(p) -> bool:
    return True


@dataclass(frozen=True)
class ScalarField:
    """A smooth real-valued field, optionally with an analytic gradient."""

    fn: Callable
    grad: Callable | None = None
    name: str = ""

    def __call__(self, p) -> float:
        return float(self.fn(as_point(p)))

    def gradient(self, p, domain=None) -> np.ndarray:
        p = as_point(p)
        if self.grad is not None:
            return np.asarray(self.grad(p), dtype=float)
        return np.array(
            [
                partial_along(self.fn, p, k, relative_step(p[k], REL_STEP), domain)
                for k in (0, 1)
            ]
        )

    @staticmethod
    def constant(value: float, name: str = "") -> "ScalarField":
        v = float(value)
        return ScalarField(lambda p: v, grad=lambda p: (0.0, 0.0), name=name)


@dataclass(frozen=True)
class OneForm:
    """A field of covector components ``(w_1, w_2)`` in the coordinate frame."""

    comps: Callable
    name: str = ""

    def at(self, p) -> np.ndarray:
        return np.asarray(self.comps(as_point(p)), dtype=float)

    @staticmethod
    def zero(name: str = "zero") -> "OneForm":
        return OneForm(lambda p: (0.0, 0.0), name=name)


@dataclass(frozen=True)
class VectorField:
    """A field of vector components ``(X^1, X^2)`` in the coordinate frame."""

    comps: Callable
    name: str = ""

    def at(self, p) -> np.ndarray:
        return np.asarray(self.comps(as_point(p)), dtype=float)

    @staticmethod
    def zero(name: str = "zero") -> "VectorField":
        return VectorField(lambda p: (0.0, 0.0), name=name)


@dataclass(frozen=True)
class Metric2D:
    """A field of symmetric positive-definite 2x2 matrices.

    ``fn`` maps a point to the matrix of components; ``domain`` is the
    predicate of validity; ``partials``, when given, maps a point to the
    ``(2, 2, 2)`` array ``P[k, i, j] = d(gamma_ij)/d(u^k)``.
    """

    fn: Callable
    domain: Callable = _always
    partials: Callable | None = None
    name: str = ""

    def contains(self, p) -> bool:
        return bool(self.domain(as_point(p)))

    def ensure_inside(self, p) -> Point2:
        p = as_point(p)
        if not self.domain(p):
            raise DomainError(f"point outside domain of metric {self.name!r}: {p}")
        return p

    def matrix(self, p) -> np.ndarray:
        p = self.ensure_inside(p)
        return np.asarray(self.fn(p), dtype=float)

    def det(self, p) -> float:
        g = self.matrix(p)
        return g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]

    def sqrt_det(self, p) -> float:
        d = self.det(p)
        if d <= 0.0:
            raise SingularMetricError(f"non-positive metric determinant {d} at {as_point(p)}")
        return float(np.sqrt(d))

    def inverse(self, p) -> np.ndarray:
        g = self.matrix(p)
        d = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        if abs(d) < SINGULAR_DET:
            raise SingularMetricError(f"singular metric matrix at {as_point(p)}")
        if d < 0.0 or g[0, 0] <= 0.0:
            raise SingularMetricError(f"metric not positive definite at {as_point(p)}")
        return np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / d

    def partial_matrix(self, p) -> np.ndarray:
        """``(2, 2, 2)`` array of ``d(gamma_ij)/d(u^k)``, analytic when available."""
        p = self.ensure_inside(p)
        if self.partials is not None:
            return np.asarray(self.partials(p), dtype=float)
        return np.stack(
            [
                partial_along(
                    lambda q: np.asarray(self.fn(q), dtype=float),
                    p,
                    k,
                    relative_step(p[k], REL_STEP),
                    self.domain,
                )
                for k in (0, 1)
            ]
        )


def christoffel_lc(metric: Metric2D, p) -> np.ndarray:
    """Levi-Civita Christoffel symbols, shape ``(2, 2, 2)`` as ``G[k, i, j]``.

    ``G[k, i, j] = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)``; symmetric in
    ``(i, j)``.
    """
    p = metric.ensure_inside(p)
    ginv = metric.inverse(p)
    P = metric.partial_matrix(p)
    B = P + P.swapaxes(0, 1) - np.moveaxis(P, 0, 2)
    return 0.5 * np.einsum("kl,ijl->kij", ginv, B)


def curvature_from_coeffs(coeffs, p, domain=None, step: float = CURVATURE_STEP) -> np.ndarray:
    """Coordinate curvature of a connection given by its coefficient field.

    ``R[l, k, i, j] = d_i G[l, j, k] - d_j G[l, i, k]
    + G[l, i, m] G[m, j, k] - G[l, j, m] G[m, i, k]``.
    """
    p = as_point(p)
    G = np.asarray(coeffs(p), dtype=float)
    dG = np.stack(
        [
            partial_along(
                lambda q: np.asarray(coeffs(q), dtype=float),
                p,
                d,
                relative_step(p[d], step),
                domain,
                order=4,
            )
            for d in (0, 1)
        ]
    )
    # dG[d, l, a, b] = d_d G[l, a, b]
    D1 = dG.transpose(1, 3, 0, 2)  # D1[l, k, i, j] = d_i G[l, j, k]
    D2 = D1.transpose(0, 1, 3, 2)
    Q = np.einsum("lim,mjk->lijk", G, G)
    P1 = Q.transpose(0, 3, 1, 2)  # P1[l, k, i, j] = G[l, i, m] G[m, j, k]
    P2 = P1.transpose(0, 1, 3, 2)
    return D1 - D2 + P1 - P2


def gauss_curvature(metric: Metric2D, p) -> float:
    """Sectional curvature of the metric: ``gamma(R(e1, e2)e2, e1)`` for a
    gamma-orthonormal frame, computed as ``R_1212 / det(gamma)``."""
    p = metric.ensure_inside(p)
    R = curvature_from_coeffs(lambda q: christoffel_lc(metric, q), p, metric.domain)
    g = metric.matrix(p)
    r_1212 = g[0, :] @ R[:, 1, 0, 1]
    return float(r_1212 / metric.det(p))


def divergence(metric: Metric2D, X: VectorField, p) -> float:
    """Metric divergence ``(1/sqrt(det g)) * d_k(sqrt(det g) X^k)``."""
    p = metric.ensure_inside(p)

    def weighted(k):
        return lambda q: metric.sqrt_det(q) * float(X.at(q)[k])

    total = sum(
        partial_along(weighted(k), p, k, relative_step(p[k], REL_STEP), metric.domain)
        for k in (0, 1)
    )
    return float(total / metric.sqrt_det(p))


def sharp(metric: Metric2D, form: OneForm, p) -> np.ndarray:
    """Vector components of the metric dual of a one-form: ``w^i = g^{ik} w_k``."""
    return metric.inverse(p) @ form.at(p)


def flat(metric: Metric2D, X: VectorField, p) -> np.ndarray:
    """One-form components of the metric dual of a vector: ``w_i = g_ik X^k``."""
    return metric.matrix(p) @ X.at(p)


def sharp_field(metric: Metric2D, form: OneForm) -> VectorField:
    return VectorField(
        comps=lambda p: metric.inverse(p) @ form.at(p),
        name=f"sharp({form.name})" if form.name else "sharp",
    )


def potential_to_oneform(surface_kind: str, potential: ScalarField) -> OneForm:
    """One-form whose metric dual realizes the curvature of a built-in surface
    as a divergence.

    * ``euclidean``: ``(w_1, w_2) = (-df/du2, df/du1)`` (divergence-free dual).
    * ``hyperbolic``: ``(w_1, w_2) = (df/du2, -df/du1 - 1/u2)`` on the upper
      half-plane.
    """
    if surface_kind == "euclidean":

        def comps(p):
            d = potential.gradient(p)
            return (-d[1], d[0])

        return OneForm(comps, name=f"rot-grad({potential.name})")
    if surface_kind == "hyperbolic":
        half_plane = lambda q: q.u2 > 0.0

        def comps(p):
            p = as_point(p)
            if p.u2 <= 0.0:
                raise DomainError(f"point outside upper half-plane: {p}")
            d = potential.gradient(p, domain=half_plane)
            return (d[1], -d[0] - 1.0 / p.u2)

        return OneForm(comps, name=f"half-plane-dual({potential.name})")
    raise ValueError(f"no divergence-representation recipe for surface kind {surface_kind!r}")


def oneform_curl(form: OneForm, p, domain=None) -> float:
    """Exterior-derivative coefficient ``d_1 w_2 - d_2 w_1``; zero iff closed."""
    p = as_point(p)
    d1 = partial_along(lambda q: float(form.at(q)[1]), p, 0, relative_step(p.u1, REL_STEP), domain)
    d2 = partial_along(lambda q: float(form.at(q)[0]), p, 1, relative_step(p.u2, REL_STEP), domain)
    return float(d1 - d2)
