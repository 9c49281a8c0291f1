"""Metric linear connections with vectorial torsion.

Builds the torsion-carrying metric connection from a metric and a one-form,
and provides the structural checks used throughout: torsion recovery, the
coordinate curvature tensor, the metric-compatibility defect and the
divergence representation of the Gauss curvature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence


import numpy as np

from .geometry import (
    CURVATURE_STEP,
    Metric2D,
    OneForm,
    as_point,
    christoffel_lc,
    curvature_from_coeffs,
    divergence,
    gauss_curvature,
    sharp_field,
    _always,
)


@dataclass(frozen=True)
class Connection2D:
    """A linear connection given by its coefficient field.

    ``coeffs(p)`` has shape ``(2, 2, 2)``; ``coeffs(p)[k, i, j]`` is the
    output component ``k`` for differentiation direction ``i`` acting on
    argument ``j``.  ``torsion_form`` records the one-form of a vectorial
    torsion when the connection was built from one.
    """

    coeffs: Callable
    domain: Callable = _always
    torsion_form: OneForm | None = None
    name: str = ""

    def at(self, p) -> np.ndarray:
        return np.asarray(self.coeffs(as_point(p)), dtype=float)


def levi_civita(metric: Metric2D) -> Connection2D:
    return Connection2D(
        coeffs=lambda p: christoffel_lc(metric, p),
        domain=metric.domain,
        torsion_form=None,
        name=f"levi-civita({metric.name})" if metric.name else "levi-civita",
    )


def semi_symmetric(metric: Metric2D, form: OneForm) -> Connection2D:
    """The metric connection whose torsion is ``T(X, Y) = w(X)Y - w(Y)X``.

    Coefficients: ``G[k, i, j] = G*[k, i, j] - w_j delta^k_i + g_ij w^k``
    where ``G*`` is Levi-Civita and ``w^k`` the metric dual of ``w``.
    """
    eye = np.eye(2)

    def coeffs(p):
        p = metric.ensure_inside(p)
        G = christoffel_lc(metric, p)
        w = form.at(p)
        w_up = metric.inverse(p) @ w
        g = metric.matrix(p)
        return G - np.einsum("ki,j->kij", eye, w) + np.einsum("k,ij->kij", w_up, g)

    return Connection2D(
        coeffs=coeffs,
        domain=metric.domain,
        torsion_form=form,
        name=f"semi-symmetric({metric.name})" if metric.name else "semi-symmetric",
    )


def torsion(conn: Connection2D, p) -> np.ndarray:
    """Torsion components ``T[k, i, j] = G[k, i, j] - G[k, j, i]``."""
    G = conn.at(p)
    return G - G.transpose(0, 2, 1)


def torsion_form_components(conn: Connection2D, p) -> np.ndarray:
    """Recover ``(w_1, w_2)`` from a vectorial torsion: ``w_1 = T^2_12``,
    ``w_2 = T^1_21``."""
    T = torsion(conn, p)
    return np.array([T[1, 0, 1], T[0, 1, 0]])


def curvature_tensor(conn: Connection2D, p, step: float = CURVATURE_STEP) -> np.ndarray:
    """Coordinate curvature ``R[l, k, i, j]`` of the connection (see
    :func:`berwald2d.geometry.curvature_from_coeffs`)."""
    return curvature_from_coeffs(conn.coeffs, p, conn.domain, step)


def metric_defect(conn: Connection2D, metric: Metric2D, p) -> float:
    """Max-abs covariant derivative of the metric; zero iff the connection is
    metric at ``p``.

    ``defect = max_{k,i,j} | d_k g_ij - G^m_ki g_mj - G^m_kj g_im |``
    """
    p = metric.ensure_inside(p)
    P = metric.partial_matrix(p)
    G = conn.at(p)
    g = metric.matrix(p)
    a = np.einsum("mki,mj->kij", G, g)
    b = np.einsum("mkj,im->kij", G, g)
    return float(np.abs(P - a - b).max())


@dataclass(frozen=True)
class DivergenceReport:
    """Pointwise residuals of ``kappa + div(w^sharp) = 0``."""

    points: tuple
    residuals: np.ndarray
    tolerance: float

    @property
    def max_residual(self) -> float:
        return float(np.abs(self.residuals).max())

    @property
    def mean_residual(self) -> float:
        return float(np.abs(self.residuals).mean())

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def rows(self):
        """CSV-ready rows ``(u1, u2, residual)``."""
        return [
            (p.u1, p.u2, float(r)) for p, r in zip(self.points, self.residuals)
        ]


def verify_divergence_representation(
    metric: Metric2D,
    form: OneForm,
    sample: Sequence,
    tolerance: float = 1e-5,
) -> DivergenceReport:
    """Check ``gauss_curvature + divergence(sharp(form)) = 0`` on a sample."""
    points = tuple(as_point(p) for p in sample)
    if not points:
        raise ValueError("empty sample")
    dual = sharp_field(metric, form)
    residuals = np.array(
        [gauss_curvature(metric, p) + divergence(metric, dual, p) for p in points]
    )
    return DivergenceReport(points=points, residuals=residuals, tolerance=tolerance)
