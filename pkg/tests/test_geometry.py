import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berwald2d import (
    DomainError,
    Metric2D,
    OneForm,
    ScalarField,
    SingularMetricError,
    VectorField,
    christoffel_lc,
    divergence,
    flat,
    gauss_curvature,
    potential_to_oneform,
    sharp,
    sharp_field,
)
from conftest import EUCLID_BOX, HYPERBOLIC_BOX, sample_points


def conformal_metric(amplitude=0.1):
    """exp(2*sigma)*delta with sigma = a*sin(u1)*sin(u2), no analytic partials
    (exercises the finite-difference path)."""

    def fn(p):
        s = math.exp(2.0 * amplitude * math.sin(p.u1) * math.sin(p.u2))
        return np.array([[s, 0.0], [0.0, s]])

    return Metric2D(fn=fn, name="conformal-test")


def oracle_christoffel(metric_fn, p, h=1e-4):
    """Brute-force evaluation of the Christoffel formula with plain central
    differences; independent of the library's derivative machinery."""
    u1, u2 = p
    dg = np.stack(
        [
            (metric_fn((u1 + h, u2)) - metric_fn((u1 - h, u2))) / (2 * h),
            (metric_fn((u1, u2 + h)) - metric_fn((u1, u2 - h))) / (2 * h),
        ]
    )
    ginv = np.linalg.inv(metric_fn(p))
    G = np.empty((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                G[k, i, j] = 0.5 * sum(
                    ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                    for l in range(2)
                )
    return G


class TestChristoffel:
    def test_euclidean_all_zero(self, euclid):
        for p in sample_points(EUCLID_BOX, 5, seed=1):
            assert np.abs(christoffel_lc(euclid.metric, p)).max() == 0.0

    def test_hyperbolic_table_point(self, hyperbolic):
        G = christoffel_lc(hyperbolic.metric, (0.0, 2.0))
        expected = np.zeros((2, 2, 2))
        expected[0, 0, 1] = expected[0, 1, 0] = -0.5
        expected[1, 0, 0] = 0.5
        expected[1, 1, 1] = -0.5
        assert np.abs(G - expected).max() < 1e-12

    def test_matches_finite_difference_oracle(self):
        metric = conformal_metric()

        def metric_fn(p):
            s = math.exp(2.0 * 0.1 * math.sin(p[0]) * math.sin(p[1]))
            return np.array([[s, 0.0], [0.0, s]])

        p = (0.3, 0.7)
        assert np.abs(
            christoffel_lc(metric, p) - oracle_christoffel(metric_fn, p)
        ).max() < 1e-6

    def test_symmetric_in_lower_indices(self, hyperbolic):
        metric = conformal_metric(0.3)
        for p in sample_points(EUCLID_BOX, 10, seed=2):
            G = christoffel_lc(metric, p)
            assert np.abs(G - G.transpose(0, 2, 1)).max() < 1e-9
        for p in sample_points(HYPERBOLIC_BOX, 10, seed=3):
            G = christoffel_lc(hyperbolic.metric, p)
            assert np.abs(G - G.transpose(0, 2, 1)).max() == 0.0


class TestGaussCurvature:
    def test_euclidean_zero(self, euclid):
        for p in sample_points(EUCLID_BOX, 5, seed=4):
            assert gauss_curvature(euclid.metric, p) == 0.0

    def test_hyperbolic_value(self, hyperbolic):
        assert abs(gauss_curvature(hyperbolic.metric, (1.5, 0.4)) + 1.0) < 1e-6

    def test_hyperbolic_grid(self, hyperbolic):
        for a in np.linspace(-2.0, 2.0, 20):
            for b in np.linspace(0.1, 4.0, 20):
                assert abs(gauss_curvature(hyperbolic.metric, (a, b)) + 1.0) < 1e-6

    def test_conformal_matches_analytic_curvature(self):
        # K = -exp(-2 sigma) * Laplace(sigma) for a conformally flat metric
        metric = conformal_metric()
        p = (1.0, 2.0)
        sigma = 0.1 * math.sin(p[0]) * math.sin(p[1])
        lap = -2.0 * 0.1 * math.sin(p[0]) * math.sin(p[1])
        expected = -math.exp(-2.0 * sigma) * lap
        assert abs(gauss_curvature(metric, p) - expected) < 1e-5


class TestDivergence:
    def test_rotational_field_divergence_free(self, euclid):
        X = VectorField(lambda p: (p.u2, -p.u1))
        for p in sample_points(EUCLID_BOX, 6, seed=5):
            assert abs(divergence(euclid.metric, X, p)) < 1e-10

    def test_hyperbolic_example_field(self, hyperbolic):
        X = VectorField(lambda p: (p.u2, -p.u2))
        for p in sample_points(HYPERBOLIC_BOX, 6, seed=6):
            assert abs(divergence(hyperbolic.metric, X, p) - 1.0) < 1e-8

    def test_zero_field(self, hyperbolic, euclid):
        Z = VectorField.zero()
        assert divergence(euclid.metric, Z, (0.4, -1.1)) == 0.0
        assert abs(divergence(hyperbolic.metric, Z, (0.4, 1.1))) == 0.0


class TestMusicalIsomorphisms:
    def test_sharp_euclidean_identity(self, euclid):
        w = OneForm(lambda p: (0.3, -1.7))
        assert np.allclose(sharp(euclid.metric, w, (0.2, 0.9)), [0.3, -1.7])

    def test_sharp_hyperbolic_value(self, hyperbolic):
        w = OneForm(lambda p: (1.0 / p.u2, -1.0 / p.u2))
        assert np.abs(sharp(hyperbolic.metric, w, (0.0, 2.0)) - [2.0, -2.0]).max() < 1e-14

    @settings(deadline=None, max_examples=60)
    @given(
        w1=st.floats(-5, 5),
        w2=st.floats(-5, 5),
        u1=st.floats(-2, 2),
        u2=st.floats(0.3, 3.0),
    )
    def test_flat_sharp_roundtrip(self, hyperbolic, w1, w2, u1, u2):
        w = OneForm(lambda p: (w1, w2))
        p = (u1, u2)
        X = VectorField(lambda q: tuple(sharp(hyperbolic.metric, w, q)))
        assert np.abs(flat(hyperbolic.metric, X, p) - [w1, w2]).max() < 1e-12

    def test_singular_metric_rejected(self):
        metric = Metric2D(fn=lambda p: np.array([[1.0, 1.0], [1.0, 1.0]]))
        with pytest.raises(SingularMetricError):
            metric.inverse((0.0, 0.0))


class TestPotentialToOneForm:
    def test_euclidean_rotational_example(self, euclid_pair):
        _, w, _ = euclid_pair
        for p in sample_points(EUCLID_BOX, 5, seed=7):
            assert np.abs(w.at(p) - [p[1], -p[0]]).max() < 1e-12

    def test_hyperbolic_log_example(self, hyperbolic_pair):
        _, w, _ = hyperbolic_pair
        for p in sample_points(HYPERBOLIC_BOX, 5, seed=8):
            expected = [1.0 / p[1], -1.0 / p[1]]
            assert np.abs(w.at(p) - expected).max() < 1e-12

    def test_zero_potential(self):
        w = potential_to_oneform("euclidean", ScalarField.constant(0.0))
        assert np.abs(w.at((1.3, -0.4))).max() == 0.0

    def test_unsupported_kind(self):
        with pytest.raises(ValueError, match="no divergence-representation recipe"):
            potential_to_oneform("sphere", ScalarField.constant(0.0))


class TestInvariants:
    def test_levi_civita_metric_compatibility_by_finite_differences(self, hyperbolic):
        # the covariant derivative of the metric, with the metric derivative
        # taken by plain central differences, vanishes for Levi-Civita
        h = 1e-5
        metric = hyperbolic.metric
        for p in sample_points(((-2.0, 2.0), (0.3, 3.0)), 8, seed=9):
            G = christoffel_lc(metric, p)
            g = metric.matrix(p)
            dg = np.stack(
                [
                    (metric.matrix((p[0] + h, p[1])) - metric.matrix((p[0] - h, p[1])))
                    / (2 * h),
                    (metric.matrix((p[0], p[1] + h)) - metric.matrix((p[0], p[1] - h)))
                    / (2 * h),
                ]
            )
            nabla_g = dg - np.einsum("mki,mj->kij", G, g) - np.einsum("mkj,im->kij", G, g)
            assert np.abs(nabla_g).max() < 1e-6

    def test_divergence_identity_for_builtin_pairs(self, euclid, hyperbolic, euclid_pair,
                                                   hyperbolic_pair):
        for surface, (_, w, _), box in (
            (euclid, euclid_pair, EUCLID_BOX),
            (hyperbolic, hyperbolic_pair, HYPERBOLIC_BOX),
        ):
            dual = sharp_field(surface.metric, w)
            for p in sample_points(box, 10, seed=10):
                residual = gauss_curvature(surface.metric, p) + divergence(
                    surface.metric, dual, p
                )
                assert abs(residual) < 1e-6

    def test_domain_error_outside_half_plane(self, hyperbolic):
        with pytest.raises(DomainError):
            christoffel_lc(hyperbolic.metric, (0.0, -1.0))
        with pytest.raises(DomainError):
            gauss_curvature(hyperbolic.metric, (0.0, 0.0))

    def test_analytic_gradients_match_finite_differences(self, euclid_pair,
                                                         hyperbolic_pair):
        h = 1e-6
        for f, box in ((euclid_pair[0], EUCLID_BOX), (hyperbolic_pair[0], HYPERBOLIC_BOX)):
            for p in sample_points(box, 6, seed=24):
                fd = [
                    (f((p[0] + h, p[1])) - f((p[0] - h, p[1]))) / (2 * h),
                    (f((p[0], p[1] + h)) - f((p[0], p[1] - h))) / (2 * h),
                ]
                assert np.abs(f.gradient(p) - fd).max() < 1e-8

    def test_builtin_metrics_positive_definite(self, euclid, hyperbolic):
        metrics = [
            (euclid.metric, sample_points(EUCLID_BOX, 6, seed=25)),
            (hyperbolic.metric, sample_points(HYPERBOLIC_BOX, 6, seed=26)),
            (conformal_metric(0.3), sample_points(EUCLID_BOX, 6, seed=27)),
        ]
        for metric, points in metrics:
            for p in points:
                g = metric.matrix(p)
                assert np.abs(g - g.T).max() == 0.0
                assert np.linalg.eigvalsh(g).min() > 0.0
                assert metric.det(p) > 0.0
