import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berwald2d import (
    Curve,
    FinslerStructure,
    TrifocalEllipse,
    averaged_metric,
    best_fit_ellipse_residual,
    boundary_points,
    compatibility_check,
    finsler_norm,
    gauge,
    indicatrix_at,
    levi_civita,
    membership,
    riemann_finsler_metric,
)

# positive root of 3 y^2 + 8 y - 12 = 0: height of the standard trifocal
# ellipse above the origin
Y_STAR = (2.0 * math.sqrt(13.0) - 4.0) / 3.0

nice_floats = st.floats(-3.0, 3.0, allow_nan=False)


class TestMembership:
    def test_origin_interior(self, trifocal):
        assert membership(trifocal, (0.0, 0.0)) == -2.0

    def test_axis_boundary_point(self, trifocal):
        # on the positive axis beyond the focus the distance sum is 3x
        assert abs(membership(trifocal, (4.0 / 3.0, 0.0))) < 1e-14

    def test_vertical_boundary_point(self, trifocal):
        assert abs(membership(trifocal, (0.0, Y_STAR))) < 1e-13

    def test_sign_convention(self, trifocal):
        assert membership(trifocal, (0.5, 0.2)) < 0.0
        assert membership(trifocal, (3.0, 3.0)) > 0.0


class TestGauge:
    def test_boundary_value(self, trifocal):
        assert abs(gauge(trifocal, (4.0 / 3.0, 0.0)) - 1.0) < 1e-10

    def test_focus_value(self, trifocal):
        assert abs(gauge(trifocal, (1.0, 0.0)) - 0.75) < 1e-10

    def test_vertical_value(self, trifocal):
        assert abs(gauge(trifocal, (0.0, 2.0 * Y_STAR)) - 2.0) < 1e-10

    def test_origin(self, trifocal):
        assert gauge(trifocal, (0.0, 0.0)) == 0.0

    def test_nonfinite_rejected(self, trifocal):
        with pytest.raises(ValueError, match="non-finite"):
            gauge(trifocal, (math.inf, 0.0))

    @settings(deadline=None, max_examples=80)
    @given(v1=nice_floats, v2=nice_floats, alpha=st.floats(0.05, 20.0))
    def test_positive_homogeneity(self, trifocal, v1, v2, alpha):
        lhs = gauge(trifocal, (alpha * v1, alpha * v2))
        rhs = alpha * gauge(trifocal, (v1, v2))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, rhs)

    @settings(deadline=None, max_examples=80)
    @given(v1=nice_floats, v2=nice_floats, w1=nice_floats, w2=nice_floats)
    def test_subadditivity(self, trifocal, v1, v2, w1, w2):
        both = gauge(trifocal, (v1 + w1, v2 + w2))
        assert both <= gauge(trifocal, (v1, v2)) + gauge(trifocal, (w1, w2)) + 1e-10

    def test_degenerate_circle_case(self):
        circle = TrifocalEllipse((0.0, 0.0), 1.0)
        assert abs(gauge(circle, (0.2, 0.0)) - 0.6) < 1e-12
        assert abs(gauge(circle, (0.0, -0.5)) - 1.5) < 1e-12


class TestEllipseValidation:
    def test_level_must_exceed_focal_spread(self):
        with pytest.raises(ValueError, match="level"):
            TrifocalEllipse((1.0, 0.0), 2.0)
        with pytest.raises(ValueError, match="level"):
            TrifocalEllipse((2.0, 1.0), 4.0)

    def test_non_riemannian_residual(self, trifocal):
        pts = boundary_points(trifocal, 360)
        assert best_fit_ellipse_residual(pts) >= 1e-2

    def test_circle_fits_an_ellipse_exactly(self):
        pts = boundary_points(TrifocalEllipse((0.0, 0.0), 3.0), 120)
        assert best_fit_ellipse_residual(pts) < 1e-10


class TestIndicatrixTranslation:
    def test_base_point_identity(self, euclid_structure):
        ind = indicatrix_at(euclid_structure, (0.0, 0.0))
        assert np.abs(ind.matrix - np.eye(2)).max() < 1e-12
        foci = ind.foci()
        assert np.allclose(foci[2], [1.0, 0.0])
        assert np.allclose(foci[0], [-1.0, 0.0])

    def test_euclid_radial_foci_rotate(self, euclid_structure):
        # at (t, t) the focal vector is rotated by t^2
        for t in (0.5, 1.0, 1.4):
            ind = indicatrix_at(euclid_structure, (t, t))
            x = ind.foci()[2]
            expected = [math.cos(t * t), math.sin(t * t)]
            assert np.abs(x - expected).max() < 1e-8

    def test_hyperbolic_line_foci(self, hyperbolic_structure):
        # at (t, t+1) the focal vector is (t+1)(cos log(t+1), sin log(t+1))
        for t in (0.5, 1.0, 2.0):
            ind = indicatrix_at(hyperbolic_structure, (t, t + 1.0))
            x = ind.foci()[2]
            s = t + 1.0
            expected = [s * math.cos(math.log(s)), s * math.sin(math.log(s))]
            assert np.abs(x - expected).max() < 1e-8

    def test_path_endpoint_mismatch(self, euclid_structure):
        with pytest.raises(ValueError, match="path"):
            indicatrix_at(euclid_structure, (1.0, 1.0), path=Curve.segment((0, 0), (1, 0)))
        with pytest.raises(ValueError, match="path"):
            indicatrix_at(euclid_structure, (1.0, 1.0), path=Curve.segment((0.5, 0), (1, 1)))

    def test_path_independence(self, hyperbolic_structure):
        p = (1.0, 2.0)
        direct = indicatrix_at(hyperbolic_structure, p)
        arc = Curve.circle((1.0, 1.0), 1.0, math.pi, math.pi / 2)
        via_arc = indicatrix_at(hyperbolic_structure, p, path=arc)
        assert np.abs(direct.matrix - via_arc.matrix).max() < 1e-6


class TestFinslerNorm:
    def test_base_point_is_gauge(self, euclid_structure, trifocal):
        assert finsler_norm(euclid_structure, (0.0, 0.0), (1.0, 0.0)) == pytest.approx(
            gauge(trifocal, (1.0, 0.0)), abs=1e-12
        )

    def test_invariance_along_radial(self, euclid_structure):
        for t in (0.3, 0.8, 1.2):
            v = [math.cos(t * t), math.sin(t * t)]  # the transported focal vector
            assert abs(finsler_norm(euclid_structure, (t, t), v) - 0.75) < 1e-8

    def test_invariance_hyperbolic(self, hyperbolic_structure):
        ind = indicatrix_at(hyperbolic_structure, (0.0, 2.0))
        v = ind.matrix @ np.array([1.0, 0.0])
        assert abs(finsler_norm(hyperbolic_structure, (0.0, 2.0), v) - 0.75) < 1e-8

    def test_scaling(self, hyperbolic_structure):
        p = (0.5, 1.5)
        f1 = finsler_norm(hyperbolic_structure, p, (0.4, 0.1))
        f2 = finsler_norm(hyperbolic_structure, p, (0.8, 0.2))
        assert abs(f2 - 2.0 * f1) < 1e-9


class TestCompatibility:
    def test_euclid_circle_passes(self, euclid_structure):
        report = compatibility_check(
            euclid_structure, Curve.circle((0.0, 1.0), 1.0), (1.0, 0.0), samples=10
        )
        assert report.passed
        assert report.max_deviation < 1e-6

    def test_hyperbolic_line_passes(self, hyperbolic_structure):
        report = compatibility_check(
            hyperbolic_structure, Curve.segment((0, 1), (2, 3)), (1.0, 0.0), samples=10
        )
        assert report.passed

    def test_levi_civita_transport_fails(self, euclid_structure, euclid):
        # transporting with the plain flat connection does not keep the
        # rotating indicatrix family invariant
        report = compatibility_check(
            euclid_structure,
            Curve.circle((0.0, 1.0), 1.0),
            (1.0, 0.0),
            samples=10,
            transport_connection=levi_civita(euclid.metric),
        )
        assert report.max_deviation > 1e-3
        assert not report.passed

    def test_report_rows(self, euclid_structure):
        report = compatibility_check(
            euclid_structure, Curve.segment((0, 0), (0.5, 0.5)), (1.0, 0.0), samples=4
        )
        assert len(report.rows()) == 4


class TestAveragedMetric:
    def test_circle_control_proportional_to_identity(self, euclid_pair):
        _, _, conn = euclid_pair
        circle = TrifocalEllipse((0.0, 0.0), 1.0)
        fs = FinslerStructure((0.0, 0.0), circle, conn)
        g = averaged_metric(fs, (0.0, 0.0))
        scale = 0.5 * (g[0, 0] + g[1, 1])
        assert abs(g[0, 1]) < 1e-3 * scale
        assert abs(g[0, 0] - g[1, 1]) < 1e-3 * scale
        # gauge is 3|v| for the unit level, so the Hessian metric is 9*I and
        # the indicatrix radius 1/3: the average is 9 * 9^(1/2)/9 * 2 pi
        assert abs(scale - 18.0 * math.pi) < 1e-6

    def test_congruence_under_transport(self, euclid_structure):
        g0 = averaged_metric(euclid_structure, (0.0, 0.0))
        gp = averaged_metric(euclid_structure, (1.0, 1.0))
        M = indicatrix_at(euclid_structure, (1.0, 1.0)).matrix
        assert np.abs(M.T @ gp @ M - g0).max() < 1e-3

    def test_positive_definite_at_random_points(self, euclid_structure):
        rng = np.random.default_rng(23)
        for _ in range(10):
            p = rng.uniform(-1.5, 1.5, size=2)
            g = averaged_metric(euclid_structure, p, quad_points=180)
            assert g[0, 0] > 0
            assert np.linalg.det(g) > 0
            assert abs(g[0, 1] - g[1, 0]) < 1e-12

    def test_hessian_metric_of_circle_gauge(self):
        circle = TrifocalEllipse((0.0, 0.0), 3.0)  # gauge = |v|
        g = riemann_finsler_metric(lambda v: gauge(circle, v), (0.4, 0.9))
        assert np.abs(g - np.eye(2)).max() < 1e-6


class TestStructureValidation:
    def test_nontrivial_holonomy_rejected(self, hyperbolic, trifocal):
        with pytest.raises(ValueError, match="holonomy"):
            FinslerStructure((0.0, 1.0), trifocal, levi_civita(hyperbolic.metric))

    def test_base_point_outside_domain(self, hyperbolic_pair, trifocal):
        _, _, conn = hyperbolic_pair
        from berwald2d import DomainError

        with pytest.raises(DomainError):
            FinslerStructure((0.0, -1.0), trifocal, conn)
