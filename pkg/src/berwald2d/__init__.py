"""Flat metric connections, parallel transport and indicatrix-induced norms
on model surfaces (plane, upper half-plane, tori)."""

from .geometry import (
    DomainError,
    Metric2D,
    OneForm,
    Point2,
    ScalarField,
    SingularMetricError,
    VectorField,
    christoffel_lc,
    divergence,
    flat,
    gauss_curvature,
    oneform_curl,
    potential_to_oneform,
    sharp,
    sharp_field,
)
from .connection import (
    Connection2D,
    DivergenceReport,
    curvature_tensor,
    levi_civita,
    metric_defect,
    semi_symmetric,
    torsion,
    torsion_form_components,
    verify_divergence_representation,
)
from .transport import (
    Curve,
    TransportResult,
    closed_form_euclidean,
    closed_form_hyperbolic,
    holonomy,
    parallel_transport,
    transport_matrix,
)
from .finsler import (
    CompatibilityReport,
    FinslerStructure,
    TranslatedIndicatrix,
    TrifocalEllipse,
    averaged_metric,
    best_fit_ellipse_residual,
    boundary_points,
    compatibility_check,
    finsler_norm,
    gauge,
    indicatrix_at,
    membership,
    riemann_finsler_metric,
)
from .surfaces import (
    PeriodicSurface,
    PeriodicityReport,
    check_periodicity,
    conformal_torus,
    euclidean_surface,
    flat_torus,
    gauss_bonnet_integral,
    hyperbolic_surface,
    metric_periodicity_defect,
    potential_by_name,
    simpson,
    solve_x2,
    solve_x2_field,
    surface_by_name,
    verify_field_divergence,
)
from .scenario import ConfigError, Scenario

__version__ = "0.1.0"
