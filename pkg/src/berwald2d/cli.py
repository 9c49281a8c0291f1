"""Command-line front end.

Subcommands::

    berwald2d verify    --config FILE [--out DIR] [--steps N]
    berwald2d transport --config FILE [--out DIR] [--steps N]
    berwald2d figure    --config FILE [--out DIR] [--steps N] [--frames N]
    berwald2d torus     --config FILE [--out DIR]

Exit codes: 0 all checks pass, 1 verification failure, 2 configuration
error, 3 domain violation.  Every command writes delimited output (CSV with
17 significant digits) plus a PNG rendering to the output directory; the
``figure`` command additionally writes the SVG-subset vector document used
for golden-file comparisons.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import render
from .connection import (
    curvature_tensor,
    metric_defect,
    verify_divergence_representation,
)
from .finsler import TrifocalEllipse, boundary_points, gauge
from .geometry import DomainError, Point2, oneform_curl
from .scenario import ConfigError, Scenario
from .surfaces import (
    PeriodicSurface,
    check_periodicity,
    gauss_bonnet_integral,
    metric_periodicity_defect,
    solve_x2_field,
    verify_field_divergence,
)
from .svgout import SvgCanvas
from .transport import (
    EUCLIDEAN_TRANSPORT_NOTE,
    Curve,
    holonomy,
    parallel_transport,
    transport_matrix,
)

FLATNESS_TOL = 1e-5
DEFECT_TOL = 1e-6
HOLONOMY_TOL = 1e-7
CLOSEDNESS_TOL = 1e-8
METRIC_PERIOD_TOL = 1e-10
FIELD_PERIOD_TOL = 1e-8
GAUSS_BONNET_TOL = 1e-4

_SAMPLING_SEED = 20240615


def _g17(value) -> str:
    return "%.17g" % float(value)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_g17(v) for v in row) + "\n")


def _sample_box(surface: PeriodicSurface):
    """Rectangle used for grids and random sampling, per surface."""
    if surface.name == "hyperbolic":
        return (-2.0, 2.0), (0.2, 3.0)
    if surface.kind in ("torus", "cylinder"):
        a = surface.periods[0] or 2.0 * math.pi
        b = surface.periods[1] or 2.0 * math.pi
        return (0.0, a), (0.0, b)
    return (-2.0, 2.0), (-2.0, 2.0)


def _grid_points(surface: PeriodicSurface, shape):
    (x0, x1), (y0, y1) = _sample_box(surface)
    return [
        Point2(a, b)
        for a in np.linspace(x0, x1, shape[0])
        for b in np.linspace(y0, y1, shape[1])
    ]


def _random_points(surface: PeriodicSurface, n, rng):
    (x0, x1), (y0, y1) = _sample_box(surface)
    return [
        Point2(x0 + (x1 - x0) * a, y0 + (y1 - y0) * b)
        for a, b in rng.random((n, 2))
    ]


def _probe_loop(surface: PeriodicSurface) -> Curve:
    if surface.name == "hyperbolic":
        return Curve.circle((0.0, 2.0), 1.0)
    if surface.kind in ("torus", "cylinder"):
        (x0, x1), (y0, y1) = _sample_box(surface)
        return Curve.circle(((x0 + x1) / 2, (y0 + y1) / 2), (x1 - x0) / 6)
    return Curve.circle((0.0, 1.0), 1.0)


class _Checks:
    def __init__(self):
        self.rows = []

    def add(self, name, value, tol):
        passed = value <= tol
        self.rows.append((name, value, tol, passed))
        print(f"{'PASS' if passed else 'FAIL'} {name}: max={value:.3e} tol={tol:.1e}")
        return passed

    @property
    def all_passed(self):
        return all(r[3] for r in self.rows)

    def finish(self, label):
        verdict = "PASS" if self.all_passed else "FAIL"
        print(f"RESULT {verdict} {label}")
        return 0 if self.all_passed else 1


def cmd_verify(scenario: Scenario, out_dir: Path) -> int:
    surface = scenario.build_surface()
    form = scenario.build_one_form(surface)
    conn = scenario.build_connection(surface, form)
    rng = np.random.default_rng(_SAMPLING_SEED)

    grid = _grid_points(surface, scenario.verify_grid)
    report = verify_divergence_representation(
        surface.metric, form, grid, tolerance=scenario.verify_tolerance
    )
    random_pts = _random_points(surface, 50, rng)
    flatness = max(float(np.abs(curvature_tensor(conn, p)).max()) for p in random_pts)
    defect = max(metric_defect(conn, surface.metric, p) for p in random_pts)
    loop = _probe_loop(surface)
    hol_dev = float(
        np.abs(holonomy(conn, loop, scenario.steps) - np.eye(2)).max()
    )

    checks = _Checks()
    checks.add("divergence-representation", report.max_residual, report.tolerance)
    checks.add("connection-flatness", flatness, FLATNESS_TOL)
    checks.add("metric-compatibility", defect, DEFECT_TOL)
    checks.add("holonomy-identity", hol_dev, HOLONOMY_TOL)

    curl = max(
        abs(oneform_curl(form, p, surface.metric.domain)) for p in random_pts[:9]
    )
    closed = "closed" if curl <= CLOSEDNESS_TOL else "not closed"
    print(f"note: torsion one-form is {closed} (max |d rho| = {curl:.3e})")
    if surface.potential_kind == "euclidean":
        print(f"note: {EUCLIDEAN_TRANSPORT_NOTE}")

    _write_csv(
        out_dir / "verify_report.csv", ["u1", "u2", "residual"], report.rows()
    )
    render.residual_png(
        out_dir / "verify_report.png",
        [(p.u1, p.u2) for p in report.points],
        report.residuals,
        title="divergence-representation residuals",
    )
    print(f"wrote {out_dir / 'verify_report.csv'}")
    print(f"wrote {out_dir / 'verify_report.png'}")
    return checks.finish("verify")


def _structure_norm_fn(scenario: Scenario, surface, conn, curve):
    """Norm evaluator along the curve via the transport from the base point,
    or None when no indicatrix is configured."""
    if scenario.indicatrix_focal is None:
        return None
    ellipse = scenario.build_indicatrix()
    base = scenario.base_point(surface)
    start = curve.at(0.0)
    if max(abs(base.u1 - start.u1), abs(base.u2 - start.u2)) < 1e-12:
        m0 = np.eye(2)
    else:
        m0 = transport_matrix(conn, Curve.segment(base, start), scenario.steps)

    def norm(matrix, vector):
        m = matrix @ m0
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        w = (
            (m[1, 1] * vector[0] - m[0, 1] * vector[1]) / det,
            (-m[1, 0] * vector[0] + m[0, 0] * vector[1]) / det,
        )
        return gauge(ellipse, w)

    return norm


def cmd_transport(scenario: Scenario, out_dir: Path) -> int:
    surface = scenario.build_surface()
    form = scenario.build_one_form(surface)
    conn = scenario.build_connection(surface, form)
    curve = scenario.build_curve()
    if scenario.x0 is None:
        raise ConfigError("transport requires vector.x0")
    x0 = np.asarray(scenario.x0, dtype=float)

    probes = [curve.at(t) for t in (0.0, 0.25, 0.5, 0.75, 1.0)]
    span = max(
        max(abs(p.u1 - probes[0].u1), abs(p.u2 - probes[0].u2)) for p in probes
    )
    header = ["t", "c1", "c2", "X1", "X2"]
    with_norm = _structure_norm_fn(scenario, surface, conn, curve)
    if with_norm is not None:
        header.append("F")

    if span == 0.0:
        # zero-length curve: transport is the identity; echo the input
        row = [0.0, probes[0].u1, probes[0].u2, x0[0], x0[1]]
        if with_norm is not None:
            row.append(with_norm(np.eye(2), x0))
        _write_csv(out_dir / "transport.csv", header, [row])
        print("note: zero-length curve; single row written")
        print(f"wrote {out_dir / 'transport.csv'}")
        return 0

    res = parallel_transport(conn, curve, x0, scenario.steps)
    points = [curve.at(t) for t in res.ts]
    rows = []
    for n, t in enumerate(res.ts):
        row = [t, points[n].u1, points[n].u2, res.vectors[n][0], res.vectors[n][1]]
        if with_norm is not None:
            row.append(with_norm(res.matrices[n], res.vectors[n]))
        rows.append(row)
    _write_csv(out_dir / "transport.csv", header, rows)
    render.transport_png(
        out_dir / "transport.png",
        [(p.u1, p.u2) for p in points],
        res.vectors,
        title=f"parallel transport along {curve.name}",
    )

    g0 = surface.metric.matrix(points[0])
    g1 = surface.metric.matrix(points[-1])
    n0 = float(res.vectors[0] @ g0 @ res.vectors[0])
    n1 = float(res.vectors[-1] @ g1 @ res.vectors[-1])
    print(f"X(1) = ({_g17(res.vectors[-1][0])}, {_g17(res.vectors[-1][1])})")
    print(f"metric norm drift: {abs(n1 - n0) / max(n0, 1e-300):.3e} (relative)")
    if surface.potential_kind == "euclidean":
        print(f"note: {EUCLIDEAN_TRANSPORT_NOTE}")
    print(f"wrote {out_dir / 'transport.csv'}")
    print(f"wrote {out_dir / 'transport.png'}")
    return 0


def cmd_figure(scenario: Scenario, out_dir: Path) -> int:
    surface = scenario.build_surface()
    form = scenario.build_one_form(surface)
    conn = scenario.build_connection(surface, form)
    curve = scenario.build_curve()
    structure = scenario.build_structure(surface, conn)
    ellipse = structure.base_indicatrix

    start = curve.at(0.0)
    base = structure.base_point
    if max(abs(base.u1 - start.u1), abs(base.u2 - start.u2)) < 1e-12:
        m0 = np.eye(2)
    else:
        m0 = transport_matrix(conn, Curve.segment(base, start), scenario.steps)
    focal0 = m0 @ np.asarray(ellipse.focal)

    res = parallel_transport(conn, curve, focal0, scenario.steps)
    steps = len(res.ts) - 1
    if scenario.frames == 1:
        frame_idx = [0]
    else:
        frame_idx = [
            round(j * steps / (scenario.frames - 1)) for j in range(scenario.frames)
        ]

    base_boundary = boundary_points(ellipse, scenario.figure_samples)
    hyperbolic_mode = surface.name == "hyperbolic"
    frames = []
    for n in frame_idx:
        center = curve.at(res.ts[n])
        m = res.matrices[n] @ m0
        boundary = base_boundary @ m.T
        focal = res.vectors[n]
        overlay = None
        if hyperbolic_mode:
            # comparison curve: same focal points but the level kept fixed;
            # it exists only while the focal distance stays below level/2
            reach = 2.0 * math.hypot(focal[0], focal[1])
            if reach < ellipse.level - 1e-9:
                overlay = boundary_points(
                    TrifocalEllipse((focal[0], focal[1]), ellipse.level),
                    scenario.figure_samples,
                )
            else:
                print(
                    f"note: fixed-level comparison curve is empty at t={res.ts[n]:g} "
                    f"(2|X| = {reach:.3f} >= level = {ellipse.level:g})"
                )
        frames.append(
            {
                "center": np.array([center.u1, center.u2]),
                "boundary": np.vstack([boundary, boundary[:1]]),
                "foci": np.array([-focal, (0.0, 0.0), focal]),
                "overlay": None if overlay is None else np.vstack([overlay, overlay[:1]]),
            }
        )

    stride = max(steps // 256, 1)
    curve_pts = np.array(
        [[curve.at(t).u1, curve.at(t).u2] for t in res.ts[::stride]]
    )

    canvas = SvgCanvas()
    canvas.add_path(curve_pts, stroke="#888888", width=0.8)
    focus_r = 0.03 * max(
        1.0, max(float(np.hypot(*fr["foci"][2])) for fr in frames)
    )
    for fr in frames:
        canvas.add_path(fr["boundary"] + fr["center"], closed=True, stroke="#000000")
        if fr["overlay"] is not None:
            canvas.add_path(
                fr["overlay"] + fr["center"], closed=True, stroke="#006600", dashed=True
            )
        for focus in fr["foci"]:
            canvas.add_circle(fr["center"] + focus, focus_r)
    canvas.write(out_dir / "figure.svg")

    _write_csv(
        out_dir / "figure.csv",
        ["t", "c1", "c2", "X1", "X2"],
        [
            [t, curve.at(t).u1, curve.at(t).u2, v[0], v[1]]
            for t, v in zip(res.ts, res.vectors)
        ],
    )
    render.figure_png(
        out_dir / "figure.png", curve_pts, frames,
        title=f"indicatrix translates along {curve.name}",
    )
    for name in ("figure.svg", "figure.csv", "figure.png"):
        print(f"wrote {out_dir / name}")
    return 0


def cmd_torus(scenario: Scenario, out_dir: Path) -> int:
    surface = scenario.build_surface()
    if surface.kind not in ("torus", "cylinder"):
        raise ConfigError(
            f"torus command requires a torus or cylinder surface, got {surface.name!r}"
        )
    field = solve_x2_field(
        surface,
        x1_field=scenario.build_x1_field(),
        c_fn=scenario.build_free_function(),
        c0=scenario.torus_c0,
        quad_steps=scenario.torus_quad_steps,
    )

    checks = _Checks()
    checks.add("metric-periodicity", metric_periodicity_defect(surface), METRIC_PERIOD_TOL)
    periodicity = check_periodicity(surface, field, tolerance=FIELD_PERIOD_TOL)
    checks.add("field-periodicity", periodicity.max_delta, periodicity.tolerance)

    (x0, x1), (y0, y1) = _sample_box(surface)
    n1, n2 = scenario.torus_grid
    grid = [
        Point2(x0 + (x1 - x0) * i / n1, y0 + (y1 - y0) * j / n2)
        for i in range(n1)
        for j in range(n2)
    ]
    report = verify_field_divergence(surface, field, grid, tolerance=1e-5)
    checks.add("divergence-representation", report.max_residual, report.tolerance)

    if surface.kind == "torus":
        gb = gauss_bonnet_integral(surface, scenario.gb_grid)
        checks.add("gauss-bonnet", abs(gb), GAUSS_BONNET_TOL)
    else:
        print("note: gauss-bonnet integral skipped (cylinder)")

    _write_csv(out_dir / "torus_report.csv", ["u1", "u2", "residual"], report.rows())
    render.residual_png(
        out_dir / "torus_report.png",
        [(p.u1, p.u2) for p in report.points],
        report.residuals,
        title="divergence-representation residuals",
    )
    print(f"wrote {out_dir / 'torus_report.csv'}")
    print(f"wrote {out_dir / 'torus_report.png'}")
    return checks.finish("torus")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="berwald2d",
        description="Flat metric connections, parallel transport and "
        "indicatrix-induced norms on model surfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify", "check the structural identities of a scenario"),
        ("transport", "integrate parallel transport along the scenario curve"),
        ("figure", "emit indicatrix translates (SVG + CSV + PNG)"),
        ("torus", "periodic divergence-representation checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario file")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--steps", type=int, help="override integrator.steps")
        if name == "figure":
            p.add_argument("--frames", type=int, help="override figure.frames")
    return parser


_HANDLERS = {
    "verify": cmd_verify,
    "transport": cmd_transport,
    "figure": cmd_figure,
    "torus": cmd_torus,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = Scenario.from_file(args.config)
        if args.steps is not None:
            if args.steps < 1:
                raise ConfigError("--steps must be >= 1")
            scenario.steps = args.steps
        if getattr(args, "frames", None) is not None:
            if args.frames < 1:
                raise ConfigError("--frames must be >= 1")
            scenario.frames = args.frames
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        return _HANDLERS[args.command](scenario, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
