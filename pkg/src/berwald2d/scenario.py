"""Scenario configuration: flat key-value files with dotted sections.

A scenario file is plain text, one ``key = value`` assignment per line,
``#`` starts a comment.  Numeric values (scalars and comma-separated pairs)
are parsed with the constant subset of the expression grammar, so exact
values like ``cos(1)`` are expressible.  See the README for the full key
reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .expressions import ExpressionError, compile_expression, evaluate_constant
from .geometry import OneForm, Point2, ScalarField, potential_to_oneform
from .connection import Connection2D, semi_symmetric
from .transport import Curve
from .finsler import FinslerStructure, TrifocalEllipse
from .surfaces import PeriodicSurface, potential_by_name, surface_by_name


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


KNOWN_KEYS = {
    "name",
    "surface.name",
    "surface.periods",
    "rho.kind",
    "rho.f",
    "rho.rho1",
    "rho.rho2",
    "curve.kind",
    "curve.start",
    "curve.end",
    "curve.center",
    "curve.radius",
    "curve.angle0",
    "curve.angle1",
    "curve.points",
    "vector.x0",
    "indicatrix.focal",
    "indicatrix.level",
    "indicatrix.base",
    "integrator.steps",
    "figure.frames",
    "figure.samples",
    "verify.grid",
    "verify.tolerance",
    "torus.grid",
    "torus.quad_steps",
    "torus.c0",
    "torus.c",
    "torus.x1",
    "torus.gb_grid",
}

_RHO_KINDS = ("zero", "potential", "explicit")
_CURVE_KINDS = ("segment", "radial", "circle", "custom")
_NAMED_POTENTIALS = ("euclid-quadratic", "hyp-log")


def parse_config_text(text: str) -> dict:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        entries[key] = value
    return entries


def _split_top_level(text: str) -> list:
    """Split on commas that are not nested inside parentheses."""
    parts = []
    depth = 0
    current = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(depth - 1, 0)
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def _const(text: str, key: str) -> float:
    try:
        return evaluate_constant(text)
    except (ExpressionError, ArithmeticError) as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def _pair(text: str, key: str) -> tuple:
    parts = _split_top_level(text)
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected two comma-separated values, got {text!r}")
    return (_const(parts[0], key), _const(parts[1], key))


def _int(text: str, key: str) -> int:
    value = _const(text, key)
    if value != int(value):
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return int(value)


def _grid(text: str, key: str) -> tuple:
    a, b = _pair(text, key)
    if a != int(a) or b != int(b) or a < 2 or b < 2:
        raise ConfigError(f"{key}: expected integer grid sizes >= 2, got {text!r}")
    return (int(a), int(b))


def _field_expression(text: str, key: str, variables=("u1", "u2")) -> ScalarField:
    try:
        fn = compile_expression(text, variables)
    except ExpressionError as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    if variables == ("u1", "u2"):
        return ScalarField(lambda p: fn(p.u1, p.u2), name=text)
    return ScalarField(lambda p: fn(p.u1), name=text)


@dataclass
class Scenario:
    """Parsed scenario: raw configuration plus typed accessors/builders."""

    surface_name: str
    name: str = ""
    surface_periods: tuple | None = None
    rho_kind: str = "zero"
    rho_potential: str | None = None
    rho_comp1: str | None = None
    rho_comp2: str | None = None
    curve_kind: str | None = None
    curve_start: tuple | None = None
    curve_end: tuple | None = None
    curve_center: tuple | None = None
    curve_radius: float | None = None
    curve_angle0: float = 0.0
    curve_angle1: float = 2.0 * math.pi
    curve_points: tuple | None = None
    x0: tuple | None = None
    indicatrix_focal: tuple | None = None
    indicatrix_level: float = 4.0
    indicatrix_base: tuple | None = None
    steps: int = 1000
    frames: int = 3
    figure_samples: int = 200
    verify_grid: tuple = (15, 15)
    verify_tolerance: float = 1e-5
    torus_grid: tuple = (16, 16)
    torus_quad_steps: int = 512
    torus_c0: float = 0.0
    torus_c: str | None = None
    torus_x1: str | None = None
    gb_grid: tuple = (64, 64)

    @classmethod
    def from_text(cls, text: str) -> "Scenario":
        entries = parse_config_text(text)
        if "surface.name" not in entries:
            raise ConfigError("missing required key 'surface.name'")
        sc = cls(surface_name=entries["surface.name"])
        sc.name = entries.get("name", "")
        if "surface.periods" in entries:
            sc.surface_periods = _pair(entries["surface.periods"], "surface.periods")
        sc.rho_kind = entries.get("rho.kind", "zero")
        if sc.rho_kind not in _RHO_KINDS:
            raise ConfigError(f"rho.kind must be one of {_RHO_KINDS}, got {sc.rho_kind!r}")
        sc.rho_potential = entries.get("rho.f")
        sc.rho_comp1 = entries.get("rho.rho1")
        sc.rho_comp2 = entries.get("rho.rho2")
        if sc.rho_kind == "potential" and sc.rho_potential is None:
            raise ConfigError("rho.kind = potential requires rho.f")
        if sc.rho_kind == "explicit" and (sc.rho_comp1 is None or sc.rho_comp2 is None):
            raise ConfigError("rho.kind = explicit requires rho.rho1 and rho.rho2")
        if "curve.kind" in entries:
            sc.curve_kind = entries["curve.kind"]
            if sc.curve_kind not in _CURVE_KINDS:
                raise ConfigError(
                    f"curve.kind must be one of {_CURVE_KINDS}, got {sc.curve_kind!r}"
                )
        for key, attr in (
            ("curve.start", "curve_start"),
            ("curve.end", "curve_end"),
            ("curve.center", "curve_center"),
            ("vector.x0", "x0"),
            ("indicatrix.focal", "indicatrix_focal"),
            ("indicatrix.base", "indicatrix_base"),
        ):
            if key in entries:
                setattr(sc, attr, _pair(entries[key], key))
        if "curve.radius" in entries:
            sc.curve_radius = _const(entries["curve.radius"], "curve.radius")
        if "curve.angle0" in entries:
            sc.curve_angle0 = _const(entries["curve.angle0"], "curve.angle0")
        if "curve.angle1" in entries:
            sc.curve_angle1 = _const(entries["curve.angle1"], "curve.angle1")
        if "curve.points" in entries:
            pts = []
            for chunk in entries["curve.points"].split(";"):
                chunk = chunk.strip()
                if chunk:
                    pts.append(_pair(chunk, "curve.points"))
            if len(pts) < 2:
                raise ConfigError("curve.points needs at least two points")
            sc.curve_points = tuple(pts)
        if "indicatrix.level" in entries:
            sc.indicatrix_level = _const(entries["indicatrix.level"], "indicatrix.level")
        if "integrator.steps" in entries:
            sc.steps = _int(entries["integrator.steps"], "integrator.steps")
            if sc.steps < 1:
                raise ConfigError("integrator.steps must be >= 1")
        if "figure.frames" in entries:
            sc.frames = _int(entries["figure.frames"], "figure.frames")
            if sc.frames < 1:
                raise ConfigError("figure.frames must be >= 1")
        if "figure.samples" in entries:
            sc.figure_samples = _int(entries["figure.samples"], "figure.samples")
            if sc.figure_samples < 8:
                raise ConfigError("figure.samples must be >= 8")
        if "verify.grid" in entries:
            sc.verify_grid = _grid(entries["verify.grid"], "verify.grid")
        if "verify.tolerance" in entries:
            sc.verify_tolerance = _const(entries["verify.tolerance"], "verify.tolerance")
        if "torus.grid" in entries:
            sc.torus_grid = _grid(entries["torus.grid"], "torus.grid")
        if "torus.quad_steps" in entries:
            sc.torus_quad_steps = _int(entries["torus.quad_steps"], "torus.quad_steps")
        if "torus.c0" in entries:
            sc.torus_c0 = _const(entries["torus.c0"], "torus.c0")
        sc.torus_c = entries.get("torus.c")
        sc.torus_x1 = entries.get("torus.x1")
        if "torus.gb_grid" in entries:
            sc.gb_grid = _grid(entries["torus.gb_grid"], "torus.gb_grid")
        return sc

    @classmethod
    def from_file(cls, path) -> "Scenario":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text)

    # -- builders ---------------------------------------------------------

    def build_surface(self) -> PeriodicSurface:
        try:
            return surface_by_name(self.surface_name, periods=self.surface_periods)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def build_one_form(self, surface: PeriodicSurface) -> OneForm:
        if self.rho_kind == "zero":
            return OneForm.zero()
        if self.rho_kind == "explicit":
            f1 = _field_expression(self.rho_comp1, "rho.rho1")
            f2 = _field_expression(self.rho_comp2, "rho.rho2")
            return OneForm(
                lambda p: (f1(p), f2(p)),
                name=f"({self.rho_comp1}) du1 + ({self.rho_comp2}) du2",
            )
        if self.rho_potential in _NAMED_POTENTIALS:
            potential = potential_by_name(self.rho_potential)
        else:
            potential = _field_expression(self.rho_potential, "rho.f")
        if surface.potential_kind is None:
            raise ConfigError(
                f"surface {surface.name!r} has no potential-to-one-form recipe; "
                "use rho.kind = explicit"
            )
        return potential_to_oneform(surface.potential_kind, potential)

    def build_connection(self, surface: PeriodicSurface, form: OneForm) -> Connection2D:
        return semi_symmetric(surface.metric, form)

    def build_curve(self) -> Curve:
        kind = self.curve_kind
        if kind is None:
            raise ConfigError("missing curve.kind")
        if kind == "segment":
            if self.curve_start is None or self.curve_end is None:
                raise ConfigError("curve.kind = segment requires curve.start and curve.end")
            return Curve.segment(self.curve_start, self.curve_end)
        if kind == "radial":
            if self.curve_end is None:
                raise ConfigError("curve.kind = radial requires curve.end")
            return Curve.radial(self.curve_end)
        if kind == "circle":
            if self.curve_center is None or self.curve_radius is None:
                raise ConfigError("curve.kind = circle requires curve.center and curve.radius")
            return Curve.circle(
                self.curve_center, self.curve_radius, self.curve_angle0, self.curve_angle1
            )
        if self.curve_points is None:
            raise ConfigError("curve.kind = custom requires curve.points")
        return Curve.polyline(self.curve_points)

    def build_indicatrix(self) -> TrifocalEllipse:
        if self.indicatrix_focal is None:
            raise ConfigError("missing indicatrix.focal")
        try:
            return TrifocalEllipse(self.indicatrix_focal, self.indicatrix_level)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def base_point(self, surface: PeriodicSurface) -> Point2:
        if self.indicatrix_base is not None:
            return Point2(*self.indicatrix_base)
        if surface.potential_kind == "hyperbolic":
            return Point2(0.0, 1.0)
        return Point2(0.0, 0.0)

    def build_structure(self, surface: PeriodicSurface, conn: Connection2D) -> FinslerStructure:
        return FinslerStructure(
            base_point=self.base_point(surface),
            base_indicatrix=self.build_indicatrix(),
            connection=conn,
            steps=self.steps,
        )

    def build_free_function(self) -> ScalarField | None:
        if self.torus_c is None:
            return None
        return _field_expression(self.torus_c, "torus.c", variables=("u1",))

    def build_x1_field(self) -> ScalarField | None:
        if self.torus_x1 is None:
            return None
        return _field_expression(self.torus_x1, "torus.x1")
