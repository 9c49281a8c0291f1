"""Matplotlib rendering for the CLI report paths.

Every report command writes a PNG next to its delimited output.  Rendering
is pinned to the Agg backend with fixed figure geometry, which keeps the
PNG bytes reproducible run to run.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 130


def _new_axes(title):
    fig, ax = plt.subplots(figsize=(6.0, 6.0), dpi=_DPI)
    ax.set_title(title)
    ax.set_xlabel("u1")
    ax.set_ylabel("u2")
    return fig, ax


def figure_png(path, curve_points, frames, title="indicatrix translates"):
    """Curve plus translated indicatrices.

    ``frames`` is a list of dicts with keys ``center``, ``boundary`` (closed
    polyline, centered), ``foci`` (3 points, centered) and optionally
    ``overlay`` (closed polyline, centered) for the dashed comparison curve.
    """
    fig, ax = _new_axes(title)
    curve_points = np.asarray(curve_points)
    ax.plot(curve_points[:, 0], curve_points[:, 1], color="#999999", lw=1.0)
    for fr in frames:
        c = np.asarray(fr["center"])
        b = np.asarray(fr["boundary"]) + c
        ax.plot(b[:, 0], b[:, 1], color="#1f77b4", lw=1.2)
        foci = np.asarray(fr["foci"]) + c
        ax.plot(foci[:, 0], foci[:, 1], "o", color="#d62728", ms=3.5)
        if fr.get("overlay") is not None:
            o = np.asarray(fr["overlay"]) + c
            ax.plot(o[:, 0], o[:, 1], "--", color="#2ca02c", lw=1.0)
    ax.set_aspect("equal", adjustable="datalim")
    fig.savefig(path)
    plt.close(fig)


def transport_png(path, points, vectors, title="parallel transport"):
    fig, ax = _new_axes(title)
    pts = np.asarray(points)
    vec = np.asarray(vectors)
    ax.plot(pts[:, 0], pts[:, 1], color="#999999", lw=1.0)
    stride = max(len(pts) // 24, 1)
    ax.quiver(
        pts[::stride, 0], pts[::stride, 1], vec[::stride, 0], vec[::stride, 1],
        angles="xy", scale_units="xy", scale=1.0, color="#1f77b4", width=0.004,
    )
    ax.set_aspect("equal", adjustable="datalim")
    fig.savefig(path)
    plt.close(fig)


def residual_png(path, points, residuals, title="pointwise residuals"):
    fig, ax = _new_axes(title)
    pts = np.asarray(points)
    sc = ax.scatter(
        pts[:, 0], pts[:, 1], c=np.abs(np.asarray(residuals)), s=18.0, cmap="viridis"
    )
    fig.colorbar(sc, ax=ax, label="|residual|")
    fig.savefig(path)
    plt.close(fig)
