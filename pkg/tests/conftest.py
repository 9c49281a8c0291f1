from pathlib import Path

import numpy as np
import pytest

from berwald2d import (
    FinslerStructure,
    TrifocalEllipse,
    euclidean_surface,
    hyperbolic_surface,
    potential_by_name,
    potential_to_oneform,
    semi_symmetric,
)

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"


def sample_points(box, n, seed):
    """Deterministic points in ((x0, x1), (y0, y1))."""
    (x0, x1), (y0, y1) = box
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    return [(x0 + (x1 - x0) * a, y0 + (y1 - y0) * b) for a, b in pts]


EUCLID_BOX = ((-2.0, 2.0), (-2.0, 2.0))
HYPERBOLIC_BOX = ((-2.0, 2.0), (0.2, 3.0))


@pytest.fixture(scope="session")
def euclid():
    return euclidean_surface()


@pytest.fixture(scope="session")
def hyperbolic():
    return hyperbolic_surface()


@pytest.fixture(scope="session")
def euclid_pair(euclid):
    """(potential, one-form, flat connection) of the rotational plane example."""
    f = potential_by_name("euclid-quadratic")
    w = potential_to_oneform("euclidean", f)
    return f, w, semi_symmetric(euclid.metric, w)


@pytest.fixture(scope="session")
def hyperbolic_pair(hyperbolic):
    """(potential, one-form, flat connection) of the half-plane log example."""
    f = potential_by_name("hyp-log")
    w = potential_to_oneform("hyperbolic", f)
    return f, w, semi_symmetric(hyperbolic.metric, w)


@pytest.fixture(scope="session")
def trifocal():
    return TrifocalEllipse((1.0, 0.0), 4.0)


@pytest.fixture(scope="session")
def euclid_structure(trifocal, euclid_pair):
    _, _, conn = euclid_pair
    return FinslerStructure((0.0, 0.0), trifocal, conn)


@pytest.fixture(scope="session")
def hyperbolic_structure(trifocal, hyperbolic_pair):
    _, _, conn = hyperbolic_pair
    return FinslerStructure((0.0, 1.0), trifocal, conn)
