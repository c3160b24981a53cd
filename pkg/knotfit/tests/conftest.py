import numpy as np
import pytest

from app.geometry.bspline import BSplineCurve, KnotVector
from app.geometry.fitting import parameterize
from app.models import ParameterizationMethod
from app.optim.knot_genome import KnotGenome, KnotObjective

BEZIER_KNOTS = [0, 0, 0, 0, 1, 1, 1, 1]
SQUARE = [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]


@pytest.fixture
def bezier_knots():
    return KnotVector(np.array(BEZIER_KNOTS, dtype=float), 3)


@pytest.fixture
def square_bezier(bezier_knots):
    return BSplineCurve(bezier_knots, np.array(SQUARE))


def twelve_points() -> np.ndarray:
    t = np.linspace(0.0, 1.6 * np.pi, 12)
    return np.column_stack([2.0 * t, np.sin(t) + 0.3 * np.cos(2.5 * t)])


@pytest.fixture(scope="session")
def twelve_point_objective():
    """Knot selection over 12 points (10 free bits); interpolating fits floor at 1e-9."""
    points = twelve_points()
    return KnotObjective(points, parameterize(points, ParameterizationMethod.CENTRIPETAL), 3, floor=1e-9)


@pytest.fixture(scope="session")
def twelve_point_optimum(twelve_point_objective):
    """Lowest cost over all 2**10 genomes."""
    best = np.inf
    for mask in range(2 ** 10):
        free = [(mask >> j) & 1 for j in range(10)]
        best = min(best, twelve_point_objective.cost(KnotGenome.from_free_bits(free)))
    return best
