"""
Data parameterization, least-squares control point fitting and error metrics.
"""

import math
from dataclasses import dataclass

import numpy as np

from app.core.errors import DomainError, InfeasibleFitError
from app.geometry.bspline import ArrayLike, BSplineCurve, KnotVector, as_points, basis_matrix
from app.models import ParameterizationMethod

DEFAULT_FIT_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ParameterAssignment:
    """One parameter in [0, 1] per data point, strictly increasing."""

    params: np.ndarray
    method: ParameterizationMethod

    def __post_init__(self):
        params = np.array(self.params, dtype=float)
        if params.ndim != 1 or len(params) < 2:
            raise DomainError("an assignment needs at least two parameters")
        if params[0] != 0.0 or params[-1] != 1.0:
            raise DomainError("parameters must start at 0 and end at 1")
        if np.any(np.diff(params) <= 0):
            raise DomainError("parameters must be strictly increasing")
        params.setflags(write=False)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "method", ParameterizationMethod(self.method))

    def __len__(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class FitReport:
    """Metrics of one least-squares fit; cost and fitness follow f = 1 / (N_cp * D)."""

    curve: BSplineCurve
    euclidean_distance: float
    rmse: float
    control_point_count: int
    cost: float
    fitness: float


def parameterize(points: ArrayLike, method: ParameterizationMethod = ParameterizationMethod.CENTRIPETAL) -> ParameterAssignment:
    """Assign curve parameters to data points by the given method."""
    pts = as_points(points)
    method = ParameterizationMethod(method)
    if len(pts) < 2:
        raise DomainError("parameterization needs at least two points")

    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    duplicates = np.flatnonzero(chords == 0)
    if len(duplicates):
        raise DomainError(f"consecutive duplicate points at index {int(duplicates[0]) + 1}")

    if method is ParameterizationMethod.UNIFORM:
        params = np.linspace(0.0, 1.0, len(pts))
    else:
        steps = chords if method is ParameterizationMethod.CHORD_LENGTH else np.sqrt(chords)
        cumulative = np.concatenate([[0.0], np.cumsum(steps)])
        params = cumulative / cumulative[-1]
        params[-1] = 1.0

    return ParameterAssignment(params, method)


def least_squares_fit(points: ArrayLike, assignment: ParameterAssignment, knot_vector: KnotVector) -> BSplineCurve:
    """
    Control points minimizing sum_i ||C(i) - P(u_i)||^2, each coordinate
    solved independently. Endpoints are not pinned to the data.

    Raises:
        DomainError: point count differs from the assignment length
        InfeasibleFitError: collocation matrix is rank deficient
    """
    pts = as_points(points)
    if len(pts) != len(assignment):
        raise DomainError(f"{len(pts)} points but {len(assignment)} parameters")

    collocation = basis_matrix(knot_vector, assignment.params)
    unknowns = collocation.shape[1]
    if len(pts) < unknowns:
        raise InfeasibleFitError(
            f"{unknowns} control points cannot be fitted to {len(pts)} points",
            rank=len(pts),
            unknowns=unknowns,
        )

    control_points, _, rank, _ = np.linalg.lstsq(collocation, pts, rcond=None)
    if rank < unknowns:
        raise InfeasibleFitError(
            f"collocation matrix has rank {rank} < {unknowns}", rank=int(rank), unknowns=unknowns
        )
    return BSplineCurve(knot_vector, control_points)


def _residuals(original: ArrayLike, fitted: BSplineCurve, assignment: ParameterAssignment) -> np.ndarray:
    pts = as_points(original)
    if len(pts) != len(assignment):
        raise DomainError(f"{len(pts)} points but {len(assignment)} parameters")
    if pts.shape[1] != fitted.dimension:
        raise DomainError("points and curve differ in dimension")
    return pts - fitted.evaluate(assignment.params)


def euclidean_distance(original: ArrayLike, fitted: BSplineCurve, assignment: ParameterAssignment) -> float:
    """D = sqrt(sum_i ||C(i) - B(i)||^2) with B(i) the curve at the i-th parameter."""
    residuals = _residuals(original, fitted, assignment)
    return float(np.sqrt(np.sum(residuals * residuals)))


def rmse(original: ArrayLike, fitted: BSplineCurve, assignment: ParameterAssignment) -> float:
    """sqrt(mean_i ||C(i) - B(i)||^2), i.e. D / sqrt(L)."""
    return euclidean_distance(original, fitted, assignment) / math.sqrt(len(assignment))


def cost_of(control_point_count: int, distance: float) -> float:
    """Reciprocal of the fitness f = 1 / (N_cp * D)."""
    return control_point_count * distance


def fit_report(
    points: ArrayLike,
    assignment: ParameterAssignment,
    knot_vector: KnotVector,
    floor: float = DEFAULT_FIT_FLOOR,
) -> FitReport:
    """Fit, measure and score one knot vector. D below `floor` is clamped to it."""
    curve = least_squares_fit(points, assignment, knot_vector)
    distance = max(euclidean_distance(points, curve, assignment), floor)
    count = knot_vector.control_point_count
    cost = cost_of(count, distance)
    return FitReport(
        curve=curve,
        euclidean_distance=distance,
        rmse=distance / math.sqrt(len(assignment)),
        control_point_count=count,
        cost=cost,
        fitness=1.0 / cost,
    )
