"""
Clamped B-spline curves: knot vectors, Cox-de Boor basis evaluation and
curve evaluation.

Knot domains are normalized to [0, 1]. Basis functions use half-open
spans [t_i, t_{i+1}) except the last non-empty span, which is closed so the
curve is defined on the whole closed domain.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from app.core.errors import DomainError

Point = Tuple[float, ...]
ArrayLike = Union[np.ndarray, Sequence[float], Sequence[Sequence[float]]]


def as_points(points: ArrayLike) -> np.ndarray:
    """Validate a point sequence and return it as a read-only (L, d) float array."""
    array = np.array(points, dtype=float)
    if array.ndim != 2 or array.shape[1] not in (2, 3):
        raise DomainError("points must be a sequence of 2-D or 3-D coordinates")
    if not np.all(np.isfinite(array)):
        raise DomainError("points must have finite coordinates")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class KnotVector:
    """Clamped, non-decreasing knot sequence of a degree-p spline."""

    knots: np.ndarray
    degree: int

    def __post_init__(self):
        knots = np.array(self.knots, dtype=float)
        p = int(self.degree)
        if p < 0:
            raise DomainError("degree must be non-negative")
        if knots.ndim != 1 or len(knots) < 2 * (p + 1):
            raise DomainError(f"a degree-{p} knot vector needs at least {2 * (p + 1)} knots")
        if not np.all(np.isfinite(knots)):
            raise DomainError("knots must be finite")
        if np.any(np.diff(knots) < 0):
            raise DomainError("knots must be non-decreasing")
        if np.any(knots[:p + 1] != knots[0]) or np.any(knots[-(p + 1):] != knots[-1]):
            raise DomainError(f"knot vector is not clamped (end multiplicity {p + 1})")
        if knots[0] == knots[-1]:
            raise DomainError("knot vector spans an empty domain")
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "degree", p)

    @property
    def control_point_count(self) -> int:
        return len(self.knots) - self.degree - 1

    @property
    def domain(self) -> Tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    @property
    def interior(self) -> np.ndarray:
        return self.knots[self.degree + 1:len(self.knots) - self.degree - 1]

    def check_parameters(self, u: ArrayLike) -> np.ndarray:
        """Return u as a float array, raising DomainError outside the knot domain."""
        values = np.asarray(u, dtype=float)
        lo, hi = self.domain
        if np.any(~np.isfinite(values)) or np.any(values < lo) or np.any(values > hi):
            raise DomainError(f"parameter outside knot domain [{lo}, {hi}]")
        return values

    def find_spans(self, u: np.ndarray) -> np.ndarray:
        """Index s with t_s <= u < t_{s+1}; the domain end maps to the last span."""
        spans = np.searchsorted(self.knots, u, side="right") - 1
        return np.clip(spans, self.degree, self.control_point_count - 1)

    def to_dict(self) -> dict:
        return {"degree": self.degree, "knots": self.knots.tolist()}


@dataclass(frozen=True, eq=False)
class BSplineCurve:
    """Degree-p B-spline: knot vector plus (n, d) control points."""

    knot_vector: KnotVector
    control_points: np.ndarray

    def __post_init__(self):
        cps = np.array(self.control_points, dtype=float)
        if cps.ndim != 2 or cps.shape[1] < 1:
            raise DomainError("control points must be an (n, d) array")
        expected = self.knot_vector.control_point_count
        if len(cps) != expected:
            raise DomainError(f"knot vector implies {expected} control points, got {len(cps)}")
        if len(cps) < self.degree + 1:
            raise DomainError("a curve needs at least degree + 1 control points")
        cps.setflags(write=False)
        object.__setattr__(self, "control_points", cps)

    @property
    def degree(self) -> int:
        return self.knot_vector.degree

    @property
    def dimension(self) -> int:
        return self.control_points.shape[1]

    def evaluate(self, params: ArrayLike) -> np.ndarray:
        """Evaluate the curve at many parameters; returns an (m, d) array."""
        matrix = basis_matrix(self.knot_vector, np.atleast_1d(params))
        return matrix @ self.control_points

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "knots": self.knot_vector.knots.tolist(),
            "control_points": self.control_points.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BSplineCurve":
        knot_vector = KnotVector(np.asarray(data["knots"], dtype=float), int(data["degree"]))
        return cls(knot_vector, np.asarray(data["control_points"], dtype=float))


def _last_span(knots: np.ndarray) -> int:
    # largest i with t_i < t_{i+1}
    return int(np.searchsorted(knots, knots[-1], side="left")) - 1


def _cox_de_boor(knots: np.ndarray, i: int, p: int, u: float, closing: int) -> float:
    if p == 0:
        if knots[i] <= u < knots[i + 1]:
            return 1.0
        return 1.0 if (u == knots[-1] and i == closing) else 0.0

    left = 0.0
    width = knots[i + p] - knots[i]
    if width > 0:
        left = (u - knots[i]) / width * _cox_de_boor(knots, i, p - 1, u, closing)

    right = 0.0
    width = knots[i + p + 1] - knots[i + 1]
    if width > 0:
        right = (knots[i + p + 1] - u) / width * _cox_de_boor(knots, i + 1, p - 1, u, closing)

    return left + right


def basis_eval(knot_vector: KnotVector, i: int, p: int, u: float) -> float:
    """N_{i,p}(u) by the Cox-de Boor recursion; 0/0 terms count as 0."""
    knots = knot_vector.knots
    if p < 0 or p > knot_vector.degree:
        raise DomainError(f"basis degree {p} outside [0, {knot_vector.degree}]")
    if not 0 <= i <= len(knots) - p - 2:
        raise DomainError(f"basis index {i} outside [0, {len(knots) - p - 2}]")
    u = float(knot_vector.check_parameters(u))
    return _cox_de_boor(knots, i, p, u, _last_span(knots))


def basis_matrix(knot_vector: KnotVector, params: ArrayLike) -> np.ndarray:
    """
    Collocation matrix A[l, i] = N_{i,p}(u_l) for all parameters at once.

    Uses the triangular form of the recursion on the p + 1 basis functions
    that are non-zero in each parameter's span; agrees with basis_eval.
    """
    u = knot_vector.check_parameters(params).ravel()
    knots = knot_vector.knots
    p = knot_vector.degree
    spans = knot_vector.find_spans(u)

    values = np.zeros((len(u), p + 1))
    values[:, 0] = 1.0
    left = np.zeros((len(u), p + 1))
    right = np.zeros((len(u), p + 1))
    for j in range(1, p + 1):
        left[:, j] = u - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - u
        saved = np.zeros(len(u))
        for r in range(j):
            temp = values[:, r] / (right[:, r + 1] + left[:, j - r])
            values[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        values[:, j] = saved

    matrix = np.zeros((len(u), knot_vector.control_point_count))
    rows = np.arange(len(u))[:, None]
    cols = spans[:, None] - p + np.arange(p + 1)[None, :]
    matrix[rows, cols] = values
    return matrix


def curve_eval(curve: BSplineCurve, u: float) -> np.ndarray:
    """P(u) = sum_i p_i N_{i,p}(u) at a single parameter."""
    curve.knot_vector.check_parameters(u)
    return curve.evaluate([float(u)])[0]


def build_clamped_knot_vector(interior_knots: ArrayLike, p: int) -> KnotVector:
    """[0]*(p+1) + interior + [1]*(p+1); implies len(interior) + p + 1 control points."""
    interior = np.asarray(interior_knots, dtype=float).ravel()
    if np.any(interior <= 0.0) or np.any(interior >= 1.0):
        raise DomainError("interior knots must lie strictly inside (0, 1)")
    if np.any(np.diff(interior) < 0):
        raise DomainError("interior knots must be non-decreasing")
    knots = np.concatenate([np.zeros(p + 1), interior, np.ones(p + 1)])
    return KnotVector(knots, p)
