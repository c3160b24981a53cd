"""
Point CSV ingestion and the on-disk formats of fitted curves and tables.
"""

from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
from pydantic import BaseModel

from app.core.errors import InputFormatError
from app.core.logger import get_logger
from app.geometry.bspline import BSplineCurve, KnotVector

logger = get_logger(__name__)

PathLike = Union[str, Path]
AXES = ("x", "y", "z")
FLOAT_FORMAT = "%.17g"  # round-trips every float64


class CurveDump(BaseModel):
    """JSON form of a fitted curve."""
    degree: int
    knots: List[float]
    control_points: List[List[float]]
    method: Optional[str] = None
    iterations: Optional[int] = None
    seed: Optional[int] = None

    @classmethod
    def from_curve(cls, curve: BSplineCurve, **metadata) -> "CurveDump":
        return cls(**curve.to_dict(), **metadata)

    def to_curve(self) -> BSplineCurve:
        knot_vector = KnotVector(np.asarray(self.knots, dtype=float), self.degree)
        return BSplineCurve(knot_vector, np.asarray(self.control_points, dtype=float))


def _parse_row(text: str) -> Optional[np.ndarray]:
    try:
        return np.loadtxt([text], delimiter=",", comments=None, dtype=float, ndmin=1)
    except ValueError:
        return None


def _locate_bad_row(rows: Sequence[Tuple[int, str]], width: int) -> InputFormatError:
    for line_number, text in rows:
        values = _parse_row(text)
        if values is None:
            return InputFormatError(f"unparsable number in {text.strip()!r}", line=line_number)
        if len(values) != width:
            return InputFormatError(
                f"row has {len(values)} columns but earlier rows have {width}", line=line_number
            )
    return InputFormatError("unreadable point data")


def load_csv(path: PathLike) -> np.ndarray:
    """
    Read 2 or 3 comma-separated reals per line. A non-numeric first row is
    taken as a header and skipped; blank lines are ignored.

    Raises:
        InputFormatError: unreadable file, bad cell, mixed dimensionality or
            fewer than two data rows
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc

    rows = [(number, line) for number, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if rows and _parse_row(rows[0][1]) is None:
        rows = rows[1:]  # header
    if len(rows) < 2:
        raise InputFormatError(f"{path} holds {len(rows)} data row(s); at least 2 are needed")

    first_line, first_text = rows[0]
    first = _parse_row(first_text)
    if first is None:
        raise InputFormatError(f"unparsable number in {first_text.strip()!r}", line=first_line)
    if len(first) not in (2, 3):
        raise InputFormatError(f"expected 2 or 3 columns, found {len(first)}", line=first_line)

    try:
        points = np.loadtxt([line for _, line in rows], delimiter=",", comments=None, dtype=float, ndmin=2)
    except ValueError:
        raise _locate_bad_row(rows, len(first)) from None

    finite = np.isfinite(points).all(axis=1)
    if not finite.all():
        raise InputFormatError("coordinates must be finite", line=rows[int(np.argmin(finite))][0])
    logger.info("points_loaded", path=str(path), count=len(points), dimension=points.shape[1])
    return points


def write_points(handle: TextIO, points: np.ndarray) -> None:
    """Write points with an x,y[,z] header; floats are written exactly."""
    points = np.asarray(points, dtype=float)
    header = ",".join(AXES[:points.shape[1]])
    np.savetxt(handle, points, fmt=FLOAT_FORMAT, delimiter=",", header=header, comments="")


def write_points_csv(path: PathLike, points: np.ndarray) -> None:
    with open(_prepare(path), "w", encoding="utf-8") as handle:
        write_points(handle, points)


def write_rows_csv(path: PathLike, columns: Sequence[str], rows: Iterable[dict]) -> None:
    """Write dict rows under `columns`; keys outside `columns` are dropped."""
    cells = np.array([[str(row[column]) for column in columns] for row in rows], dtype=str)
    cells = cells.reshape(-1, len(columns))
    np.savetxt(_prepare(path), cells, fmt="%s", delimiter=",", header=",".join(columns), comments="",
               encoding="utf-8")


def write_text(path: PathLike, text: str) -> None:
    _prepare(path).write_text(text, encoding="utf-8")


def write_curve_json(path: PathLike, curve: BSplineCurve, **metadata) -> None:
    write_text(path, CurveDump.from_curve(curve, **metadata).model_dump_json(indent=2))


def read_curve_json(path: PathLike) -> BSplineCurve:
    return CurveDump.model_validate_json(Path(path).read_text(encoding="utf-8")).to_curve()


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path
