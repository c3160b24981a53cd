import io
import re

import numpy as np
import pytest

from app.core.errors import InputFormatError
from app.geometry.bspline import BSplineCurve, build_clamped_knot_vector
from app.harness.curves import generate_vivaldi
from app.harness.io import (
    CurveDump,
    load_csv,
    read_curve_json,
    write_curve_json,
    write_points,
    write_points_csv,
    write_rows_csv,
)
from app.harness.plots import render_svg


def _csv(tmp_path, text, name="points.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_plain_2d(tmp_path):
    """Three 2-D rows load as three points."""
    points = load_csv(_csv(tmp_path, "0,0\n1,0\n2,0"))
    assert points.tolist() == [[0, 0], [1, 0], [2, 0]]


def test_load_skips_header(tmp_path):
    """A non-numeric first row is a header."""
    points = load_csv(_csv(tmp_path, "x,y,z\n1,2,3\n4,5,6"))
    assert points.tolist() == [[1, 2, 3], [4, 5, 6]]


def test_load_ignores_blank_lines(tmp_path):
    """Blank lines are skipped."""
    points = load_csv(_csv(tmp_path, "\n1, 2\n\n3, 4\n\n"))
    assert points.tolist() == [[1, 2], [3, 4]]


def test_load_rejects_mixed_dimensionality(tmp_path):
    """A 3-column row after a 2-column row fails on line 2."""
    with pytest.raises(InputFormatError) as error:
        load_csv(_csv(tmp_path, "1,2\n3,4,5"))
    assert error.value.line == 2


def test_load_rejects_unparsable_cell(tmp_path):
    """An unparsable number reports its line."""
    with pytest.raises(InputFormatError) as error:
        load_csv(_csv(tmp_path, "x,y\n1,2\n3,oops\n"))
    assert error.value.line == 3
    assert "line 3" in str(error.value)


@pytest.mark.parametrize("text", ["1,2\n", "x,y\n", "1\n2\n", "1,nan\n2,3\n"])
def test_load_rejects_malformed_files(tmp_path, text):
    """Too few rows, wrong column counts and non-finite values are format errors."""
    with pytest.raises(InputFormatError):
        load_csv(_csv(tmp_path, text))


def test_load_reports_non_finite_line(tmp_path):
    """A non-finite coordinate is reported on its own line, counting blanks and the header."""
    with pytest.raises(InputFormatError) as error:
        load_csv(_csv(tmp_path, "x,y\n\n1,2\n3,inf\n4,5\n"))
    assert error.value.line == 4


def test_load_rejects_single_column_file(tmp_path):
    """One value per row is not a point."""
    with pytest.raises(InputFormatError) as error:
        load_csv(_csv(tmp_path, "x\n1\n2\n"))
    assert error.value.line == 2


def test_load_missing_file(tmp_path):
    """A missing file is a format error, not an OSError."""
    with pytest.raises(InputFormatError):
        load_csv(tmp_path / "absent.csv")


def test_written_points_reload_exactly(tmp_path):
    """Points written to CSV reload bit for bit."""
    points = generate_vivaldi(count=37)
    path = tmp_path / "nested" / "vivaldi.csv"
    write_points_csv(path, points)
    assert np.array_equal(load_csv(path), points)


def test_write_points_header():
    """The header names one axis per column."""
    buffer = io.StringIO()
    write_points(buffer, np.array([[1.5, 2.0], [3.0, 4.25]]))
    assert buffer.getvalue().splitlines() == ["x,y", "1.5,2", "3,4.25"]


def test_written_points_keep_full_precision():
    """Values without a short decimal form still reload exactly."""
    buffer = io.StringIO()
    points = np.array([[0.1, 1 / 3], [2 ** -40, -7.0e300]])
    write_points(buffer, points)
    rows = buffer.getvalue().splitlines()[1:]
    assert np.array_equal(np.array([[float(cell) for cell in row.split(",")] for row in rows]), points)


def test_rows_csv_keeps_column_order(tmp_path):
    """Table rows follow the column list and drop other keys."""
    path = tmp_path / "rows" / "table.csv"
    write_rows_csv(path, ["iterations", "method", "cost"], [
        {"iterations": 10, "method": "dea", "cost": 2.5, "repeat": 0},
        {"iterations": 25, "method": "ga", "cost": float("inf"), "repeat": 0},
    ])
    assert path.read_text().splitlines() == ["iterations,method,cost", "10,dea,2.5", "25,ga,inf"]


def test_curve_json_reload_is_exact(tmp_path):
    """A dumped curve reloads with identical knots and control points."""
    rng = np.random.default_rng(17)
    curve = BSplineCurve(build_clamped_knot_vector([2 / 7, 1 / 3, 0.5], 3), rng.normal(size=(7, 2)))
    path = tmp_path / "curve.json"
    write_curve_json(path, curve, method="dea", iterations=50, seed=3)
    restored = read_curve_json(path)
    assert np.array_equal(restored.knot_vector.knots, curve.knot_vector.knots)
    assert np.array_equal(restored.control_points, curve.control_points)
    dump = CurveDump.model_validate_json(path.read_text())
    assert (dump.degree, dump.method, dump.iterations, dump.seed) == (3, "dea", 50, 3)


def test_svg_square_structure(square_bezier):
    """One fitted 2-D curve gives one polyline and one marker per point."""
    points = np.array([(0, 0), (0, 1), (1, 1), (1, 0)], dtype=float)
    svg = render_svg(points, {"dolphin echolocation": square_bezier})
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == 1
    assert svg.count("<circle") == 4
    coords = re.search(r'<polyline points="([^"]+)"', svg).group(1).split()
    assert len(coords) >= 500


def test_svg_keeps_minimum_polyline_samples(square_bezier):
    """A smaller sample request still draws at least 500 polyline vertices."""
    points = np.array([(0, 0), (0, 1), (1, 1), (1, 0)], dtype=float)
    svg = render_svg(points, {"fit": square_bezier}, samples=20)
    coords = re.search(r'<polyline points="([^"]+)"', svg).group(1).split()
    assert len(coords) == 500


def test_svg_legend_lists_every_fit(square_bezier):
    """Both methods appear in the legend and as polylines."""
    points = np.array([(0, 0), (0, 1), (1, 1), (1, 0)], dtype=float)
    svg = render_svg(points, {"genetic algorithm": square_bezier, "dolphin echolocation": square_bezier})
    assert svg.count("<polyline") == 2
    assert "genetic algorithm" in svg and "dolphin echolocation" in svg


def test_svg_projects_3d_into_three_panels():
    """3-D data is drawn in xy, xz and yz panels."""
    points = generate_vivaldi(count=25)
    knot_vector = build_clamped_knot_vector([], 3)
    curve = BSplineCurve(knot_vector, points[[0, 8, 16, 24]])
    svg = render_svg(points, {"fit": curve})
    assert svg.count("<polyline") == 3
    assert svg.count("<circle") == 75
    assert all(f">{plane}</text>" in svg for plane in ("xy", "xz", "yz"))
