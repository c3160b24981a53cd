import json

import numpy as np
import pytest

from app.harness.curves import generate_archimedean_spiral
from app.harness.experiment import run_experiment
from app.harness.io import load_csv
from app.main import (
    EXIT_ALL_INFEASIBLE,
    EXIT_INPUT_FORMAT,
    EXIT_OK,
    EXIT_USAGE,
    build_parser,
    experiment_config_from_args,
    main,
)
from app.models import AnchorMode, CurveKind, OptimizerMethod

FIT_ARGS = ["--method", "both", "--iterations", "5,12", "--locations", "8", "--seed", "41"]


def test_generate_then_fit_matches_in_memory_run(tmp_path):
    """Fitting a generated CSV reproduces the in-memory sweep bit for bit."""
    points_path = tmp_path / "spiral.csv"
    table_path = tmp_path / "table.csv"
    assert main(["generate", "--curve", "spiral", "--samples", "30", "--out", str(points_path)]) == EXIT_OK
    assert main(
        ["fit", "--curve", "csv", "--csv", str(points_path), *FIT_ARGS, "--out-table", str(table_path)]
    ) == EXIT_OK

    args = build_parser().parse_args(["fit", "--curve", "spiral", "--samples", "30", *FIT_ARGS])
    expected = run_experiment(experiment_config_from_args(args)).table.rows
    written = json.loads((tmp_path / "table.json").read_text())["rows"]

    assert len(written) == len(expected) == 4
    for row, reference in zip(written, expected):
        assert row["method"] == reference.method.value
        assert row["seed"] == reference.seed
        assert row["control_points"] == reference.control_points
        assert row["euclidean_distance"] == reference.euclidean_distance
        assert row["cost"] == reference.cost


def test_fit_writes_requested_artifacts(tmp_path):
    """Table, SVG, curve and trace paths are all produced."""
    outputs = {
        "--out-table": tmp_path / "t.csv",
        "--out-svg": tmp_path / "fit.svg",
        "--out-curve": tmp_path / "curve.json",
        "--out-trace": tmp_path / "trace.json",
    }
    flags = [item for flag, path in outputs.items() for item in (flag, str(path))]
    assert main(["fit", "--curve", "vivaldi", "--samples", "31", "--method", "dea", "--iterations", "4", *flags]) == 0
    assert all(path.exists() for path in outputs.values())
    assert (tmp_path / "t.json").exists()
    assert outputs["--out-svg"].read_text().count("<polyline") == 3


def test_generate_to_stdout(capsys):
    """Without --out the curve is printed as CSV."""
    assert main(["generate", "--curve", "epitrochoid", "--samples", "5"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x,y"
    assert len(lines) == 6


def test_fit_parser_defaults():
    """Unset options fall back to settings; the GA population follows --locations."""
    args = build_parser().parse_args(["fit", "--curve", "spiral", "--iterations", "10", "--locations", "6"])
    config = experiment_config_from_args(args)
    assert config.method is OptimizerMethod.BOTH
    assert config.curve.kind is CurveKind.ARCHIMEDEAN_SPIRAL
    assert config.dea.locations_count == 6
    assert config.ga.population_size == 6
    assert config.dea.anchor is AnchorMode.LOOP
    assert config.degree == 3


def test_degree_flags_override_curve_units():
    """--degrees and --radians set the unit of the t range."""
    parser = build_parser()
    assert parser.parse_args(["generate", "--curve", "spiral", "--degrees"]).degrees is True
    assert parser.parse_args(["generate", "--curve", "vivaldi", "--radians"]).degrees is False
    assert parser.parse_args(["generate", "--curve", "vivaldi"]).degrees is None


def test_bad_csv_exits_with_format_code(tmp_path):
    """A malformed point file exits with code 3."""
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3,4,5\n")
    assert main(["fit", "--curve", "csv", "--csv", str(path), "--iterations", "3"]) == EXIT_INPUT_FORMAT


def test_missing_csv_path_is_usage_error():
    """--curve csv without --csv exits with code 2."""
    assert main(["fit", "--curve", "csv", "--iterations", "3"]) == EXIT_USAGE


def test_descending_sweep_is_usage_error():
    """A descending iteration list exits with code 2."""
    assert main(["fit", "--curve", "spiral", "--iterations", "10,5"]) == EXIT_USAGE


def test_all_infeasible_exit_code():
    """Three samples cannot carry a cubic, so every row fails and the exit code is 4."""
    assert main(["fit", "--curve", "spiral", "--samples", "3", "--iterations", "2"]) == EXIT_ALL_INFEASIBLE


def test_unknown_method_is_rejected_by_parser():
    """argparse exits with status 2 on invalid choices."""
    with pytest.raises(SystemExit) as error:
        main(["fit", "--curve", "spiral", "--iterations", "3", "--method", "pso"])
    assert error.value.code == 2


def test_generate_without_noise_writes_exact_curve(tmp_path):
    """--noise 0 writes the generator's samples; the default adds noise."""
    exact, noisy = tmp_path / "exact.csv", tmp_path / "noisy.csv"
    assert main(["generate", "--curve", "spiral", "--samples", "20", "--noise", "0", "--out", str(exact)]) == EXIT_OK
    assert main(["generate", "--curve", "spiral", "--samples", "20", "--out", str(noisy)]) == EXIT_OK
    assert np.array_equal(load_csv(exact), generate_archimedean_spiral(count=20))
    assert not np.array_equal(load_csv(noisy), load_csv(exact))


def test_negative_noise_is_usage_error():
    """A negative noise level exits with code 2."""
    assert main(["generate", "--curve", "spiral", "--noise", "-0.5"]) == EXIT_USAGE
