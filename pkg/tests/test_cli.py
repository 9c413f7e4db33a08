import json
import math

import pandas as pd
import pytest
from click.testing import CliRunner

from qwdirac.cli import EXIT_CONVERGENCE, EXIT_USAGE, main

pytestmark = pytest.mark.usefixtures("restore_logging")


@pytest.fixture
def runner():
    return CliRunner()


def read_table(path):
    return pd.read_csv(path, comment="#")


def comment_lines(path):
    return [line for line in path.read_text(encoding="utf-8").splitlines() if line.startswith("#")]


def test_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert "1.0.0" in result.output


def test_sqw_distribution(runner, tmp_path):
    out = tmp_path / "walk.csv"
    result = runner.invoke(main, ["sqw", "--qubit", "0.70710678,0.70710678i", "--t", "2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    frame = read_table(out)
    assert frame["x"].tolist() == [-2, 0, 2]
    assert frame["probability"].tolist() == pytest.approx([0.25, 0.5, 0.25])
    (comment,) = comment_lines(out)
    assert comment.startswith("# config: command = sqw;")
    assert "t = 2" in comment


def test_sqw_zero_steps(runner, tmp_path):
    out = tmp_path / "walk.csv"
    result = runner.invoke(main, ["sqw", "--qubit", "1,0", "--t", "0", "--out", str(out)])
    assert result.exit_code == 0, result.output
    frame = read_table(out)
    assert frame["x"].tolist() == [0]
    assert frame["probability"].tolist() == [1.0]


def test_sqw_json_summary(runner, tmp_path):
    out = tmp_path / "walk.json"
    args = ["sqw", "--qubit", "1,0", "--t", "20", "--check-kspace", "--format", "json", "--out", str(out)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    document = json.loads(out.read_text(encoding="utf-8"))
    summary = document["summary"]
    assert document["command"] == "sqw"
    assert summary["total_probability"] == pytest.approx(1.0, abs=1e-12)
    assert summary["kspace_max_deviation"] <= 1e-4
    assert summary["kspace_converged"] is True
    assert summary["konno_moment_2"] == pytest.approx(1.0 - math.sqrt(0.5), abs=1e-8)
    assert sum(document["rows"]["probability"]) == pytest.approx(1.0)


def test_sqw_histogram_2d(runner, tmp_path):
    out = tmp_path / "hist.csv"
    args = ["sqw", "--d", "2", "--p", "0.5", "--qubit", "0.5,0.5i,0.5i,-0.5", "--t", "10", "--output", "histogram", "--bins", "4", "--out", str(out)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    frame = read_table(out)
    assert len(frame) == 16
    assert frame["mass"].sum() == pytest.approx(1.0)


@pytest.mark.parametrize(
    "args",
    [
        ["sqw", "--qubit", "0.7,0.7", "--t", "3"],
        ["sqw", "--qubit", "1,0,0,0", "--t", "3"],
        ["sqw", "--qubit", "1+2+3i,0", "--t", "3"],
        ["sqw", "--qubit", "1,0", "--t", "3", "--a", "0.9", "--b", "0.9"],
    ],
)
def test_sqw_rejects_bad_input(runner, args):
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_USAGE


def test_density_dirac_at_rest(runner, tmp_path):
    out = tmp_path / "dirac.csv"
    result = runner.invoke(main, ["density", "--law", "dirac", "--d", "3", "--lambda", "1", "--grid", "11", "--out", str(out)])
    assert result.exit_code == 0, result.output
    frame = read_table(out)
    assert frame["v"].iloc[0] == 0.0
    assert frame["mu"].iloc[0] == pytest.approx(3.0 / (4.0 * math.pi), rel=1e-14)
    assert frame["mu"].iloc[-1] == 0.0


def test_density_konno_norm(runner, tmp_path):
    out = tmp_path / "konno.csv"
    args = ["density", "--law", "konno", "--a", "sqrt(0.5)", "--qubit", "1,0", "--grid", "21", "--check-norm", "--out", str(out)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    assert list(read_table(out).columns) == ["v", "mu", "nu"]
    norm_line = comment_lines(out)[-1]
    assert norm_line.startswith("# norm = ")
    fields = dict(part.strip().split(" = ") for part in norm_line[2:].split(";"))
    assert float(fields["norm"]) == pytest.approx(1.0, abs=1e-6)


def test_density_sqw2_json(runner, tmp_path):
    out = tmp_path / "mu2.json"
    args = ["density", "--law", "sqw2", "--p", "0.5", "--grid", "5", "--check-norm", "--format", "json", "--out", str(out)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    document = json.loads(out.read_text(encoding="utf-8"))
    assert len(document["rows"]["mu"]) == 25
    assert document["norm"]["value"] == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize(
    "args",
    [
        ["density", "--law", "dirac", "--d", "5"],
        ["density", "--law", "dirac", "--d", "3", "--qubit", "1,0,0,0"],
        ["density", "--law", "konno", "--a", "1"],
        ["density", "--law", "dirac", "--lambda", "-1"],
    ],
)
def test_density_rejects_bad_input(runner, args):
    assert runner.invoke(main, args).exit_code == EXIT_USAGE


def test_moments_zero_index(runner, tmp_path):
    out = tmp_path / "m.csv"
    result = runner.invoke(main, ["moments", "--d", "1", "--alpha", "0", "--out", str(out)])
    assert result.exit_code == 0, result.output
    frame = read_table(out)
    assert frame["path"].tolist() == ["asymptotic", "law"]
    assert frame["value"].tolist() == [1.0, 1.0]


def test_moments_dual_path_in_3d(runner, tmp_path):
    out = tmp_path / "m.json"
    args = ["moments", "--d", "3", "--lambda", "1", "--alpha", "2,0,0", "--format", "json", "--out", str(out)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text(encoding="utf-8"))
    (entry,) = report["entries"]
    assert entry["alpha"] == [2, 0, 0]
    assert entry["deviations"]["asymptotic~law"] <= 1e-6
    assert report["converged"] is True
    assert report["config"]["alphas"] == "2,0,0"


def test_moments_repeated_alpha_is_computed_once(runner, tmp_path):
    out = tmp_path / "m.json"
    args = ["moments", "--d", "1", "--alpha", "2", "--alpha", "2", "--format", "json", "--out", str(out)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    (entry,) = json.loads(out.read_text(encoding="utf-8"))["entries"]
    assert [r["path"] for r in entry["results"]] == ["asymptotic", "law"]
    assert list(entry["deviations"]) == ["asymptotic~law"]


def test_moments_strict_non_convergence(runner):
    args = ["moments", "--d", "1", "--alpha", "2", "--times", "50", "--grid", "8", "--strict"]
    assert runner.invoke(main, args).exit_code == EXIT_CONVERGENCE


def test_moments_reports_non_convergence_without_strict(runner, tmp_path):
    out = tmp_path / "m.csv"
    args = ["moments", "--d", "1", "--alpha", "2", "--times", "50", "--grid", "8", "--paths", "law,finitetime", "--out", str(out)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    frame = read_table(out)
    assert frame["path"].tolist() == ["law", "finitetime"]
    assert frame["converged"].tolist() == [True, False]


def test_figures_writes_one_file_per_panel(runner, tmp_path):
    result = runner.invoke(main, ["figures", "--id", "3", "--grid", "11", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert sorted(p.name for p in tmp_path.iterdir()) == ["fig3_lambda1.csv", "fig3_lambda10.csv"]
    assert len(read_table(tmp_path / "fig3_lambda1.csv")) == 11


def test_figures_output_is_byte_identical(runner, tmp_path):
    args = ["figures", "--id", "1", "--grid", "31", "--out", str(tmp_path)]
    assert runner.invoke(main, args).exit_code == 0
    first = (tmp_path / "fig1.csv").read_bytes()
    assert runner.invoke(main, args).exit_code == 0
    assert (tmp_path / "fig1.csv").read_bytes() == first


def test_figures_rejects_unknown_id(runner, tmp_path):
    assert runner.invoke(main, ["figures", "--id", "9", "--out", str(tmp_path)]).exit_code == EXIT_USAGE


def test_config_file_with_flag_override(runner, tmp_path):
    config = tmp_path / "fig.cfg"
    config.write_text("# figure data\nfigure = 1\ngrid = 7\n", encoding="utf-8")
    result = runner.invoke(main, ["figures", "--config", str(config), "--grid", "9", "--out", str(tmp_path / "out")])
    assert result.exit_code == 0, result.output
    table = tmp_path / "out" / "fig1.csv"
    assert len(read_table(table)) == 9
    assert "grid = 9" in comment_lines(table)[0]


def test_config_file_accepts_flag_spellings(runner, tmp_path):
    config = tmp_path / "fig.cfg"
    config.write_text("id = 3\ngrid = 5\n", encoding="utf-8")
    result = runner.invoke(main, ["figures", "--config", str(config), "--out", str(tmp_path / "out")])
    assert result.exit_code == 0, result.output
    table = tmp_path / "out" / "fig3_lambda1.csv"
    assert len(read_table(table)) == 5
    assert "figure = 3" in comment_lines(table)[0]


def test_bad_config_file(runner, tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("figure = 1\nfigure = 2\n", encoding="utf-8")
    result = runner.invoke(main, ["figures", "--config", str(config)])
    assert result.exit_code == EXIT_USAGE


def test_log_level_option(runner, tmp_path):
    out = tmp_path / "walk.csv"
    result = runner.invoke(main, ["--log-level", "debug", "sqw", "--qubit", "1,0", "--t", "1", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert out.exists()
