from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest

from lattes_da.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, RunConfig, build_config, build_parser, main, read_config_file
from lattes_da.lattice import IntMatrix2

import oracles


def run(tmp_path: Path, *argv: str) -> int:
    cmd, *rest = argv
    return main([cmd, "--out", str(tmp_path), *rest])


def test_verify_lattes_default(tmp_path, capsys):
    assert run(tmp_path, "verify-lattes") == EXIT_OK
    report = (tmp_path / "lattes_report.txt").read_text()
    assert report.startswith("# matrix=4,1,2,1\n")
    for flag in ("ram", "crit", "inv", "nonperiodic", "thurston"):
        assert f"{flag}: PASS" in report
    csv = (tmp_path / "lattes_report.csv").read_text()
    assert csv.splitlines()[0] == "flag,value"
    assert "\r" not in csv


def test_verify_lattes_not_hyperbolic(tmp_path, capsys):
    assert run(tmp_path, "verify-lattes", "--matrix", "2,0,0,1") == EXIT_INPUT
    assert "eigenvalue on the unit circle" in capsys.readouterr().err


def test_verify_lattes_other_matrix_matches_oracle(tmp_path, capsys):
    assert run(tmp_path, "verify-lattes", "--matrix", "3,1,1,1") == EXIT_OK
    crit, values = oracles.critical_structure(((3, 1), (1, 1)))
    report = (tmp_path / "lattes_report.txt").read_text()

    def listed(prefix):
        line = next(l for l in report.splitlines() if l.startswith(prefix))
        return {
            tuple(Fraction(v) for v in p.strip("pi()").split(","))
            for p in line[len(prefix):].split(", ")
        }

    assert listed("critical points: ") == crit
    assert listed("critical values: ") == values


def test_count_periodic_rows(tmp_path, capsys):
    assert run(tmp_path, "count-periodic", "--n-max", "2") == EXIT_OK
    lines = (tmp_path / "census.csv").read_text().splitlines()
    assert lines[0] == "n,det_minus,det_plus,torus_count,sphere_count,log_rate"
    rows = [tuple(int(v) for v in (l.split(",")[0], l.split(",")[4])) for l in lines[1:]]
    assert rows == [(1, 5), (2, 21)]


def test_count_periodic_six_rates(tmp_path, capsys):
    assert run(tmp_path, "count-periodic", "--n-max", "6") == EXIT_OK
    assert "growth rate >= log|det|: PASS" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ("count-periodic", "--matrix", "1,0,0,1"),
    ("count-periodic", "--n-max", "9"),
    ("surgery-report", "--r", "0.5"),
    ("surgery-report", "--mu", "1.5"),
    ("render-basins", "--size", "8x8"),
    ("render-basins", "--size", "big"),
    ("suspension", "--example", "tent"),
    ("no-such-command",),
])
def test_input_errors_exit_two(tmp_path, capsys, argv):
    assert run(tmp_path, *argv) == EXIT_INPUT


def test_config_file_and_override(tmp_path):
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text("# experiment\nr = 0.15\nmu=0.4\nsize = 64x32\nseed = 7  # trailing comment\n")
    assert read_config_file(cfg_path)["width"] == 64
    parser = build_parser()
    cfg = build_config(parser.parse_args(["pipeline", "--config", str(cfg_path), "--mu", "0.3"]))
    assert (cfg.r, cfg.mu, cfg.width, cfg.height, cfg.seed) == (0.15, 0.3, 64, 32, 7)
    assert cfg.matrix == IntMatrix2(4, 1, 2, 1)


def test_every_flag_has_a_config_key(tmp_path):
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices["pipeline"]
    dests = {a.dest for a in sub._actions} - {"help", "config"}
    text = "".join(f"{d} = 1\n" for d in sorted(dests - {"matrix", "size", "out", "example"}))
    text += "matrix = 3,1,1,1\nsize = 32x16\nout = somewhere\nexample = h\n"
    path = tmp_path / "all.cfg"
    path.write_text(text)
    values = read_config_file(path)
    assert {"matrix", "width", "height", "out", "example"} <= set(values)


def test_bad_config_line(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("r 0.2\n")
    assert run(tmp_path, "surgery-report", "--config", str(path)) == EXIT_INPUT
    assert "expected key=value" in capsys.readouterr().err


def test_header_echoes_effective_config():
    text = RunConfig().header()
    assert "# seed=42\n" in text and "# r=0.2\n" in text and "# matrix=4,1,2,1\n" in text


def test_surgery_report(tmp_path, capsys):
    assert run(tmp_path, "surgery-report") == EXIT_OK
    text = (tmp_path / "surgery_report.txt").read_text()
    assert text.count("saddle ") == 2 and "FAIL" not in text


def test_surgery_report_r_zero(tmp_path, capsys):
    assert run(tmp_path, "surgery-report", "--r", "0") == EXIT_FAIL


def test_render_basins_outputs(tmp_path, capsys):
    assert run(tmp_path, "render-basins", "--size", "64x64", "--samples", "50") == EXIT_OK
    data = (tmp_path / "basins.ppm").read_bytes()
    assert data.startswith(b"P6\n64 64\n255\n") and len(data) == 13 + 3 * 64 * 64
    lines = (tmp_path / "basin_samples.csv").read_bytes().split(b"\n")
    assert lines[0] == b"x1,x2,label,iterations_to_capture" and len(lines) == 52


def test_suspension_outputs(tmp_path, capsys):
    assert run(tmp_path, "suspension", "--example", "shift", "--depth", "3") == EXIT_OK
    assert capsys.readouterr().out.startswith("consistent_with_indecomposable(3)")
    csv = (tmp_path / "suspension_shift_visits.csv").read_text().splitlines()
    assert csv[0] == "cylinder,visits" and len(csv) == 9

    assert run(tmp_path, "suspension", "--example", "h", "--depth", "4") == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("no_dense_leaf_detected(4) [exhaustive, horizon=10000]")
    assert "max cylinders visited 8 of 16" in out


def test_pipeline_small_and_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["pipeline", "--size", "64x64", "--out", str(a)]) in (EXIT_OK, EXIT_FAIL)
    assert main(["pipeline", "--size", "64x64", "--out", str(b), "--workers", "1"]) in (EXIT_OK, EXIT_FAIL)
    for name in ("basins.ppm", "basin_samples.csv", "census.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    summary = (a / "summary.txt").read_text()
    # the reports differ only in the echoed output directory
    strip = lambda t: [l for l in t.splitlines() if not l.startswith("# out=")]
    assert strip(summary) == strip((b / "summary.txt").read_text())
    assert "PASS determinism" in summary and "PASS lamination" in summary


def test_pipeline_degenerate_r_zero(tmp_path, capsys):
    assert run(tmp_path, "pipeline", "--r", "0", "--size", "32x32") == EXIT_FAIL
    summary = (tmp_path / "summary.txt").read_text()
    assert "FAIL surgery : r=0" in summary
    assert not (tmp_path / "basins.ppm").exists()
