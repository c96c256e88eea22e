"""Command-line surface: parsing, file schemas, byte stability."""

import json

import pytest

from asepsim.cli import UsageError, main, parse_config


def test_parse_simulate_defaults_and_mapping():
    cfg = parse_config(
        ["simulate", "--p", "0.25", "--q", "0.75", "--v", "0", "--time", "200",
         "--trajectories", "2000", "--seed", "42"]
    )
    assert cfg.subcommand == "simulate"
    assert cfg.q - cfg.p == pytest.approx(0.5)
    assert cfg.t == 200.0
    assert cfg.trajectories == 2000
    assert cfg.seed == 42
    assert cfg.s_grid[0] == -4.0 and cfg.s_grid[-1] == 4.0
    assert len(cfg.s_grid) == 33


def test_parse_f2_grid():
    cfg = parse_config(["f2", "--s", "-4:4:0.01", "--order", "60"])
    assert cfg.order == 60
    assert len(cfg.s_grid) == 801


def test_parse_rejects_wrong_drift_direction():
    with pytest.raises(UsageError, match="p < q"):
        parse_config(["simulate", "--p", "0.6", "--q", "0.4"])


def test_parse_rejects_bad_probability_sum():
    with pytest.raises(UsageError, match="p \\+ q = 1"):
        parse_config(["simulate", "--p", "0.3", "--q", "0.75"])


def test_parse_rejects_bad_speed():
    with pytest.raises(UsageError, match="\\|v\\| < 1"):
        parse_config(["simulate", "--v", "1.0"])


def test_parse_rejects_bad_grid():
    with pytest.raises(UsageError, match="step must be positive"):
        parse_config(["f2", "--s", "0:1:-0.5"])
    with pytest.raises(UsageError, match="start:stop:step"):
        parse_config(["f2", "--s", "0:1"])


def test_main_usage_error_exit_code(capsys):
    assert main(["simulate", "--p", "0.6", "--q", "0.4"]) == 1
    assert "p < q" in capsys.readouterr().err


def test_simulate_outputs_and_round_trip(tmp_path):
    args = ["simulate", "--time", "20", "--trajectories", "40", "--seed", "11",
            "--workers", "1", "--out-dir", str(tmp_path)]
    assert main(args) == 0
    csv_lines = (tmp_path / "currents.csv").read_text().splitlines()
    assert csv_lines[0] == "trajectory_id,current,s_normalized"
    assert len(csv_lines) == 41
    first = csv_lines[1].split(",")
    assert first[0] == "0"
    assert "e" in first[2]  # 17-significant-digit scientific text

    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["params"] == {"p": 0.25, "q": 0.75}
    assert summary["v"] == 0.0
    assert summary["t"] == 20.0
    assert summary["gamma"] == 0.5
    assert summary["M"] == 40
    assert summary["seed"] == 11
    assert set(summary["moments"]) == {"mean", "var", "skew"}
    assert summary["version"] == "0.1.0"
    assert summary["N_truncation"] > 0
    assert 0.0 <= summary["ks_distance"] <= 1.0


def test_simulate_format_selector(tmp_path):
    assert main(["simulate", "--time", "5", "--trajectories", "5", "--seed", "1",
                 "--workers", "1", "--format", "csv", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "currents.csv").exists()
    assert not (tmp_path / "summary.json").exists()


def test_f2_csv_schema(tmp_path):
    assert main(["f2", "--s", "-1:1:0.5", "--order", "40",
                 "--out-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "f2.csv").read_text().splitlines()
    assert lines[0] == "s,F2,limit_law"
    assert len(lines) == 6
    s, f2, law = (float(v) for v in lines[4].split(","))
    assert s == 0.5
    assert 0.0 <= f2 <= 1.0 and 0.0 <= law <= 1.0


def test_byte_identical_outputs_across_workers(tmp_path):
    out1, out2 = tmp_path / "w1", tmp_path / "w2"
    base = ["simulate", "--time", "20", "--trajectories", "60", "--seed", "3"]
    assert main(base + ["--workers", "1", "--out-dir", str(out1)]) == 0
    assert main(base + ["--workers", "2", "--out-dir", str(out2)]) == 0
    assert (out1 / "currents.csv").read_bytes() == (out2 / "currents.csv").read_bytes()
    assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()


def test_verify_bundles_suites(tmp_path):
    code = main(["verify", "--trajectories", "600", "--seed", "1", "--workers", "2",
                 "--out-dir", str(tmp_path)])
    report = json.loads((tmp_path / "verify.json").read_text())
    assert set(report["suites"]) == {"oracle_chi_square", "strong_law", "event_identity"}
    assert report["passed"] is True
    assert code == 0
    assert report["suites"]["oracle_chi_square"]["boundary_certificate"] <= 1e-8
    assert report["suites"]["event_identity"]["count_identity_passed"] is True
