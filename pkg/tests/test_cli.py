"""End-to-end command-line behavior, including exit codes and file outputs."""

import csv
import os
import subprocess
import sys
from pathlib import Path

import pytest

from doorrmst.cli import main

DATA_DIR = Path(__file__).parent / "data"

CONTROL_RATES = "[0.5, 0.2, 0.1, 1.0, 0.4, 0.2, 0.6, 0.3, 0.3]"
TREATMENT_RATES = "[0.3, 0.15, 0.06, 0.6, 0.3, 0.12, 0.36, 0.24, 0.24]"


def write_config(path, *, seed=42, taus="[1.0, 2.0]", replicates=2, n_per_arm=60,
                 extra="", analysis_extra=""):
    path.write_text(
        f"seed = {seed}\n"
        "[analysis]\n"
        f"tau = {taus}\n"
        f"{analysis_extra}"
        "[simulation]\n"
        f"n_per_arm = {n_per_arm}\n"
        "censor_max = 4.0\n"
        f"replicates = {replicates}\n"
        f"rates_control = {CONTROL_RATES}\n"
        f"rates_treatment = {TREATMENT_RATES}\n"
        f"{extra}"
    )
    return path


@pytest.fixture
def config_path(tmp_path):
    return write_config(tmp_path / "run.toml")


@pytest.fixture
def trial_csv(tmp_path, config_path):
    out = tmp_path / "trial.csv"
    assert main(["simulate", "--config", str(config_path), "--out", str(out)]) == 0
    return out


class TestUsageAndVersion:
    def test_no_subcommand_is_a_usage_error(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_unknown_flag_is_a_usage_error(self, capsys):
        assert main(["analyze", "--data", "x.csv", "--frobnicate"]) == 2
        capsys.readouterr()

    def test_version_exits_cleanly(self, capsys):
        assert main(["--version"]) == 0
        assert "doorrmst" in capsys.readouterr().out

    def test_installed_script_answers(self):
        proc = subprocess.run(
            [sys.executable, "-m", "doorrmst.cli", "--version"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0


class TestSimulate:
    def test_same_seed_gives_identical_files(self, tmp_path, config_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(["simulate", "--config", str(config_path), "--out", str(a)]) == 0
        assert main(["simulate", "--config", str(config_path), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_override_changes_the_draw(self, tmp_path, config_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        main(["simulate", "--config", str(config_path), "--out", str(a)])
        main(["simulate", "--config", str(config_path), "--out", str(b), "--seed", "43"])
        assert a.read_bytes() != b.read_bytes()
        out = capsys.readouterr().out
        assert "120 subjects" in out

    def test_default_output_name(self, tmp_path, config_path):
        out_dir = tmp_path / "sim"
        assert main(["simulate", "--config", str(config_path), "--out-dir", str(out_dir)]) == 0
        assert (out_dir / "simulated_trial.csv").exists()

    def test_config_without_simulation_section(self, tmp_path, capsys):
        cfg = tmp_path / "bare.toml"
        cfg.write_text("[analysis]\ntau = [1.0]\n")
        assert main(["simulate", "--config", str(cfg)]) == 3
        assert "simulation" in capsys.readouterr().err


class TestAnalyze:
    def test_writes_all_report_files(self, tmp_path, config_path, trial_csv, capsys):
        out_dir = tmp_path / "report"
        code = main(
            ["analyze", "--data", str(trial_csv), "--config", str(config_path),
             "--out-dir", str(out_dir)]
        )
        assert code == 0
        for name in ("report.txt", "estimates.csv", "tests.csv", "km_curves.csv",
                     "km_curves.svg"):
            assert (out_dir / name).exists(), name
        text = capsys.readouterr().out
        assert "restricted mean survival by tier" in text
        assert "tau = 1" in text and "tau = 2" in text
        assert "chi-square" in text
        assert (out_dir / "report.txt").read_text() == text

    def test_no_plots_skips_the_figure(self, tmp_path, config_path, trial_csv, capsys):
        out_dir = tmp_path / "report"
        main(["analyze", "--data", str(trial_csv), "--config", str(config_path),
              "--out-dir", str(out_dir), "--no-plots"])
        capsys.readouterr()
        assert not (out_dir / "km_curves.svg").exists()
        assert (out_dir / "km_curves.csv").exists()

    def test_csv_format_streams_estimates(self, tmp_path, config_path, trial_csv, capsys):
        main(["analyze", "--data", str(trial_csv), "--config", str(config_path),
              "--out-dir", str(tmp_path / "r"), "--format", "csv", "--no-plots"])
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "tau,arm,tier,rmst,std_error,ci_low,ci_high"

    def test_tau_flag_replaces_config(self, tmp_path, trial_csv, capsys):
        out_dir = tmp_path / "r"
        code = main(["analyze", "--data", str(trial_csv), "--tau", "1.5",
                     "--out-dir", str(out_dir), "--no-plots"])
        assert code == 0
        text = capsys.readouterr().out
        assert "tau = 1.5" in text
        assert "tau = 2" not in text

    def test_estimate_report_shape(self, tmp_path, config_path, trial_csv, capsys):
        out_dir = tmp_path / "r"
        main(["analyze", "--data", str(trial_csv), "--config", str(config_path),
              "--out-dir", str(out_dir), "--no-plots"])
        capsys.readouterr()
        with open(out_dir / "estimates.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 2 * 2 * 4
        for row in rows:
            assert float(row["ci_low"]) <= float(row["rmst"]) <= float(row["ci_high"])
        with open(out_dir / "tests.csv", newline="") as fh:
            tests = list(csv.DictReader(fh))
        kinds = {row["test"] for row in tests}
        assert kinds == {"between_arms", "wald_overall"}

    def test_within_and_single_sections(self, tmp_path, trial_csv, capsys):
        cfg = write_config(
            tmp_path / "full.toml",
            analysis_extra=(
                'tests = ["between", "wald", "within", "single"]\n'
                "single_null = 0.5\n"
                "within_pairs = [[1, 2], [1, 4]]\n"
            ),
        )
        out_dir = tmp_path / "r"
        code = main(["analyze", "--data", str(trial_csv), "--config", str(cfg),
                     "--out-dir", str(out_dir), "--no-plots"])
        assert code == 0
        text = capsys.readouterr().out
        assert "within" in text and "single" in text
        assert "tier 2 minus tier 1" in text

    def test_missing_data_file_is_io_error(self, tmp_path, capsys):
        code = main(["analyze", "--data", str(tmp_path / "nope.csv"), "--tau", "1.0"])
        assert code == 5
        assert "error" in capsys.readouterr().err

    def test_without_config_or_tau(self, trial_csv, capsys):
        assert main(["analyze", "--data", str(trial_csv)]) == 3
        assert "tau" in capsys.readouterr().err

    def test_invalid_record_names_subject_and_exits_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            "subject_id,arm,t1,t2,d1,d2\n"
            "ok-1,0,1.0,2.0,1,1\n"
            "bad-7,0,2.0,1.0,1,1\n"
        )
        assert main(["analyze", "--data", str(bad), "--tau", "1.0"]) == 3
        assert "bad-7" in capsys.readouterr().err

    def test_tau_beyond_support_exits_4(self, trial_csv, tmp_path, capsys):
        code = main(["analyze", "--data", str(trial_csv), "--tau", "50",
                     "--out-dir", str(tmp_path / "r"), "--no-plots"])
        assert code == 4
        assert "tau" in capsys.readouterr().err.lower()

    def test_unwritable_out_dir_exits_5(self, trial_csv, tmp_path, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("a file, not a directory")
        code = main(["analyze", "--data", str(trial_csv), "--tau", "1.0",
                     "--out-dir", str(blocker / "sub"), "--no-plots"])
        assert code == 5
        capsys.readouterr()


class TestStudy:
    def study_config(self, tmp_path):
        return write_config(
            tmp_path / "study.toml",
            taus="[1.0]",
            replicates=140,
            n_per_arm=40,
            extra=("[study]\ntable1_n = [15]\npower_n = [20, 40]\n"
                   "oracle_reps = 2000\n"),
        )

    def test_zero_replicates_is_a_config_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "zero.toml", replicates=0)
        assert main(["study", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 3
        assert "replicates" in capsys.readouterr().err

    def test_writes_quality_power_and_calibration(self, tmp_path, capsys):
        cfg = self.study_config(tmp_path)
        out_dir = tmp_path / "out"
        code = main(["study", "--config", str(cfg), "--out-dir", str(out_dir),
                     "--jobs", "2"])
        assert code == 0
        for name in ("table1_n15.csv", "power.csv", "calibration.csv",
                     "power_curves.svg", "calibration_curves.svg", "km_example.svg"):
            assert (out_dir / name).exists(), name
        out = capsys.readouterr().out
        assert "estimator quality" in out
        with open(out_dir / "power.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 2 * 1 * 5
        assert {r["n_per_arm"] for r in rows} == {"20", "40"}

    def test_study_runs_are_reproducible(self, tmp_path, capsys):
        cfg = self.study_config(tmp_path)
        a = tmp_path / "a"
        b = tmp_path / "b"
        assert main(["study", "--config", str(cfg), "--out-dir", str(a),
                     "--no-plots"]) == 0
        assert main(["study", "--config", str(cfg), "--out-dir", str(b),
                     "--no-plots", "--jobs", "3"]) == 0
        capsys.readouterr()
        for name in ("table1_n15.csv", "power.csv", "calibration.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name


class TestOracle:
    def test_text_output(self, config_path, capsys):
        code = main(["oracle", "--config", str(config_path), "--reps", "5000"])
        assert code == 0
        out = capsys.readouterr().out
        assert "tier1" in out and "tau=1" in out and "tau=2" in out

    def test_csv_output_and_determinism(self, config_path, capsys):
        argv = ["oracle", "--config", str(config_path), "--reps", "5000",
                "--format", "csv", "--arm", "treatment"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        second = capsys.readouterr().out
        assert first == second
        lines = first.splitlines()
        assert lines[0] == "tau,tier,value,mc_se"
        assert len(lines) == 1 + 2 * 4

    def test_null_arm_defaults_to_treatment_rates(self, config_path, capsys):
        argv = ["oracle", "--config", str(config_path), "--reps", "2000",
                "--format", "csv"]
        assert main(argv + ["--arm", "null"]) == 0
        null_out = capsys.readouterr().out
        assert main(argv + ["--arm", "treatment"]) == 0
        treatment_out = capsys.readouterr().out
        assert null_out == treatment_out


class TestGoldenReport:
    """Frozen end-to-end output: the same inputs must keep producing the
    same report, byte for byte."""

    def test_report_matches_frozen_golden(self, tmp_path, capsys):
        golden = DATA_DIR / "golden_report.txt"
        out_dir = tmp_path / "golden_run"
        code = main(
            ["analyze",
             "--data", str(DATA_DIR / "golden_trial.csv"),
             "--config", str(DATA_DIR / "golden_config.toml"),
             "--out-dir", str(out_dir), "--no-plots"]
        )
        assert code == 0
        capsys.readouterr()
        assert (out_dir / "report.txt").read_bytes() == golden.read_bytes()
