"""Tests for the clayer command-line entry point."""

import pytest

from cattaneo_layer.checkpoint import load_checkpoint
from cattaneo_layer.cli import (
    EXIT_CONFIG,
    EXIT_DIVERGED,
    EXIT_OK,
    EXIT_SMALLNESS,
    build_parser,
    main,
)
from cattaneo_layer.reports import REPORT_COLUMNS, SUMMARY_SCHEMA, read_csv, read_summary

SHORT_RUN = """
[grid]
n_x = 8
n_y = 9

[integrator]
dt = 0.01
t_end = 0.05
monitor_every = 1
"""


def _config(tmp_path, text):
    path = tmp_path / "run.toml"
    path.write_text(text)
    return str(path)


def _run(tmp_path, command, text, *extra):
    out = tmp_path / "out"
    config = _config(tmp_path, text)
    code = main([command, "--config", config, "--out", str(out), "--quiet", *extra])
    return code, out


class TestParser:
    """Test the argument parser."""

    def test_commands(self):
        parser = build_parser()
        args = parser.parse_args(["mms", "--seed", "3"])
        assert args.command == "mms"
        assert args.seed == 3

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["integrate"])


class TestSimulate:
    """Test the simulate command."""

    def test_zero_data_run(self, tmp_path):
        code, out = _run(tmp_path, "simulate", SHORT_RUN + '[initial]\npreset = "zero"\n')
        assert code == EXIT_OK
        frame = read_csv(out / "report.csv")
        assert list(frame.columns) == REPORT_COLUMNS
        assert len(frame) == 6
        assert (frame["Es"] == 0.0).all()
        summary = read_summary(out / "summary.json")
        assert summary["schema"] == SUMMARY_SCHEMA
        assert summary["command"] == "simulate"
        assert summary["exit_code"] == EXIT_OK
        assert summary["results"]["snapshots"] == 6
        assert len(list((out / "checkpoints").glob("step_*.clayer"))) == 6

    def test_resume_from_checkpoint(self, tmp_path):
        code, out = _run(tmp_path, "simulate", SHORT_RUN + '[initial]\npreset = "zero"\n')
        assert code == EXIT_OK
        checkpoint = out / "checkpoints" / "step_000005.clayer"
        state, _ = load_checkpoint(checkpoint)
        assert state.t == pytest.approx(0.05)

        resumed = tmp_path / "resumed"
        text = SHORT_RUN + f'[initial]\ncheckpoint = "{checkpoint}"\n'
        code = main(["simulate", "--config", _config(tmp_path, text), "--out", str(resumed)])
        assert code == EXIT_OK
        summary = read_summary(resumed / "summary.json")
        assert summary["results"]["t_final"] == pytest.approx(0.10)

    def test_divergence(self, tmp_path):
        text = SHORT_RUN.replace("monitor_every = 1", "monitor_every = 1\nmax_norm_guard = 1e-12")
        code, out = _run(tmp_path, "simulate", text)
        assert code == EXIT_DIVERGED
        assert (out / "diverged.clayer").exists()
        summary = read_summary(out / "summary.json")
        assert summary["results"]["diverged_at_step"] == 1

    def test_malformed_config(self, tmp_path):
        code, _ = _run(tmp_path, "simulate", "[grid]\nn_x = 7\n")
        assert code == EXIT_CONFIG

    def test_overflowing_weights(self, tmp_path):
        """A fine grid with a large tau0 ends with the config exit code."""
        code, out = _run(tmp_path, "simulate", "[grid]\nn_x = 1024\n[parameters]\ntau0 = 2.0\n")
        assert code == EXIT_CONFIG
        assert not (out / "report.csv").exists()

    def test_resumed_reports_restart_the_weight(self, tmp_path):
        """report.csv of a resumed run starts at tau0 like its smallness check."""
        text = SHORT_RUN + '[initial]\npreset = "analytic"\namplitude = 0.5\n'
        code, out = _run(tmp_path, "simulate", text)
        assert code == EXIT_OK
        checkpoint = out / "checkpoints" / "step_000005.clayer"

        resumed = tmp_path / "resumed"
        text = SHORT_RUN + f'[initial]\ncheckpoint = "{checkpoint}"\n'
        code = main(["simulate", "--config", _config(tmp_path, text), "--out", str(resumed)])
        assert code == EXIT_OK
        frame = read_csv(resumed / "report.csv")
        assert frame["t"].iloc[0] == pytest.approx(0.05)
        assert frame["tau_t"].iloc[0] == pytest.approx(1.0)

    def test_missing_checkpoint(self, tmp_path):
        text = SHORT_RUN + f'[initial]\ncheckpoint = "{tmp_path / "absent.clayer"}"\n'
        code, _ = _run(tmp_path, "simulate", text)
        assert code == EXIT_CONFIG


class TestVerifyTheorem:
    """Test the verify-theorem command on cheap inputs."""

    def test_zero_data(self, tmp_path):
        code, out = _run(tmp_path, "verify-theorem", SHORT_RUN + '[initial]\npreset = "zero"\n')
        assert code == EXIT_OK
        results = read_summary(out / "summary.json")["results"]
        assert results["smallness"]["passes"]
        for name in ("decay", "master", "master_printed", "bootstrap", "radius"):
            assert results[name]["passes"]
        assert results["master"]["reported_reading"] == "derivation"
        frame = read_csv(out / "report.csv")
        assert (frame["master_slack"] == 0.0).all()

    def test_oversized_data(self, tmp_path):
        text = SHORT_RUN + '[initial]\npreset = "analytic"\namplitude = 3.0\n'
        code, out = _run(tmp_path, "verify-theorem", text)
        assert code == EXIT_SMALLNESS
        summary = read_summary(out / "summary.json")
        assert summary["exit_code"] == EXIT_SMALLNESS
        assert summary["results"]["smallness"]["margin"] < 0
        assert not (out / "report.csv").exists()


class TestVerifyLemma:
    """Test the verify-lemma command."""

    def test_small_suite(self, tmp_path):
        text = "[lemma]\nn_cases = 3\nn_states = 2\n"
        code, out = _run(tmp_path, "verify-lemma", text, "--seed", "9")
        assert code == EXIT_OK
        assert len(read_csv(out / "lemma_cases.csv")) == 3
        results = read_summary(out / "summary.json")["results"]
        assert results["seed"] == 9
        assert all(results["verdicts"].values())


class TestVerifyScaling:
    """Test the verify-scaling command."""

    def test_both_regimes(self, tmp_path):
        code, out = _run(tmp_path, "verify-scaling", "[scaling]\nn_y = 33\n")
        assert code == EXIT_OK
        assert (out / "scaling_prandtl.csv").exists()
        assert (out / "scaling_hartmann.csv").exists()
        results = read_summary(out / "summary.json")["results"]
        limits = results["hartmann"]["coefficient_limits"]
        assert limits["Ha/(Re H)"] == pytest.approx(1.0)
        assert len(results["prandtl"]["limit_gaps"]) == 5

    def test_no_field_skips_hartmann(self, tmp_path):
        code, out = _run(tmp_path, "verify-scaling", "[parameters]\nH = 0.0\n[scaling]\nn_y = 33\n")
        assert code == EXIT_OK
        assert not (out / "scaling_hartmann.csv").exists()
        assert "hartmann" not in read_summary(out / "summary.json")["results"]


class TestMms:
    """Test the mms command with a single resolution."""

    def test_single_resolution(self, tmp_path):
        """The errors are written without an order and the exit code is 1."""
        text = (
            "[grid]\nn_x = 8\nn_y = 9\n"
            "[mms]\ndt_values = [0.01]\nt_end = 0.05\n"
            "n_y_values = [9]\ndt_spatial = 0.01\nn_y_reference = 17\n"
        )
        code, out = _run(tmp_path, "mms", text)
        assert code == EXIT_CONFIG
        frame = read_csv(out / "mms_orders.csv")
        assert sorted(frame["kind"]) == ["space", "time"]
        assert (frame["error"] > 0).all()
        assert frame["order"].isna().all()
        summary = read_summary(out / "summary.json")
        assert summary["exit_code"] == EXIT_CONFIG
        assert summary["results"]["temporal"]["orders"] == []
