"""CLI surface: subcommands, figure/CSV emission, exit codes."""

import json

import pytest
from click.testing import CliRunner

from augring.cli import main

QUICK = {
    "schema_version": 1,
    "seed": 5,
    "trials": 2,
    "horizon": 80,
    "signals": ["circular_ar1"],
    "network": {"nodes": 3, "filter_length": 2, "projection_order": 2, "step_size": 0.3},
    "theory": {"moment_samples": 300},
    "sweep": {"projection_orders": [1, 2]},
    "steady_state": {"window": 10, "span": 20},
}


@pytest.fixture()
def quick_config(tmp_path):
    path = tmp_path / "quick.json"
    path.write_text(json.dumps(QUICK))
    return path


def test_run_writes_outputs_and_exits_zero(tmp_path, quick_config):
    out = tmp_path / "out"
    result = CliRunner().invoke(main, ["run", "--config", str(quick_config),
                                       "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "circular_ar1" in result.output
    assert (out / "report.json").exists()
    assert (out / "curves_incremental_circular_ar1.csv").exists()
    assert (out / "learning_curves_circular_ar1.svg").exists()
    assert (out / "theory_vs_sim_circular_ar1.svg").exists()


def test_run_no_plots_and_overrides(tmp_path, quick_config):
    out = tmp_path / "np"
    result = CliRunner().invoke(main, ["run", "--config", str(quick_config),
                                       "--out", str(out), "--trials", "1",
                                       "--no-plots", "--no-theory", "--seed", "9"])
    assert result.exit_code == 0, result.output
    assert not (out / "learning_curves_circular_ar1.svg").exists()
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["trials"] == 1
    assert report["config"]["seed"] == 9


def test_run_exit_two_on_unstable_step_size(tmp_path):
    doc = dict(QUICK, network=dict(QUICK["network"], step_size=80.0), trials=1, horizon=60)
    path = tmp_path / "wild.json"
    path.write_text(json.dumps(doc))
    result = CliRunner().invoke(main, ["run", "--config", str(path),
                                       "--out", str(tmp_path / "o"), "--no-plots"])
    assert result.exit_code == 2
    assert "unstable" in result.output


def test_run_exit_one_on_bad_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(dict(QUICK, trials=0)))
    result = CliRunner().invoke(main, ["run", "--config", str(path)])
    assert result.exit_code == 1
    assert "config error" in result.output


def test_sweep_command(tmp_path, quick_config):
    out = tmp_path / "sw"
    result = CliRunner().invoke(main, ["sweep-t", "--config", str(quick_config),
                                       "--out", str(out), "--no-plots"])
    assert result.exit_code == 0, result.output
    assert (out / "sweep_msd.csv").exists()
    assert "T=1" in result.output and "T=2" in result.output


def test_sweep_explicit_t_flags(tmp_path, quick_config):
    out = tmp_path / "sw2"
    result = CliRunner().invoke(main, ["sweep-t", "--config", str(quick_config),
                                       "--out", str(out), "--t", "1", "--no-plots"])
    assert result.exit_code == 0, result.output
    assert "T=1" in result.output


def test_theory_command(tmp_path, quick_config):
    out = tmp_path / "th"
    result = CliRunner().invoke(main, ["theory", "--config", str(quick_config),
                                       "--out", str(out)])
    assert result.exit_code == 0, result.output
    payload = json.loads((out / "theory_circular_ar1.json").read_text())
    assert payload["stable"] is True
    assert len(payload["per_node_msd_db"]) == 3


def test_stability_command(tmp_path, quick_config):
    out = tmp_path / "st"
    result = CliRunner().invoke(main, ["stability", "--config", str(quick_config),
                                       "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "mu_max" in result.output
    assert (out / "stability.json").exists()


def test_signals_command_csv(tmp_path):
    out = tmp_path / "sig"
    result = CliRunner().invoke(main, ["signals", "--model", "ikeda", "--n", "200",
                                       "--seed", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    csv = (out / "signal_ikeda.csv").read_text().splitlines()
    assert csv[0].startswith("# {")
    assert csv[1] == "t,re,im"
    assert len(csv) == 202


def test_signals_command_json(tmp_path):
    out = tmp_path / "sigj"
    result = CliRunner().invoke(main, ["signals", "--model", "doubly_white",
                                       "--variance", "0.5", "--n", "50",
                                       "--seed", "1", "--out", str(out),
                                       "--format", "json"])
    assert result.exit_code == 0, result.output
    payload = json.loads((out / "signal_doubly_white.json").read_text())
    assert payload["model"]["variance"] == 0.5
    assert len(payload["samples"]) == 50


def test_signals_requires_model_or_config():
    result = CliRunner().invoke(main, ["signals"])
    assert result.exit_code == 1
