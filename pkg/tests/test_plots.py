"""Figure-emission contracts: file counts and formats."""

from augring.harness import run_experiment, sweep_t
from augring.plots import emit_plots, emit_sweep_plot
from test_harness import tiny_config


def test_one_learning_curve_figure_per_signal(tmp_path):
    cfg = tiny_config(trials=2, horizon=60,
                      signals=("circular_ar1", "noncircular_arma", "ikeda"))
    report = run_experiment(cfg, with_theory=False, write=False)
    paths = emit_plots(report, tmp_path)
    curves = [p for p in paths if "learning_curves" in p]
    assert len(curves) == 3
    for signal in cfg.signals:
        svg = tmp_path / f"learning_curves_{signal}.svg"
        assert svg.exists()
        assert svg.read_bytes().startswith(b"<?xml")


def test_theory_bars_only_with_theory(tmp_path):
    cfg = tiny_config(trials=2, horizon=60)
    with_theory = run_experiment(cfg, with_theory=True, write=False)
    paths = emit_plots(with_theory, tmp_path / "a")
    assert any("theory_vs_sim" in p for p in paths)
    without = run_experiment(cfg, with_theory=False, write=False)
    paths = emit_plots(without, tmp_path / "b")
    assert not any("theory_vs_sim" in p for p in paths)


def test_empty_sweep_emits_nothing(tmp_path):
    cfg = tiny_config()
    report = sweep_t(cfg, t_values=(), write=False)
    assert emit_sweep_plot(report, tmp_path) == []


def test_sweep_plot_written(tmp_path):
    cfg = tiny_config(trials=2, horizon=60, sweep_projection_orders=(1, 2))
    report = sweep_t(cfg, write=False)
    paths = emit_sweep_plot(report, tmp_path)
    assert paths == [str(tmp_path / "sweep_msd.svg")]
