"""Command-line experiment harness.

Exit codes: 0 success, 1 configuration or I/O error, 2 the configured
step size is unstable (theory radius >= 1 or the simulation diverged).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import harness
from .config import ConfigError, ExperimentConfig, load_config
from .signals import SignalKind, SignalModel, estimate_circularity, generate, write_sequence_csv

SIGNAL_CHOICES = [k.value for k in SignalKind]


def _load(config_path, **overrides) -> ExperimentConfig:
    try:
        return load_config(config_path, **overrides)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)


def _guard_io(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Distributed widely linear affine projection experiments on a ring."""


config_opt = click.option("--config", "config_path", required=True,
                          type=click.Path(exists=True, dir_okay=False),
                          help="JSON experiment configuration.")
seed_opt = click.option("--seed", type=int, default=None, help="Override master seed.")
out_opt = click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
                       help="Override output directory.")
trials_opt = click.option("--trials", type=int, default=None, help="Override trial count.")
format_opt = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
                          help="Curve output format.")


@main.command()
@config_opt
@seed_opt
@out_opt
@trials_opt
@format_opt
@click.option("--no-plots", is_flag=True, help="Skip figure rendering.")
@click.option("--no-theory", is_flag=True, help="Skip moment estimation and prediction.")
def run(config_path, seed, out_dir, trials, fmt, no_plots, no_theory):
    """Run the full experiment: simulation, theory, CSV/JSON and figures."""
    cfg = _load(config_path, seed=seed, output_dir=out_dir, trials=trials, output_format=fmt)
    report = _guard_io(harness.run_experiment, cfg, with_theory=not no_theory,
                       emit_figures=not no_plots)
    for m in report.models:
        inc, non = m.incremental.steady, m.noncooperative.steady
        line = (f"{m.signal}: incremental {inc.network_db:+.2f} dB, "
                f"noncooperative {non.network_db:+.2f} dB")
        if m.theory is not None and m.theory.prediction.stable:
            line += f", predicted {m.theory.prediction.network_avg_db:+.2f} dB"
        click.echo(line)
    click.echo(f"wrote {len(report.files)} files to {cfg.output_dir if out_dir is None else out_dir}")
    if report.unstable:
        click.echo("unstable configuration detected", err=True)
        sys.exit(2)


@main.command("sweep-t")
@config_opt
@seed_opt
@out_opt
@trials_opt
@click.option("--t", "t_values", type=int, multiple=True,
              help="Projection orders to sweep (default: config sweep list).")
@click.option("--no-plots", is_flag=True, help="Skip figure rendering.")
def sweep_t(config_path, seed, out_dir, trials, t_values, no_plots):
    """Sweep the projection order T and tabulate steady-state MSD."""
    cfg = _load(config_path, seed=seed, output_dir=out_dir, trials=trials)
    report = _guard_io(harness.sweep_t, cfg, t_values or None, emit_figures=not no_plots)
    if not report.entries:
        click.echo("empty sweep: nothing to do")
        return
    for entry in report.entries:
        s = entry.result.steady
        click.echo(f"T={entry.projection_order}: network steady state "
                   f"{s.network_db:+.2f} dB, cycles to 3 dB: {s.cycles_to_3db}")


@main.command()
@config_opt
@seed_opt
@out_opt
def stability(config_path, seed, out_dir):
    """Print per-node step-size bounds and probe them with short runs."""
    cfg = _load(config_path, seed=seed, output_dir=out_dir)
    report = _guard_io(harness.check_stability, cfg)
    for k, mu in enumerate(report.mu_max):
        click.echo(f"node {k}: mu_max = {mu:.4f}")
    click.echo(f"network bound: {report.mu_max_network:.4f}")
    for run_info in report.runs:
        label = "converged" if run_info["all_converged"] else (
            "diverged" if run_info["any_diverged"] else "mixed")
        click.echo(f"mu = {run_info['factor']:.1f} x bound "
                   f"({run_info['step_size']:.4f}): {label}")


@main.command()
@config_opt
@seed_opt
@out_opt
def theory(config_path, seed, out_dir):
    """Compute moment sets, steady-state predictions and bounds; write JSON."""
    cfg = _load(config_path, seed=seed, output_dir=out_dir)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    unstable = False
    for signal in cfg.signals:
        net = cfg.network(signal)
        result = _guard_io(harness._theory_result, cfg, net, signal)
        payload = {"signal": signal, "config_hash": cfg.hash(),
                   **harness._theory_payload(result)}
        _guard_io(harness._write_json, out / f"theory_{signal}.json", payload)
        if result.prediction.stable:
            click.echo(f"{signal}: predicted network MSD "
                       f"{result.prediction.network_avg_db:+.2f} dB, "
                       f"mu_max {result.mu_max_network:.4f}")
        else:
            radius = float(np.max(result.prediction.spectral_radii))
            click.echo(f"{signal}: unstable (spectral radius {radius:.4f})", err=True)
            unstable = True
    if unstable:
        sys.exit(2)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Take model/seed defaults from a config file.")
@click.option("--model", "model_name", type=click.Choice(SIGNAL_CHOICES), default=None)
@click.option("--n", "n_samples", type=int, default=1000, show_default=True)
@seed_opt
@out_opt
@click.option("--variance", type=float, default=1.0, show_default=True,
              help="Power of the doubly white generator.")
@click.option("--burn-in", type=int, default=None, help="Samples to discard up front.")
@format_opt
def signals(config_path, model_name, n_samples, seed, out_dir, variance, burn_in, fmt):
    """Dump one generator's output with its circularity summary."""
    cfg = _load(config_path) if config_path else None
    if model_name is None:
        if cfg is None:
            click.echo("config error: provide --model or --config", err=True)
            sys.exit(1)
        model_name = cfg.signals[0]
    if seed is None:
        seed = cfg.seed if cfg is not None else 0
    if burn_in is None:
        burn_in = cfg.signal_burn_in(model_name) if cfg is not None else 0
    out = Path(out_dir or (cfg.output_dir if cfg is not None else "out"))
    _guard_io(out.mkdir, parents=True, exist_ok=True)

    kind = SignalKind(model_name)
    model = SignalModel(kind, seed=seed, variance=variance)
    seq = generate(model, n_samples, burn_in)
    if fmt == "json":
        payload = {"model": model.metadata(), "burn_in": burn_in,
                   "samples": [[float(v.real), float(v.imag)] for v in seq.samples]}
        path = out / f"signal_{model_name}.json"
        _guard_io(harness._write_json, path, payload)
    else:
        path = out / f"signal_{model_name}.csv"
        _guard_io(write_sequence_csv, seq, path)
    if n_samples > 0:
        rep = estimate_circularity(seq)
        click.echo(f"{model_name}: n={n_samples} circularity={rep.coefficient:.4f}")
    click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
