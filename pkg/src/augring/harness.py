"""Experiment harness: seeded multi-trial simulation, theory join, reports.

The engine runs all Monte Carlo trials of one configuration simultaneously
(trials are a leading array dimension); within a cycle the ring is traversed
sequentially, as the algorithm requires.  Every random stream is derived from
the master seed, a stream tag, the node index and the trial index, so any
single trial can be re-generated in isolation and full runs are byte-stable.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .filters import LearningCurve
from .network import NetworkConfig, widely_linear_output
from .seeding import MOMENT_STREAM, NOISE_STREAM, SIGNAL_STREAM, derive_seed, rng_from
from .signals import SignalKind, SignalModel, gen_doubly_white, generate, ikeda_orbit
from .theory import MsdPrediction, estimate_moments, predict_msd, stability_bound

__all__ = [
    "TrialData",
    "SteadyState",
    "AlgorithmResult",
    "TheoryResult",
    "ModelReport",
    "ExperimentReport",
    "SweepEntry",
    "SweepReport",
    "StabilityCheck",
    "build_dataset",
    "simulate",
    "trial_average",
    "run_experiment",
    "sweep_t",
    "check_stability",
    "detect_convergence",
]


# ----------------------------------------------------------------------
# data generation
# ----------------------------------------------------------------------

@dataclasses.dataclass(eq=False)
class TrialData:
    """Per-trial node streams: inputs x, observations d, noise v (R, N, n)."""

    x: np.ndarray
    d: np.ndarray
    v: np.ndarray


def build_dataset(cfg: ExperimentConfig, signal: str, horizon: int = None,
                  trial_indices=None, master_seed: int = None) -> TrialData:
    """Generate every trial's per-node input/observation streams.

    Trial r, node k draws its signal from seed path (master, SIGNAL, k, r) and
    its noise from (master, NOISE, k, r); the observation stream applies the
    widely linear model to the zero-padded input windows.
    """
    seed = cfg.seed if master_seed is None else int(master_seed)
    horizon = cfg.horizon if horizon is None else int(horizon)
    trial_indices = range(cfg.trials) if trial_indices is None else list(trial_indices)
    burn = cfg.signal_burn_in(signal)
    kind = SignalKind(signal)
    n_nodes = cfg.n_nodes
    rows = len(list(trial_indices))
    trial_indices = list(trial_indices)

    x = np.empty((rows, n_nodes, horizon), dtype=np.complex128)
    for k in range(n_nodes):
        if kind is SignalKind.IKEDA:
            inits = np.array([
                rng_from(derive_seed(seed, SIGNAL_STREAM, k, t)).random(2)
                for t in trial_indices
            ])
            x[:, k, :] = ikeda_orbit(inits[:, 0], inits[:, 1], horizon + burn)[:, burn:]
        else:
            for r, t in enumerate(trial_indices):
                model = SignalModel(kind, seed=derive_seed(seed, SIGNAL_STREAM, k, t))
                x[r, k, :] = generate(model, horizon, burn).samples

    v = np.empty_like(x)
    for k in range(n_nodes):
        variance = float(cfg.noise_variances[k])
        for r, t in enumerate(trial_indices):
            v[r, k, :] = gen_doubly_white(horizon, variance,
                                          derive_seed(seed, NOISE_STREAM, k, t)).samples

    true_h = np.asarray(cfg.true_h, dtype=complex)
    true_g = np.asarray(cfg.true_g, dtype=complex)
    d = widely_linear_output(x, true_h, true_g) + v
    return TrialData(x=x, d=d, v=v)


# ----------------------------------------------------------------------
# batched simulation engine
# ----------------------------------------------------------------------

def _run_incremental(data: TrialData, net: NetworkConfig, mu_scale: float = 1.0) -> np.ndarray:
    """Per-trial squared weight error after each node's update, (R, n, N)."""
    rows, n_nodes, horizon = data.x.shape
    L, T = net.filter_length, net.projection_order
    px, pd = L + T - 2, T - 1
    xpad = np.concatenate([np.zeros((rows, n_nodes, px), complex), data.x], axis=2)
    dpad = np.concatenate([np.zeros((rows, n_nodes, pd), complex), data.d], axis=2)
    lag = np.arange(L)[:, None] + np.arange(T)[None, :]
    taps = np.arange(T)
    reg = net.regularization * np.eye(T)
    mus = mu_scale * net.step_sizes
    h = np.zeros((rows, L), dtype=complex)
    g = np.zeros((rows, L), dtype=complex)
    curves = np.empty((rows, horizon, n_nodes))
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(horizon):
            for k in net.ring_order:
                X = xpad[:, k][:, px + i - lag]
                dblk = dpad[:, k][:, pd + i - taps]
                e = dblk - np.einsum("mlt,ml->mt", X, h) - np.einsum("mlt,ml->mt", np.conj(X), g)
                C = np.einsum("mlt,mls->mts", np.conj(X), X)
                z = np.linalg.solve(C + np.conj(C) + reg, e[..., None])[..., 0]
                h = h + mus[k] * np.einsum("mlt,mt->ml", np.conj(X), z)
                g = g + mus[k] * np.einsum("mlt,mt->ml", X, z)
                curves[:, i, k] = (np.sum(np.abs(net.true_h - h) ** 2, axis=1)
                                   + np.sum(np.abs(net.true_g - g) ** 2, axis=1))
    return curves


def _run_noncooperative(data: TrialData, net: NetworkConfig, mu_scale: float) -> np.ndarray:
    """Baseline where every node adapts on its own data only; all nodes batched."""
    rows, n_nodes, horizon = data.x.shape
    L, T = net.filter_length, net.projection_order
    px, pd = L + T - 2, T - 1
    xpad = np.concatenate([np.zeros((rows, n_nodes, px), complex), data.x], axis=2)
    dpad = np.concatenate([np.zeros((rows, n_nodes, pd), complex), data.d], axis=2)
    lag = np.arange(L)[:, None] + np.arange(T)[None, :]
    taps = np.arange(T)
    reg = net.regularization * np.eye(T)
    mus = (mu_scale * net.step_sizes)[None, :, None]
    h = np.zeros((rows, n_nodes, L), dtype=complex)
    g = np.zeros((rows, n_nodes, L), dtype=complex)
    curves = np.empty((rows, horizon, n_nodes))
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(horizon):
            X = xpad[:, :, px + i - lag]
            dblk = dpad[:, :, pd + i - taps]
            e = dblk - np.einsum("mklt,mkl->mkt", X, h) - np.einsum("mklt,mkl->mkt", np.conj(X), g)
            C = np.einsum("mklt,mkls->mkts", np.conj(X), X)
            z = np.linalg.solve(C + np.conj(C) + reg, e[..., None])[..., 0]
            h = h + mus * np.einsum("mklt,mkt->mkl", np.conj(X), z)
            g = g + mus * np.einsum("mklt,mkt->mkl", X, z)
            curves[:, i, :] = (np.sum(np.abs(net.true_h - h) ** 2, axis=2)
                               + np.sum(np.abs(net.true_g - g) ** 2, axis=2))
    return curves


def simulate(cfg: ExperimentConfig, signal: str, algorithm: str = "incremental", *,
             mu_scale: float = 1.0, horizon: int = None, trials: int = None,
             trial_indices=None, projection_order: int = None, step_sizes=None,
             master_seed: int = None, data: TrialData = None) -> np.ndarray:
    """Run one algorithm and return per-trial curves (trials, horizon, nodes)."""
    if trial_indices is None:
        trial_indices = range(cfg.trials if trials is None else int(trials))
    net = cfg.network(signal, projection_order=projection_order)
    if step_sizes is not None:
        net.step_sizes = np.broadcast_to(np.asarray(step_sizes, float), (net.n_nodes,)).copy()
    if data is None:
        data = build_dataset(cfg, signal, horizon=horizon, trial_indices=trial_indices,
                             master_seed=master_seed)
    if algorithm == "incremental":
        return _run_incremental(data, net, mu_scale)
    if algorithm == "noncooperative":
        return _run_noncooperative(data, net, mu_scale)
    raise ValueError("algorithm must be 'incremental' or 'noncooperative'")


def trial_average(curves: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        return curves.mean(axis=0)


# ----------------------------------------------------------------------
# steady-state extraction
# ----------------------------------------------------------------------

@dataclasses.dataclass(eq=False)
class SteadyState:
    """Steady-state summary of one trial-averaged learning curve."""

    per_node: np.ndarray
    per_node_db: np.ndarray
    network: float
    network_db: float
    convergence_cycle: int
    cycles_to_3db: int
    diverged: bool
    valid: bool


def detect_convergence(network_db: np.ndarray, window: int, span: int,
                       tol_db: float, start: int = 0) -> int:
    """First cycle whose moving average moved < tol_db over the last `span` cycles."""
    n = network_db.size
    if n < window + span:
        return None
    ma = np.convolve(network_db, np.ones(window) / window, mode="valid")
    offset = window - 1  # ma[c - offset] averages cycles [c-window+1 .. c]
    for c in range(max(start, offset) + span, n):
        a, b = ma[c - offset], ma[c - span - offset]
        if math.isfinite(a) and math.isfinite(b) and abs(a - b) < tol_db:
            return c
    return None


def steady_state_stats(avg_values: np.ndarray, cfg: ExperimentConfig,
                       initial_msd: float, warmup: int) -> SteadyState:
    """Extract per-node steady state from the final window plus health flags."""
    horizon = avg_values.shape[0]
    window = min(cfg.steady_window, horizon)
    with np.errstate(over="ignore", invalid="ignore"):
        per_node = avg_values[horizon - window:].mean(axis=0)
        network_curve = avg_values.mean(axis=1)
        network = float(per_node.mean())
    with np.errstate(divide="ignore", invalid="ignore"):
        per_node_db = 10.0 * np.log10(per_node)
        network_db = 10.0 * np.log10(network) if network > 0 else -np.inf
        curve_db = 10.0 * np.log10(network_curve)

    finite = bool(np.all(np.isfinite(network_curve)))
    diverged = (not finite) or bool(np.nanmax(network_curve) > 1e3 * initial_msd)
    convergence_cycle = detect_convergence(curve_db, window=cfg.steady_window,
                                           span=cfg.steady_span, tol_db=cfg.steady_tol_db,
                                           start=warmup)
    cycles_to_3db = None
    if finite and network > 0:
        hits = np.nonzero(curve_db <= network_db + 3.0)[0]
        cycles_to_3db = int(hits[0]) if hits.size else None
    valid = (not diverged) and convergence_cycle is not None \
        and horizon - window >= warmup
    return SteadyState(per_node, per_node_db, network, float(network_db),
                       convergence_cycle, cycles_to_3db, diverged, valid)


# ----------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------

@dataclasses.dataclass(eq=False)
class AlgorithmResult:
    algorithm: str
    curve: LearningCurve
    steady: SteadyState


@dataclasses.dataclass(eq=False)
class TheoryResult:
    prediction: MsdPrediction
    mu_max: np.ndarray
    mu_max_network: float
    complex_spectrum: bool
    pinv_fallback: bool


@dataclasses.dataclass(eq=False)
class ModelReport:
    signal: str
    incremental: AlgorithmResult
    noncooperative: AlgorithmResult = None
    theory: TheoryResult = None


@dataclasses.dataclass(eq=False)
class ExperimentReport:
    config: dict
    config_hash: str
    initial_msd: float
    models: list
    unstable: bool
    runtime: dict
    files: list


def node_moments(cfg: ExperimentConfig, signal: str, projection_order: int = None):
    """Per-node Monte Carlo moment sets at the configured draw count."""
    kind = SignalKind(signal)
    burn = max(cfg.moment_burn_in, cfg.signal_burn_in(signal))
    order = cfg.projection_order if projection_order is None else int(projection_order)
    sets = []
    for k in range(cfg.n_nodes):
        model = SignalModel(kind, seed=derive_seed(cfg.seed, MOMENT_STREAM, k))
        sets.append(estimate_moments(model, cfg.filter_length, order,
                                     cfg.regularization, cfg.moment_samples,
                                     burn_in=burn, node=k))
    return sets


def _theory_result(cfg: ExperimentConfig, net: NetworkConfig, signal: str) -> TheoryResult:
    moments = node_moments(cfg, signal)
    prediction = predict_msd(net, moments, kron_moment=cfg.kron_moment,
                             noise_variant=cfg.noise_variant)
    bounds = [stability_bound(m) for m in moments]
    mu_max = np.array([b.mu_max for b in bounds])
    return TheoryResult(
        prediction=prediction,
        mu_max=mu_max,
        mu_max_network=float(mu_max.min()),
        complex_spectrum=any(b.complex_spectrum for b in bounds),
        pinv_fallback=any(b.pinv_fallback for b in bounds),
    )


def run_experiment(cfg: ExperimentConfig, *, with_theory: bool = True,
                   write: bool = True, emit_figures: bool = True,
                   out_dir=None) -> ExperimentReport:
    """Simulate every configured signal model, join theory, write outputs.

    For the non-cooperative baseline the step size is multiplied by the node
    count so both schemes consume data at a comparable adaptation rate; both
    algorithms see identical realizations.
    """
    t0 = time.perf_counter()
    config_hash = cfg.hash()
    initial_msd = float(np.sum(np.abs(np.asarray(cfg.true_h)) ** 2)
                        + np.sum(np.abs(np.asarray(cfg.true_g)) ** 2))
    models = []
    for signal in cfg.signals:
        net = cfg.network(signal)
        data = build_dataset(cfg, signal)
        results = {}
        for algorithm, scale in (("incremental", 1.0), ("noncooperative", float(cfg.n_nodes))):
            curves = (_run_incremental if algorithm == "incremental" else _run_noncooperative)(
                data, net, scale)
            avg = trial_average(curves)
            curve = LearningCurve(avg, trials=cfg.trials, algorithm=algorithm,
                                  signal=signal, config_hash=config_hash)
            steady = steady_state_stats(avg, cfg, initial_msd, cfg.warmup)
            results[algorithm] = AlgorithmResult(algorithm, curve, steady)
        theory = _theory_result(cfg, net, signal) if with_theory else None
        models.append(ModelReport(signal=signal, incremental=results["incremental"],
                                  noncooperative=results["noncooperative"], theory=theory))

    unstable = any(
        m.incremental.steady.diverged or (m.theory is not None and not m.theory.prediction.stable)
        for m in models
    )
    report = ExperimentReport(
        config=cfg.echo(), config_hash=config_hash, initial_msd=initial_msd,
        models=models, unstable=unstable,
        runtime={"elapsed_seconds": round(time.perf_counter() - t0, 3),
                 "numpy": np.__version__},
        files=[],
    )
    if write:
        report.files = write_report(report, cfg, out_dir=out_dir, emit_figures=emit_figures)
    return report


# ----------------------------------------------------------------------
# projection-order sweep
# ----------------------------------------------------------------------

@dataclasses.dataclass(eq=False)
class SweepEntry:
    projection_order: int
    result: AlgorithmResult


@dataclasses.dataclass(eq=False)
class SweepReport:
    config: dict
    config_hash: str
    signal: str
    entries: list
    files: list


def sweep_t(cfg: ExperimentConfig, t_values=None, *, write: bool = True,
            emit_figures: bool = True, out_dir=None) -> SweepReport:
    """Re-run the incremental algorithm across projection orders.

    Uses the first configured signal model; input/noise realizations are
    shared across sweep points, so differences are due to T alone.
    """
    ts = tuple(int(t) for t in (cfg.sweep_projection_orders if t_values is None else t_values))
    signal = cfg.signals[0]
    config_hash = cfg.hash()
    initial_msd = float(np.sum(np.abs(np.asarray(cfg.true_h)) ** 2)
                        + np.sum(np.abs(np.asarray(cfg.true_g)) ** 2))
    entries = []
    if ts:
        data = build_dataset(cfg, signal)
        for t_value in ts:
            net = cfg.network(signal, projection_order=t_value)
            avg = trial_average(_run_incremental(data, net))
            curve = LearningCurve(avg, trials=cfg.trials, algorithm="incremental",
                                  signal=signal, config_hash=config_hash)
            steady = steady_state_stats(avg, cfg, initial_msd,
                                        cfg.filter_length + t_value)
            entries.append(SweepEntry(t_value, AlgorithmResult("incremental", curve, steady)))
    report = SweepReport(config=cfg.echo(), config_hash=config_hash, signal=signal,
                         entries=entries, files=[])
    if write:
        report.files = write_sweep(report, cfg, out_dir=out_dir, emit_figures=emit_figures)
    return report


# ----------------------------------------------------------------------
# stability probe
# ----------------------------------------------------------------------

@dataclasses.dataclass(eq=False)
class StabilityCheck:
    config_hash: str
    signal: str
    mu_max: np.ndarray
    mu_max_network: float
    runs: list   # one dict per probed step-size factor
    files: list


def check_stability(cfg: ExperimentConfig, *, factors=(0.9, 2.0), n_seeds: int = 5,
                    horizon: int = 500, write: bool = True, out_dir=None) -> StabilityCheck:
    """Evaluate the step-size bound and probe it with short simulations.

    Each factor scales the network-wide bound; n_seeds independent trials run
    for `horizon` cycles and each is labelled converged (final network MSD
    below the initial value) or diverged (MSD exceeded 1000x initial).
    """
    signal = cfg.signals[0]
    moments = node_moments(cfg, signal)
    bounds = [stability_bound(m) for m in moments]
    mu_max = np.array([b.mu_max for b in bounds])
    mu_net = float(mu_max.min())
    initial_msd = float(np.sum(np.abs(np.asarray(cfg.true_h)) ** 2)
                        + np.sum(np.abs(np.asarray(cfg.true_g)) ** 2))

    data = build_dataset(cfg, signal, horizon=horizon, trial_indices=range(n_seeds))
    runs = []
    for factor in factors:
        mu = factor * mu_net
        curves = simulate(cfg, signal, horizon=horizon, trial_indices=range(n_seeds),
                          step_sizes=mu, data=data)
        with np.errstate(over="ignore", invalid="ignore"):
            network = curves.mean(axis=2)  # (seeds, horizon)
        finite = np.all(np.isfinite(network), axis=1)
        with np.errstate(invalid="ignore"):
            peak = np.where(finite, np.nanmax(network, axis=1), np.inf)
            final = np.where(finite, network[:, -1], np.inf)
        diverged = (~finite) | (peak > 1e3 * initial_msd)
        converged = finite & (final < initial_msd)
        runs.append({
            "factor": float(factor),
            "step_size": float(mu),
            "seeds": int(n_seeds),
            "final_msd": [None if not math.isfinite(f) else float(f) for f in final],
            "converged": [bool(c) for c in converged],
            "diverged": [bool(dv) for dv in diverged],
            "all_converged": bool(np.all(converged)),
            "any_diverged": bool(np.any(diverged)),
        })
    report = StabilityCheck(config_hash=cfg.hash(), signal=signal, mu_max=mu_max,
                            mu_max_network=mu_net, runs=runs, files=[])
    if write:
        report.files = write_stability(report, cfg, out_dir=out_dir)
    return report


# ----------------------------------------------------------------------
# output files
# ----------------------------------------------------------------------

def _jsonify(value):
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(_jsonify(payload), indent=2, sort_keys=True) + "\n")


def write_curves_csv(path: Path, curve: LearningCurve):
    """Long-format curve file: (cycle, node, msd_linear, msd_db) per row."""
    horizon, n_nodes = curve.values.shape
    with np.errstate(divide="ignore", invalid="ignore"):
        db = 10.0 * np.log10(curve.values)
    lines = [
        f"# config_hash={curve.config_hash} algorithm={curve.algorithm} "
        f"signal={curve.signal} trials={curve.trials}",
        "cycle,node,msd_linear,msd_db",
    ]
    for i in range(horizon):
        for k in range(n_nodes):
            lines.append(f"{i},{k},{curve.values[i, k]:.12e},{db[i, k]:.12e}")
    path.write_text("\n".join(lines) + "\n")
    return path


def _steady_payload(result: AlgorithmResult) -> dict:
    s = result.steady
    return {
        "algorithm": result.algorithm,
        "per_node_msd": list(s.per_node),
        "per_node_msd_db": list(s.per_node_db),
        "network_msd": s.network,
        "network_msd_db": s.network_db,
        "convergence_cycle": s.convergence_cycle,
        "cycles_to_3db": s.cycles_to_3db,
        "diverged": s.diverged,
        "valid": s.valid,
    }


def _theory_payload(theory: TheoryResult) -> dict:
    p = theory.prediction
    payload = {
        "stable": p.stable,
        "spectral_radius": float(np.max(p.spectral_radii)),
        "spectral_radii": list(p.spectral_radii),
        "mu_max": list(theory.mu_max),
        "mu_max_network": theory.mu_max_network,
        "complex_spectrum": theory.complex_spectrum,
        "pinv_fallback": theory.pinv_fallback,
    }
    if p.stable:
        payload["per_node_msd"] = list(p.per_node)
        payload["per_node_msd_db"] = list(p.per_node_db)
        payload["network_msd"] = p.network_avg
        payload["network_msd_db"] = p.network_avg_db
    return payload


def write_report(report: ExperimentReport, cfg: ExperimentConfig, *,
                 out_dir=None, emit_figures: bool = True) -> list:
    out = Path(cfg.output_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    summary = {"config": report.config, "config_hash": report.config_hash,
               "initial_msd": report.initial_msd, "unstable": report.unstable,
               "runtime": report.runtime, "models": {}}
    for m in report.models:
        entry = {"incremental": _steady_payload(m.incremental)}
        if m.noncooperative is not None:
            entry["noncooperative"] = _steady_payload(m.noncooperative)
        if m.theory is not None:
            entry["theory"] = _theory_payload(m.theory)
            theory_path = out / f"theory_{m.signal}.json"
            _write_json(theory_path, {"signal": m.signal,
                                      "config_hash": report.config_hash,
                                      **entry["theory"]})
            files.append(theory_path)
        summary["models"][m.signal] = entry
        for result in (m.incremental, m.noncooperative):
            if result is None:
                continue
            if cfg.output_format == "csv":
                path = out / f"curves_{result.algorithm}_{m.signal}.csv"
                files.append(write_curves_csv(path, result.curve))
            else:
                path = out / f"curves_{result.algorithm}_{m.signal}.json"
                _write_json(path, {
                    "config_hash": report.config_hash,
                    "algorithm": result.algorithm, "signal": m.signal,
                    "trials": result.curve.trials,
                    "msd_linear": result.curve.values,
                })
                files.append(path)
    report_path = out / "report.json"
    _write_json(report_path, summary)
    files.append(report_path)
    if emit_figures:
        from . import plots
        files.extend(plots.emit_plots(report, out))
    return [str(f) for f in files]


def write_sweep(report: SweepReport, cfg: ExperimentConfig, *, out_dir=None,
                emit_figures: bool = True) -> list:
    out = Path(cfg.output_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    if report.entries:
        lines = [
            f"# config_hash={report.config_hash} signal={report.signal} sweep=projection_order",
            "projection_order,node,msd_linear,msd_db",
        ]
        for entry in report.entries:
            s = entry.result.steady
            for k in range(s.per_node.size):
                lines.append(f"{entry.projection_order},{k},"
                             f"{s.per_node[k]:.12e},{s.per_node_db[k]:.12e}")
        table = out / "sweep_msd.csv"
        table.write_text("\n".join(lines) + "\n")
        files.append(table)
    summary = {
        "config_hash": report.config_hash,
        "signal": report.signal,
        "entries": [{
            "projection_order": e.projection_order,
            **_steady_payload(e.result),
        } for e in report.entries],
    }
    path = out / "sweep.json"
    _write_json(path, summary)
    files.append(path)
    if emit_figures and report.entries:
        from . import plots
        files.extend(plots.emit_sweep_plot(report, out))
    return [str(f) for f in files]


def write_stability(report: StabilityCheck, cfg: ExperimentConfig, *, out_dir=None) -> list:
    out = Path(cfg.output_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "stability.json"
    _write_json(path, {
        "config_hash": report.config_hash,
        "signal": report.signal,
        "mu_max": list(report.mu_max),
        "mu_max_network": report.mu_max_network,
        "runs": report.runs,
    })
    return [str(path)]
