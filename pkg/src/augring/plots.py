"""Static figure rendering for experiment reports (SVG, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "augring"
plt.rcParams["figure.figsize"] = (6.4, 4.0)

_COLORS = {"incremental": "tab:blue", "noncooperative": "tab:red"}


def emit_plots(report, out_dir) -> list:
    """Learning-curve figure per signal model, plus theory-vs-sim bars."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for m in report.models:
        fig, ax = plt.subplots()
        for result in (m.incremental, m.noncooperative):
            if result is None:
                continue
            ax.plot(result.curve.network_db(), label=result.algorithm,
                    color=_COLORS.get(result.algorithm), linewidth=1.2)
        if m.theory is not None and m.theory.prediction.stable:
            ax.axhline(m.theory.prediction.network_avg_db, color="k",
                       linestyle="--", linewidth=1.0, label="steady-state prediction")
        ax.set_xlabel("cycle")
        ax.set_ylabel("network MSD (dB)")
        ax.set_title(f"learning curves: {m.signal}")
        ax.grid(alpha=0.3)
        ax.legend()
        path = out / f"learning_curves_{m.signal}.svg"
        fig.savefig(path)
        plt.close(fig)
        paths.append(str(path))

        if m.theory is not None and m.theory.prediction.stable:
            paths.append(str(_theory_bars(m, out)))
    return paths


def _theory_bars(model_report, out: Path) -> Path:
    steady = model_report.incremental.steady
    pred = model_report.theory.prediction
    nodes = range(steady.per_node_db.size)
    fig, ax = plt.subplots()
    width = 0.38
    ax.bar([k - width / 2 for k in nodes], steady.per_node_db, width, label="simulation")
    ax.bar([k + width / 2 for k in nodes], pred.per_node_db, width, label="prediction")
    ax.set_xlabel("node")
    ax.set_ylabel("steady-state MSD (dB)")
    ax.set_title(f"steady state by node: {model_report.signal}")
    ax.set_xticks(list(nodes))
    ax.grid(alpha=0.3, axis="y")
    ax.legend()
    path = out / f"theory_vs_sim_{model_report.signal}.svg"
    fig.savefig(path)
    plt.close(fig)
    return path


def emit_sweep_plot(report, out_dir) -> list:
    """Per-node steady-state MSD lines, one per projection order."""
    if not report.entries:
        return []
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots()
    for entry in report.entries:
        s = entry.result.steady
        ax.plot(range(s.per_node_db.size), s.per_node_db, marker="o",
                label=f"T={entry.projection_order}")
    ax.set_xlabel("node")
    ax.set_ylabel("steady-state MSD (dB)")
    ax.set_title(f"projection-order sweep: {report.signal}")
    ax.grid(alpha=0.3)
    ax.legend()
    path = out / "sweep_msd.svg"
    fig.savefig(path)
    plt.close(fig)
    return [str(path)]
