"""Figure rendering for benchmark reports.

Each renderer takes the experiment's records (or summary) and writes PNG
files next to the delimited output; the CSV stays the primary artifact and
these are the human-readable view of the same numbers.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import fit_loglog_slope

_ENGINE_STYLE = {
    "cf": {"color": "tab:blue", "marker": "o", "label": "canonical form"},
    "su": {"color": "tab:red", "marker": "s", "label": "simple update"},
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def render_shallow(summary: dict, out_base) -> list[str]:
    """Runtime-scaling figure (log-log with regression lines) and the
    CF/SU fidelity figure for the shallow experiment.
    """
    written = []
    sizes = np.asarray(summary["sizes"], dtype=float)

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for engine, style in _ENGINE_STYLE.items():
        runtimes = summary["engines"][engine]["runtime_s"]
        means = np.array([runtimes[n]["mean"] for n in summary["sizes"]])
        ses = np.array([runtimes[n]["se"] or 0.0 for n in summary["sizes"]])
        ax.errorbar(sizes, means, yerr=ses, linestyle="none", **style)
        fit = summary["engines"][engine].get("slope")
        if fit is None and len(sizes) >= 3:
            slope, intercept, _ = fit_loglog_slope(list(zip(sizes, means)))
        elif fit is not None:
            slope, intercept = fit["slope"], fit["intercept"]
        else:
            continue
        ax.plot(
            sizes,
            np.exp(intercept) * sizes**slope,
            linestyle=":",
            color=style["color"],
            label=f"slope {slope:.2f}",
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("number of qubits")
    ax.set_ylabel("tensor-update runtime (s)")
    ax.legend(fontsize=8)
    written.append(_save(fig, f"{out_base}_runtime.png"))

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    means = np.array([summary["f_cf"][n]["mean"] for n in summary["sizes"]])
    ses = np.array([summary["f_cf"][n]["se"] or 0.0 for n in summary["sizes"]])
    ax.errorbar(sizes, means, yerr=ses, marker="o", color="tab:green")
    ax.set_xscale("log")
    ax.set_xlabel("number of qubits")
    ax.set_ylabel("CF/SU state fidelity")
    written.append(_save(fig, f"{out_base}_fidelity.png"))
    return written


def render_qv(summary: dict, out_base) -> list[str]:
    """CF/SU fidelity vs depth, and both engines' state-vector fidelities."""
    written = []
    depths = summary["depths"]

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    means = [summary["f_cf"][d]["mean"] for d in depths]
    ses = [summary["f_cf"][d]["se"] or 0.0 for d in depths]
    ax.errorbar(depths, means, yerr=ses, marker="o", color="tab:green")
    ax.set_xlabel("depth (two-qubit layers)")
    ax.set_ylabel("CF/SU state fidelity")
    written.append(_save(fig, f"{out_base}_fcf.png"))

    if summary["f_sv"]["cf"]:
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        for engine, style in _ENGINE_STYLE.items():
            stats = summary["f_sv"][engine]
            means = [stats[d]["mean"] for d in depths if d in stats]
            ses = [stats[d]["se"] or 0.0 for d in depths if d in stats]
            ax.errorbar([d for d in depths if d in stats], means, yerr=ses, **style)
        ax.set_xlabel("depth (two-qubit layers)")
        ax.set_ylabel("state-vector fidelity")
        ax.legend(fontsize=8)
        written.append(_save(fig, f"{out_base}_fsv.png"))
    return written


def render_qasm(summary: dict, out_base) -> list[str]:
    """Grouped per-circuit state-vector fidelities for CF and SU."""
    rows = summary["circuits"]
    names = [k for k, v in rows.items() if v.get("cf", {}).get("f_sv") is not None]
    if not names:
        return []
    x = np.arange(len(names), dtype=float)
    fig, ax = plt.subplots(figsize=(max(5.0, 0.5 * len(names) + 2), 3.6))
    for shift, (engine, style) in zip((-0.17, 0.17), _ENGINE_STYLE.items()):
        vals = [rows[name][engine]["f_sv"] for name in names]
        ax.bar(x + shift, vals, width=0.34, color=style["color"], label=style["label"])
    for i, name in enumerate(names):
        if rows[name]["excluded"]:
            ax.annotate("excl.", (x[i], 0.02), ha="center", fontsize=7, rotation=90)
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("state-vector fidelity")
    ax.legend(fontsize=8)
    written = [_save(fig, f"{out_base}_fsv.png")]
    return written


def render(experiment: str, summary: dict, out_base) -> list[str]:
    if experiment == "shallow":
        return render_shallow(summary, out_base)
    if experiment in ("quantum_volume", "qv"):
        return render_qv(summary, out_base)
    if experiment == "qasm":
        return render_qasm(summary, out_base)
    raise ValueError(f"unknown experiment {experiment!r}")
