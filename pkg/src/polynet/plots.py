"""Optional matplotlib rendering for benchmark reports.

Imported lazily by the CLI so the core library has no hard matplotlib
dependency at import time.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["render_report_figures"]


def _save(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _plot_convergence(report: dict, out_dir: str) -> list:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for curve in report["curves"]:
        steps = range(len(curve["rse_train"]))
        ax1.plot(list(steps), curve["rse_train"], label=f"chi={curve['chi']}")
        ax2.plot(list(range(len(curve["e_B"]))), curve["e_B"],
                 label=f"chi={curve['chi']}")
    ax1.set_xlabel("step")
    ax1.set_ylabel("training RSE")
    ax1.set_yscale("log")
    ax1.legend()
    ax2.set_xlabel("step")
    ax2.set_ylabel("validation MSE")
    ax2.set_yscale("log")
    ax2.legend()
    fig.suptitle("Projection rule learning curves")
    return [_save(fig, os.path.join(out_dir, "convergence.png"))]

def _plot_robustness(report: dict, out_dir: str) -> list:
    fig, ax = plt.subplots(figsize=(7, 4))
    rows = report["rows"]
    noises = sorted({r["noise"] for r in rows})
    width = 0.35
    for k, fitter in enumerate(("projection", "ls")):
        sub = {r["noise"]: r for r in rows if r["fitter"] == fitter}
        xs = [i + (k - 0.5) * width for i in range(len(noises))]
        ax.bar(xs, [sub[n]["mean"] for n in noises], width,
               yerr=[sub[n]["half_width"] for n in noises],
               capsize=4, label=fitter)
    ax.set_xticks(range(len(noises)))
    ax.set_xticklabels(noises)
    ax.set_ylabel("validation MSE")
    ax.set_title("Fitter robustness across noise families")
    ax.legend()
    return [_save(fig, os.path.join(out_dir, "robustness.png"))]


def _plot_recovery(report: dict, out_dir: str) -> list:
    fig, ax = plt.subplots(figsize=(6, 4))
    values = report["values"]
    ax.plot(range(len(values)), values, "o-")
    ax.axhline(report["mean"], linestyle="--", color="gray",
               label=f"mean = {report['mean']:.3f}")
    ax.set_xlabel("run")
    ax.set_ylabel(report["metric"])
    ax.set_ylim(0.0, 1.02)
    ax.set_title("Planted-network recovery accuracy")
    ax.legend()
    return [_save(fig, os.path.join(out_dir, "recovery.png"))]


_RENDERERS = {
    "convergence": _plot_convergence,
    "robustness": _plot_robustness,
    "recovery": _plot_recovery,
}


def render_report_figures(report: dict, out_dir: str) -> list:
    """Render the figures for a benchmark report; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    renderer = _RENDERERS.get(report.get("suite"))
    if renderer is None:
        raise ValueError(f"no figures defined for suite {report.get('suite')!r}")
    return renderer(report, out_dir)
