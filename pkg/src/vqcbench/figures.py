"""Render the benchmark figures to files next to the delimited output.

Per-class grouped bars are produced for the model groupings used in the
write-ups (discriminative models, SVM family, same-circuit readouts)
whenever those models were all run, with a catch-all chart otherwise.
The sweep figure is accuracy versus qubit count with CI error bars.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .pipeline import EvalReport, SweepResult  # noqa: E402

MODEL_GROUPS = (
    ("per_class_discriminative", ("logreg", "nn", "vqc")),
    ("per_class_svms", ("svm-linear", "svm-qk", "svm-rbf")),
    ("per_class_readout", ("vqc", "svm-qk")),
)


def _per_class_bars(report: EvalReport, models, path) -> None:
    classes = sorted({cls for m in models for cls in report.per_class.get(m, {})})
    if not classes:
        return
    width = 0.8 / len(models)
    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(classes)), 3.6))
    for k, model in enumerate(models):
        stats = report.per_class.get(model, {})
        xs, means, halves = [], [], []
        for i, cls in enumerate(classes):
            if cls in stats:
                xs.append(i + (k - (len(models) - 1) / 2) * width)
                means.append(100.0 * stats[cls][0])
                halves.append(100.0 * stats[cls][1])
        ax.bar(xs, means, width=width, yerr=halves, capsize=2, label=model)
    ax.set_xticks(range(len(classes)))
    ax.set_xticklabels(classes, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("test accuracy (%)")
    lo = min(v[0] for m in models for v in report.per_class.get(m, {}).values())
    ax.set_ylim(max(0.0, 100.0 * lo - 5.0), 101.0)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_benchmark_figures(report: EvalReport, outdir) -> list[str]:
    """Write the per-class figures; returns the file paths created."""
    present = [m for m in report.per_class if report.per_class[m]]
    written = []
    matched = False
    for name, group in MODEL_GROUPS:
        if all(m in present for m in group):
            path = os.path.join(outdir, f"fig_{name}.png")
            _per_class_bars(report, group, path)
            written.append(path)
            matched = True
    if not matched and present:
        path = os.path.join(outdir, "fig_per_class_all.png")
        _per_class_bars(report, present, path)
        written.append(path)
    return written


def render_sweep_figure(sweep: SweepResult, outdir) -> str:
    path = os.path.join(outdir, "fig_sweep.png")
    qs = [p.n_qubits for p in sweep.points]
    means = [100.0 * p.mean_accuracy for p in sweep.points]
    halves = [100.0 * p.ci_half for p in sweep.points]
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.errorbar(qs, means, yerr=halves, marker="o", capsize=3)
    ax.set_xlabel("number of qubits")
    ax.set_ylabel("mean test accuracy (%)")
    ax.set_xticks(qs)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
