"""Static accuracy-vs-condition plots for evaluation reports.

SVG output is made reproducible by pinning the hash salt and stripping
date metadata, so plotting does not break byte-identical reruns.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .protocols import EvaluationReport  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "gazetime"


def condition_accuracy_plot(reports_by_tw: dict[float, dict[object, EvaluationReport]],
                            path, xlabel: str) -> None:
    """Accuracy per condition value, one line per window size, plus the
    majority-class baseline of each subset."""
    fig, ax = plt.subplots(figsize=(7.0, 3.5))
    baseline_drawn = False
    for t_w in sorted(reports_by_tw):
        reports = reports_by_tw[t_w]
        values = sorted(reports)
        means = [reports[v].accuracy_mean for v in values]
        stds = [reports[v].accuracy_std for v in values]
        ax.errorbar(values, means, yerr=stds, marker="o", capsize=3,
                    label=f"accuracy ({t_w:g} s)")
        if not baseline_drawn:
            shares = [reports[v].majority_class_share for v in values]
            ax.plot(values, shares, "r--", marker="s",
                    label="majority class")
            baseline_drawn = True
    ax.set_xlabel(xlabel)
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.0)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
