"""Matplotlib renderings of report grids and correlation tables.

Uses the Agg backend, so figures render to files without a display.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from .correlation import CorrelationResult
from .evaluation import EvaluationReport

BETTER_COLOR = "#c8e6c9"
WORSE_COLOR = "#ffcdd2"
NEUTRAL_COLOR = "#ffffff"


def report_figure(report: EvaluationReport, path: str) -> None:
    """Render the report as a colored grid (green better, red worse)."""
    n_rows = len(report.systems)
    n_cols = len(report.metrics)
    fig, ax = plt.subplots(
        figsize=(2.0 + 1.5 * n_cols, 1.0 + 0.55 * n_rows)
    )
    ax.set_xlim(0, n_cols)
    ax.set_ylim(0, n_rows)
    ax.invert_yaxis()
    ax.set_xticks([c + 0.5 for c in range(n_cols)])
    ax.set_xticklabels(report.metrics, rotation=30, ha="right", fontsize=8)
    ax.set_yticks([r + 0.5 for r in range(n_rows)])
    ax.set_yticklabels(report.systems, fontsize=8)
    ax.xaxis.tick_top()
    ax.tick_params(length=0)
    for spine in ax.spines.values():
        spine.set_visible(False)
    for i, system in enumerate(report.systems):
        for j in range(n_cols):
            delta = report.deltas[i][j]
            if system == report.baseline_id or delta == 0:
                color = NEUTRAL_COLOR
            elif delta > 0:
                color = BETTER_COLOR
            else:
                color = WORSE_COLOR
            ax.add_patch(
                Rectangle((j, i), 1, 1, facecolor=color, edgecolor="#bbbbbb")
            )
            label = f"{report.means[i][j]:.2f}{report.stars[i][j]}"
            ax.text(j + 0.5, i + 0.5, label, ha="center", va="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def correlation_figure(results: Sequence[CorrelationResult], path: str) -> None:
    """Render correlation values as horizontal bars, one per result row."""
    labels = [
        r.metric_label + (f" [{r.language_pair}]" if r.language_pair else "")
        for r in results
    ]
    positions = range(len(results))
    fig, ax = plt.subplots(figsize=(7.0, 0.8 + 0.4 * max(1, len(results))))
    ax.barh(positions, [r.value for r in results], color="#4878a8")
    ax.set_yticks(list(positions))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("correlation with human preference")
    ax.axvline(0.0, color="#444444", linewidth=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
