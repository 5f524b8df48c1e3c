"""Report figures rendered to files next to the delimited outputs.

Everything goes through the Agg backend with fixed metadata so repeated
runs produce byte-identical images.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .cascade import StageLogEntry
from .replay import SEGMENTS, RevenueReport

_SAVE_KWARGS = {"dpi": 120, "metadata": {"Software": "floorboost"}}


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def save_roc_figure(path, curves: Sequence[tuple[str, np.ndarray, np.ndarray, float]], title: str) -> None:
    """Overlayed ROC curves; each entry is (label, fpr, tpr, auc)."""
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    for label, fpr, tpr, auc in curves:
        ax.plot(fpr, tpr, label=f"{label} (AUC {auc:.3f})")
    ax.plot([0, 1], [0, 1], linestyle="--", color="grey", linewidth=0.8)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(title)
    ax.legend(loc="lower right")
    _save(fig, path)


def save_cascade_stages_figure(path, stage_log: Sequence[StageLogEntry]) -> None:
    """Per-stage conditional rates and the cumulative products."""
    stages = [e.stage for e in stage_log]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    ax1.plot(stages, [e.detection_rate for e in stage_log], marker="o", label="stage tpr")
    ax1.plot(stages, [e.false_positive_rate for e in stage_log], marker="s", label="stage fpr")
    ax1.set_xlabel("stage")
    ax1.set_ylabel("conditional rate")
    ax1.set_title("per-stage rates")
    ax1.legend()
    ax2.plot(stages, [e.cumulative_detection for e in stage_log], marker="o", label="overall D")
    ax2.plot(stages, [e.cumulative_fpr for e in stage_log], marker="s", label="overall F")
    ax2.set_yscale("log")
    ax2.set_xlabel("stage")
    ax2.set_ylabel("cumulative rate (log)")
    ax2.set_title("cascade filtering")
    ax2.legend()
    _save(fig, path)


def save_segment_revenue_figure(path, base: RevenueReport, new: RevenueReport) -> None:
    """Baseline vs policy revenue per segment."""
    x = np.arange(len(SEGMENTS))
    width = 0.38
    base_vals = [base.segments[s].revenue.to_float() for s in SEGMENTS]
    new_vals = [new.segments[s].revenue.to_float() for s in SEGMENTS]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.bar(x - width / 2, base_vals, width, label="baseline")
    ax.bar(x + width / 2, new_vals, width, label="policy")
    ax.set_xticks(x)
    ax.set_xticklabels([s.replace("_", "\n") for s in SEGMENTS])
    ax.set_ylabel("revenue ($)")
    ax.set_title("revenue by segment")
    ax.legend()
    _save(fig, path)


def save_sweep_heatmap(path, hv_values, gap_values, lift_grid: np.ndarray) -> None:
    """Lift over the (high-value cutoff x gap cutoff) grid; NaN = skipped."""
    fig, ax = plt.subplots(figsize=(5.6, 4.4))
    masked = np.ma.masked_invalid(np.asarray(lift_grid, dtype=float))
    im = ax.imshow(masked, origin="lower", aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(gap_values)))
    ax.set_xticklabels([str(v) for v in gap_values])
    ax.set_yticks(range(len(hv_values)))
    ax.set_yticklabels([str(v) for v in hv_values])
    ax.set_xlabel("gap cutoff ($)")
    ax.set_ylabel("high-value cutoff ($)")
    ax.set_title("replay lift over cutoff grid")
    for i in range(len(hv_values)):
        for j in range(len(gap_values)):
            v = lift_grid[i][j]
            label = "skip" if v is None or np.isnan(v) else f"{v * 100:.2f}%"
            ax.text(j, i, label, ha="center", va="center", fontsize=8, color="white")
    fig.colorbar(im, ax=ax, label="relative lift")
    _save(fig, path)


def save_feature_importance_figure(path, names: Sequence[str], masses: Sequence[float],
                                   title: str, top: int = 20) -> None:
    """Horizontal bars of total |alpha| mass per feature."""
    pairs = sorted(zip(masses, names), reverse=True)[:top]
    masses_sorted = [m for m, _ in pairs][::-1]
    names_sorted = [n for _, n in pairs][::-1]
    fig, ax = plt.subplots(figsize=(6.4, 0.32 * len(pairs) + 1.2))
    ax.barh(range(len(pairs)), masses_sorted)
    ax.set_yticks(range(len(pairs)))
    ax.set_yticklabels(names_sorted, fontsize=8)
    ax.set_xlabel("total |alpha|")
    ax.set_title(title)
    _save(fig, path)
