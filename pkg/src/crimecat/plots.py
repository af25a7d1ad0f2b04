"""Report figures rendered to files next to the delimited output."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .evaluator import ComparisonRow, EvaluationReport


def save_confusion_matrix(report: EvaluationReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cm = np.asarray(report.confusion_matrix)
    n = len(report.label_order)
    fig, ax = plt.subplots(figsize=(max(5, 0.6 * n + 2),) * 2)
    im = ax.imshow(cm, cmap="Blues")
    ax.set_xticks(range(n), report.label_order, rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(n), report.label_order, fontsize=8)
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    ax.set_title(f"{report.model_name} confusion matrix")
    threshold = cm.max() / 2 if cm.max() else 0.5
    for i in range(n):
        for j in range(n):
            ax.text(j, i, str(cm[i, j]), ha="center", va="center",
                    color="white" if cm[i, j] > threshold else "black", fontsize=7)
    fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_comparison_chart(rows: Sequence[ComparisonRow], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metrics = ("accuracy", "precision", "recall", "f1")
    x = np.arange(len(rows))
    width = 0.2
    fig, ax = plt.subplots(figsize=(max(6, 1.5 * len(rows) + 2), 4))
    for k, metric in enumerate(metrics):
        values = [getattr(r, metric) for r in rows]
        ax.bar(x + (k - 1.5) * width, values, width, label=metric)
    ax.set_xticks(x, [r.model_name for r in rows], rotation=20, ha="right")
    ax.set_ylim(0, 1.0)
    ax.set_ylabel("score")
    ax.set_title("model comparison")
    ax.legend(ncol=4, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_training_history(history: Sequence[dict], path: str | Path, title: str = "training") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    epochs = [h["epoch"] for h in history]
    fig, ax1 = plt.subplots(figsize=(6, 4))
    ax1.plot(epochs, [h["train_loss"] for h in history], "o-", color="tab:red", label="train loss")
    ax1.set_xlabel("epoch")
    ax1.set_ylabel("loss", color="tab:red")
    ax2 = ax1.twinx()
    ax2.plot(epochs, [h["val_metric"] for h in history], "s-", color="tab:blue", label="val metric")
    ax2.set_ylabel("validation metric", color="tab:blue")
    ax1.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
