"""Figure rendering for report paths: everything lands in a file, never a window."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .cost_model import MccMatrix, format_money
from .dataset_eda import PixelHistogram
from .evaluation import ConfusionMatrix

__all__ = [
    "save_mcc_heatmap",
    "save_confusion_heatmap",
    "save_class_balance_bar",
    "save_pixel_histograms",
]


def _annotated_heatmap(ax, values, labels, fmt):
    im = ax.imshow(values, cmap="YlOrRd")
    ax.set_xticks(range(len(labels)), labels)
    ax.set_yticks(range(len(labels)), labels)
    ax.set_xlabel("Predicted")
    ax.set_ylabel("Actual")
    threshold = values.max() / 2 if values.max() > 0 else 1
    for i in range(len(labels)):
        for j in range(len(labels)):
            color = "white" if values[i, j] > threshold else "black"
            ax.text(j, i, fmt(values[i, j]), ha="center", va="center", color=color)
    return im


def save_mcc_heatmap(mcc: MccMatrix, path: str | Path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 4))
    _annotated_heatmap(ax, mcc.values, mcc.labels, lambda v: f"${format_money(v, 1)}")
    ax.set_title("Misclassification cost per item")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_confusion_heatmap(cm: ConfusionMatrix, path: str | Path, title: str = "") -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 4))
    _annotated_heatmap(ax, cm.counts, cm.labels, lambda v: str(int(v)))
    ax.set_title(title or "Confusion matrix")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_class_balance_bar(counts: dict[str, int], path: str | Path, title: str = "") -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 4))
    labels = list(counts)
    ax.bar(labels, [counts[c] for c in labels], color="steelblue")
    ax.set_ylabel("Images")
    ax.set_title(title or "Images per class")
    for i, c in enumerate(labels):
        ax.text(i, counts[c], str(counts[c]), ha="center", va="bottom")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_pixel_histograms(
    histograms: Sequence[PixelHistogram], out_dir: str | Path
) -> list[Path]:
    """One bar chart per class: hist_<class>.png under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for hist in histograms:
        path = out_dir / f"hist_{hist.label}.png"
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.bar(np.arange(256), hist.bins, width=1.0, color="dimgray")
        ax.set_xlim(-1, 256)
        ax.set_xlabel("Pixel value (0 dark, 255 light)")
        ax.set_ylabel("Frequency")
        ax.set_title(f"Pixel value distribution: {hist.label}")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
