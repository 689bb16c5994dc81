"""File-based matplotlib rendering for the CLI report paths."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .labels import OUTLIER

_DPI = 120


def save_ivat_png(matrix: np.ndarray, path, title: str = "iVAT") -> Path:
    """Grayscale block image of a reordered dissimilarity matrix."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 5))
    im = ax.imshow(matrix, cmap="gray", interpolation="nearest")
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
    fig.colorbar(im, ax=ax, fraction=0.046)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_embedding_scatter(coords: np.ndarray, path, labels=None, title: str = "embedding") -> Path:
    """2-D scatter of the first two embedding axes, colored by labels when
    given; outliers render as gray crosses."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 5))
    xy = coords[:, :2] if coords.shape[1] >= 2 else np.column_stack([coords[:, 0], np.zeros(len(coords))])
    if labels is None:
        ax.scatter(xy[:, 0], xy[:, 1], s=12, c="tab:blue", alpha=0.8)
    else:
        labels = np.asarray(labels)
        noise = labels == OUTLIER
        if noise.any():
            ax.scatter(xy[noise, 0], xy[noise, 1], s=18, c="0.6", marker="x", label="outlier")
        for lab in np.unique(labels[~noise]):
            sel = labels == lab
            ax.scatter(xy[sel, 0], xy[sel, 1], s=12, alpha=0.85, label=f"cluster {lab}")
        if len(np.unique(labels)) <= 12:
            ax.legend(fontsize=8, loc="best")
    ax.set_title(title)
    ax.set_xlabel("dim 0")
    ax.set_ylabel("dim 1")
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_hopkins_png(values: dict, path, title: str = "Hopkins statistic") -> Path:
    """Bar chart of per-method Hopkins means with the 0.5 uniform reference."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    names = list(values)
    ax.bar(names, [values[n] for n in names], color="tab:blue", width=0.6)
    ax.axhline(0.5, color="0.4", linestyle="--", linewidth=1, label="uniform reference")
    ax.set_ylim(0, 1)
    ax.set_ylabel("H")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_bench_png(rows: list, path, title: str = "benchmark") -> Path:
    """Per-algorithm bars for the three validity indices (sentinels skipped)."""
    path = Path(path)
    ok = [r for r in rows if r.get("status") == "ok"]
    fig, axes = plt.subplots(1, 3, figsize=(13, 4))
    panels = (("CH", "Calinski-Harabasz"), ("sil_gower", "Silhouette (Gower)"), ("DB", "Davies-Bouldin"))
    for ax, (key, label) in zip(axes, panels):
        names = [r["algorithm"] for r in ok if float(r[key]) != -1.0]
        vals = [float(r[key]) for r in ok if float(r[key]) != -1.0]
        ax.bar(names, vals, color="tab:blue", width=0.6)
        ax.set_title(label, fontsize=10)
        ax.tick_params(axis="x", rotation=45, labelsize=8)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path
