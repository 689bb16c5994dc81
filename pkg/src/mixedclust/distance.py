"""Mixed-type pairwise dissimilarities and dense distance matrices.

Two families are provided: the Huang distance (squared Euclidean over numeric
columns plus gamma times the categorical mismatch count) and Gower
dissimilarity (range-normalized numeric similarity averaged with categorical
matches under missing-aware weights). Both are exposed per-pair and as full
matrix builders. Huang is not a metric (the squared term breaks the triangle
inequality); nothing here assumes metricity.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import MixedDataset


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric zero-diagonal dissimilarity matrix with metric provenance."""

    values: np.ndarray
    metric_tag: str

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("distance matrix must be square")
        if not np.array_equal(v, v.T):
            raise ValueError("distance matrix must be exactly symmetric")
        if np.diagonal(v).any():
            raise ValueError("distance matrix must have a zero diagonal")
        if (v < 0).any():
            raise ValueError("distances must be non-negative")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def save_csv(self, path) -> None:
        # headerless n x n rows, as consumed by iVAT image tooling
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            for row in self.values:
                writer.writerow([repr(float(x)) for x in row])

    @classmethod
    def load_csv(cls, path, metric_tag="loaded") -> "DistanceMatrix":
        rows = []
        with Path(path).open(newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                rows.append([float(x) for x in row])
        return cls(values=np.array(rows), metric_tag=metric_tag)


def default_gamma(d: MixedDataset) -> float:
    """Half the mean per-column population sigma of the numeric block.

    Falls back to 1.0 with a warning for pure-categorical data.
    """
    if d.n_numeric == 0:
        warnings.warn("no numeric columns; default gamma falls back to 1.0")
        return 1.0
    sigmas = []
    mask = d.numeric_mask
    for j in range(d.n_numeric):
        vals = d.numeric_values[~mask[:, j], j]
        sigmas.append(vals.std())
    return 0.5 * float(np.mean(sigmas))


def _require_complete(d: MixedDataset, i: int, j: int) -> None:
    if d.missing_mask[i].any() or d.missing_mask[j].any():
        raise ValueError(f"Huang distance undefined with missing values (rows {i}, {j})")


def huang_distance(d: MixedDataset, i: int, j: int, gamma: float | None = None) -> float:
    """Squared Euclidean over numerics plus gamma times categorical mismatches."""
    _require_complete(d, i, j)
    if gamma is None:
        gamma = default_gamma(d)
    diff = d.numeric_values[i] - d.numeric_values[j]
    d_num = float(diff @ diff)
    d_cat = int((d.categorical_values[i] != d.categorical_values[j]).sum())
    return d_num + gamma * d_cat


def _gower_ranges(d: MixedDataset) -> np.ndarray:
    """Per numeric column range over non-missing values, fixed once per matrix."""
    mask = d.numeric_mask
    ranges = np.zeros(d.n_numeric)
    for j in range(d.n_numeric):
        vals = d.numeric_values[~mask[:, j], j]
        if vals.size:
            ranges[j] = vals.max() - vals.min()
    return ranges


def gower_dissimilarity(
    d: MixedDataset, i: int, j: int, literal: bool = False, _ranges=None
) -> float:
    """1 - s_ij with per-feature similarities weighted by comparability.

    Numeric similarity is 1 - |delta|/R_k (range-normalized); ``literal=True``
    audits the raw |delta|/R_k polarity instead. A feature gets weight 0 when
    either value is missing or its range is zero.
    """
    ranges = _gower_ranges(d) if _ranges is None else _ranges
    num_mask, cat_mask = d.numeric_mask, d.categorical_mask
    weight_sum = 0.0
    sim_sum = 0.0
    for k in range(d.n_numeric):
        if num_mask[i, k] or num_mask[j, k] or ranges[k] == 0:
            continue
        frac = abs(d.numeric_values[i, k] - d.numeric_values[j, k]) / ranges[k]
        sim_sum += frac if literal else 1.0 - frac
        weight_sum += 1.0
    for k in range(d.n_categorical):
        if cat_mask[i, k] or cat_mask[j, k]:
            continue
        sim_sum += 1.0 if d.categorical_values[i, k] == d.categorical_values[j, k] else 0.0
        weight_sum += 1.0
    if weight_sum == 0:
        raise ValueError(f"rows {i} and {j} share no comparable feature")
    return 1.0 - sim_sum / weight_sum


def pairwise(
    d: MixedDataset,
    metric: str = "huang",
    gamma: float | None = None,
    literal: bool = False,
) -> DistanceMatrix:
    """Dense symmetric matrix under ``huang``, ``gower`` or ``euclid2``.

    Vectorized over columns; exactly symmetric by construction (the upper
    triangle is computed once and mirrored).
    """
    n = d.n_rows
    if metric in ("huang", "euclid2"):
        if d.has_missing:
            raise ValueError(f"{metric} requires a complete-case dataset")
        X = d.numeric_values
        sq = (X**2).sum(1)
        d_num = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        np.maximum(d_num, 0.0, out=d_num)
        if metric == "euclid2":
            values = d_num
            tag = "euclid2"
        else:
            if gamma is None:
                gamma = default_gamma(d)
            C = d.categorical_values
            d_cat = np.zeros((n, n))
            for q in range(d.n_categorical):
                col = C[:, q]
                d_cat += (col[:, None] != col[None, :]).astype(float)
            values = d_num + gamma * d_cat
            tag = f"huang(gamma={gamma:g})"
    elif metric == "gower":
        num_mask, cat_mask = d.numeric_mask, d.categorical_mask
        ranges = _gower_ranges(d)
        sim = np.zeros((n, n))
        wgt = np.zeros((n, n))
        for k in range(d.n_numeric):
            if ranges[k] == 0:
                continue
            ok = ~num_mask[:, k]
            w = np.outer(ok, ok).astype(float)
            col = np.where(ok, d.numeric_values[:, k], 0.0)
            frac = np.abs(col[:, None] - col[None, :]) / ranges[k]
            s = frac if literal else 1.0 - frac
            sim += w * s
            wgt += w
        for k in range(d.n_categorical):
            ok = ~cat_mask[:, k]
            w = np.outer(ok, ok).astype(float)
            col = d.categorical_values[:, k]
            s = (col[:, None] == col[None, :]).astype(float)
            sim += w * s
            wgt += w
        if (wgt == 0).any():
            bad = np.argwhere(wgt == 0)
            i, j = bad[0]
            raise ValueError(f"rows {i} and {j} share no comparable feature")
        values = 1.0 - sim / wgt
        tag = "gower(literal)" if literal else "gower"
    else:
        raise ValueError(f"unknown metric {metric!r}")

    upper = np.triu(values, k=1)
    values = upper + upper.T
    np.maximum(values, 0.0, out=values)
    return DistanceMatrix(values=values, metric_tag=tag)


def embedding_distances(coords: np.ndarray, squared: bool = False) -> DistanceMatrix:
    """Euclidean (or squared Euclidean) distances between embedding rows."""
    X = np.asarray(coords, dtype=float)
    sq = (X**2).sum(1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    values = d2 if squared else np.sqrt(d2)
    upper = np.triu(values, k=1)
    values = upper + upper.T
    return DistanceMatrix(values=values, metric_tag="embedded(euclid2)" if squared else "embedded(euclidean)")
