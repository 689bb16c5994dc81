"""Factor analysis of mixed data via one global SVD.

Numerics are z-scored; each categorical level's indicator column is scaled by
1/sqrt(p_l) and centered. The eigenvalues of the resulting matrix partition
the total inertia P + sum(levels - 1), and row scores on the leading
components are the embedding.
"""

from __future__ import annotations

import numpy as np

from ..dataset import MixedDataset
from .base import Embedding


def encoded_rank(d: MixedDataset) -> int:
    """Upper bound on the encoded matrix rank: P + sum(levels - 1)."""
    return d.n_numeric + sum(max(len(lv) - 1, 0) for lv in d.levels)


def encode(d: MixedDataset) -> np.ndarray:
    """The weighted, centered FAMD design matrix (complete-case only)."""
    if d.has_missing:
        raise ValueError("famd requires a complete-case dataset")
    n = d.n_rows
    blocks = []
    if d.n_numeric:
        X = d.numeric_values
        sd = X.std(axis=0)
        sd = np.where(sd == 0, 1.0, sd)
        blocks.append((X - X.mean(axis=0)) / sd)
    for q in range(d.n_categorical):
        codes = d.categorical_values[:, q]
        n_levels = len(d.levels[q])
        ind = np.zeros((n, n_levels))
        ind[np.arange(n), codes] = 1.0
        p = ind.mean(axis=0)
        present = p > 0
        z = ind[:, present] / np.sqrt(p[present])
        blocks.append(z - z.mean(axis=0))
    return np.hstack(blocks) if blocks else np.zeros((n, 0))


def famd(d: MixedDataset, m: int) -> Embedding:
    """Row coordinates on the first m global components.

    Component signs are fixed by making each component's largest-magnitude
    loading positive. explained_inertia is the fraction of total inertia
    carried by the m returned components.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rank_bound = encoded_rank(d)
    if m > rank_bound:
        raise ValueError(f"m={m} exceeds encoded rank bound {rank_bound}")
    Z = encode(d)
    n = d.n_rows
    U, S, Vt = np.linalg.svd(Z / np.sqrt(n), full_matrices=False)
    lam = S**2
    # deterministic sign: largest-magnitude loading positive per component
    for j in range(min(m, Vt.shape[0])):
        pivot = np.argmax(np.abs(Vt[j]))
        if Vt[j, pivot] < 0:
            Vt[j] = -Vt[j]
            U[:, j] = -U[:, j]
    scores = np.sqrt(n) * U * S
    coords = np.zeros((n, m))
    avail = min(m, scores.shape[1])
    coords[:, :avail] = scores[:, :avail]
    total = lam.sum()
    explained = float(lam[:avail].sum() / total) if total > 0 else 1.0
    return Embedding(
        coords=coords,
        method="famd",
        params={"m": m, "eigenvalues": tuple(float(x) for x in lam)},
        explained_inertia=explained,
    )
