"""Laplacian eigenmaps over the Huang-distance heat kernel.

The generalized problem L f = lambda D f is solved densely (Cholesky
reduction inside scipy's symmetric solver); the constant lambda=0 vector is
skipped and the next m eigenvectors, in ascending eigenvalue order, become
the embedding.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from ..dataset import MixedDataset
from ..distance import pairwise
from .base import Embedding

# off-diagonal affinity row sums below this are treated as disconnected
_ISOLATION_TOL = 1e-290


def spectral_coordinates(W: np.ndarray, m: int):
    """Eigenvectors 2..m+1 of L f = lambda D f for a symmetric affinity W.

    Returns (coords, eigenvalues of the returned columns). Signs are fixed by
    making each vector's largest-magnitude entry positive.
    """
    n = W.shape[0]
    degrees = W.sum(axis=1)
    if (degrees <= 0).any():
        bad = np.flatnonzero(degrees <= 0)
        raise ValueError(f"graph has isolated nodes: {bad.tolist()}")
    D = np.diag(degrees)
    L = D - W
    vals, vecs = scipy.linalg.eigh(L, D)
    coords = vecs[:, 1 : m + 1].copy()
    for j in range(coords.shape[1]):
        pivot = np.argmax(np.abs(coords[:, j]))
        if coords[pivot, j] < 0:
            coords[:, j] = -coords[:, j]
    return coords, vals[1 : m + 1].copy()


def laplacian_eigenmaps(d: MixedDataset, m: int, t: float = 1.0, gamma: float | None = None) -> Embedding:
    """Heat-kernel affinity W_ij = exp(-d_ij / t) over Huang distances."""
    if t <= 0:
        raise ValueError("t must be positive")
    n = d.n_rows
    if n < m + 2:
        raise ValueError(f"need at least m+2={m + 2} rows, got {n}")
    D = pairwise(d, metric="huang", gamma=gamma)
    W = np.exp(-D.values / t)
    np.fill_diagonal(W, 0.0)
    row_sums = W.sum(axis=1)
    if (row_sums < _ISOLATION_TOL).any():
        bad = np.flatnonzero(row_sums < _ISOLATION_TOL)
        raise ValueError(f"affinity underflow isolates rows {bad.tolist()}; increase t")
    coords, vals = spectral_coordinates(W, m)
    return Embedding(
        coords=coords,
        method="laplacian_eigenmaps",
        params={"m": m, "t": t, "eigenvalues": tuple(float(x) for x in vals)},
    )
