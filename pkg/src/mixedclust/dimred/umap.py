"""Simplified UMAP over the Huang-distance k-NN graph.

Per-node bandwidths are solved by bisection so each node's outgoing
similarity mass is log2(k); the symmetrized graph seeds a spectral layout
that is refined by per-epoch stochastic attract/repel updates of the
fixed-calibration low-dimensional similarity 1/(1 + 1.577 d^0.8951).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import MixedDataset
from ..distance import pairwise
from .base import Embedding
from .spectral import spectral_coordinates

A_CAL = 1.577
B_CAL = 0.8951

_GRAD_CLIP = 4.0
_MIN_DIST_SQ = 1e-12


@dataclass(frozen=True)
class NeighborGraph:
    """Directed k-NN similarities plus their symmetrized union.

    neighbors[i] holds i's k nearest rows (ties broken by row index);
    sims[i, j] = exp(-(d_ij - rho_i)/sigma_i) for j in neighbors[i], else 0.
    """

    neighbors: np.ndarray
    rho: np.ndarray
    sigma: np.ndarray
    sims: np.ndarray
    weights: np.ndarray
    sim_sums: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.shape[0]


def build_neighbor_graph(d: MixedDataset, k: int, gamma: float | None = None) -> NeighborGraph:
    D = pairwise(d, metric="huang", gamma=gamma)
    return neighbor_graph_from_distances(D.values, k)


def neighbor_graph_from_distances(dist: np.ndarray, k: int) -> NeighborGraph:
    n = dist.shape[0]
    if not 2 <= k < n:
        raise ValueError(f"k must be in [2, n-1], got {k} with n={n}")
    if dist.max() == 0:
        raise ValueError("all rows identical; neighbor graph is degenerate")
    vals = dist.copy()
    np.fill_diagonal(vals, np.inf)
    # stable ordering: distance, then row index
    neighbors = np.argsort(vals, axis=1, kind="stable")[:, :k]
    ndist = np.take_along_axis(vals, neighbors, axis=1)
    rho = ndist[:, 0]
    adj = np.maximum(ndist - rho[:, None], 0.0)

    target = np.log2(k)
    lo = np.full(n, 1e-10)
    hi = np.ones(n)

    def mass(sig):
        return np.exp(-adj / sig[:, None]).sum(axis=1)

    for _ in range(64):
        low = mass(hi) < target
        if not low.any():
            break
        hi[low] *= 2.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        below = mass(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    sigma = 0.5 * (lo + hi)
    svals = np.exp(-adj / sigma[:, None])
    sums = svals.sum(axis=1)

    sims = np.zeros((n, n))
    rows = np.repeat(np.arange(n), k)
    sims[rows, neighbors.ravel()] = svals.ravel()
    weights = sims + sims.T - sims * sims.T
    return NeighborGraph(
        neighbors=neighbors, rho=rho, sigma=sigma, sims=sims, weights=weights, sim_sums=sums
    )


# Eq. 5 per-pair terms, exposed for gradient verification ------------------


def low_dim_similarity(dist: float) -> float:
    return 1.0 / (1.0 + A_CAL * dist**B_CAL)


def attract_loss(y_a: np.ndarray, y_b: np.ndarray) -> float:
    """-log s(d): pulls a neighbor pair together."""
    d = float(np.linalg.norm(y_a - y_b))
    return float(np.log1p(A_CAL * d**B_CAL))


def attract_grad(y_a: np.ndarray, y_b: np.ndarray) -> np.ndarray:
    delta = y_a - y_b
    d2 = max(float(delta @ delta), _MIN_DIST_SQ)
    d = np.sqrt(d2)
    coef = A_CAL * B_CAL * d ** (B_CAL - 2.0) / (1.0 + A_CAL * d**B_CAL)
    return coef * delta


def repel_loss(y_a: np.ndarray, y_b: np.ndarray) -> float:
    """-log(1 - s(d)): pushes a non-neighbor pair apart."""
    d = float(np.linalg.norm(y_a - y_b))
    s = low_dim_similarity(d)
    return float(-np.log(max(1.0 - s, 1e-300)))


def repel_grad(y_a: np.ndarray, y_b: np.ndarray) -> np.ndarray:
    delta = y_a - y_b
    d2 = max(float(delta @ delta), _MIN_DIST_SQ)
    d = np.sqrt(d2)
    coef = -B_CAL / (d2 * (1.0 + A_CAL * d**B_CAL))
    return coef * delta


def umap(
    d: MixedDataset,
    m: int = 2,
    k: int = 15,
    epochs: int = 200,
    seed: int = 0,
    gamma: float | None = None,
) -> Embedding:
    """Spectral init of the fuzzy graph + stochastic attract/repel epochs.

    Each epoch gives every point one randomly chosen graph neighbor to pull
    and one random non-neighbor to push; updates are computed from the
    epoch-start layout and applied together, so runs are reproducible for a
    given seed.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    n = d.n_rows
    graph = build_neighbor_graph(d, k, gamma=gamma)
    coords, _ = spectral_coordinates(graph.weights, m)
    # Rescale the init so its widest axis spans 1.0: the attract/repel forces
    # below decay quickly past unit distance, and one sampled pair per point
    # per epoch cannot consolidate a layout that starts wider than its reach.
    peak = np.abs(coords).max()
    if peak > 0:
        coords = coords * (1.0 / peak)
    Y = coords.copy()

    rng = np.random.default_rng(seed)
    rows = np.arange(n)
    for epoch in range(epochs):
        lr = 1.0 - epoch / epochs
        pick = rng.integers(0, k, size=n)
        nb = graph.neighbors[rows, pick]
        far = rng.integers(0, n, size=n)
        for _ in range(64):
            bad = (far == rows) | (graph.neighbors == far[:, None]).any(axis=1)
            if not bad.any():
                break
            far[bad] = rng.integers(0, n, size=int(bad.sum()))

        delta_n = Y - Y[nb]
        d2 = np.maximum((delta_n**2).sum(axis=1), _MIN_DIST_SQ)
        dist = np.sqrt(d2)
        att = (A_CAL * B_CAL * dist ** (B_CAL - 2.0) / (1.0 + A_CAL * dist**B_CAL))[:, None] * delta_n

        delta_f = Y - Y[far]
        d2f = np.maximum((delta_f**2).sum(axis=1), _MIN_DIST_SQ)
        distf = np.sqrt(d2f)
        rep = (-B_CAL / (d2f * (1.0 + A_CAL * distf**B_CAL)))[:, None] * delta_f

        grad = np.clip(att, -_GRAD_CLIP, _GRAD_CLIP) + np.clip(rep, -_GRAD_CLIP, _GRAD_CLIP)
        Y = Y - lr * grad

    return Embedding(
        coords=Y,
        method="umap",
        params={"m": m, "k": k, "epochs": epochs, "seed": seed, "a": A_CAL, "b": B_CAL},
    )
