"""Cluster tendency statistics and internal validity indices.

Hopkins compares nearest-neighbor distances of real points against uniform
reference points in the bounding box; iVAT reorders a dissimilarity matrix by
minimax path distances so clusters show as dark diagonal blocks. The three
indices (Calinski-Harabasz, silhouette, Davies-Bouldin) follow their direct
dispersion-ratio formulas, computed on non-outlier points only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .dataset import MixedDataset
from .density import mst
from .dimred import Embedding, encoded_rank, famd
from .distance import DistanceMatrix, pairwise
from .labels import OUTLIER, Partition

CH_CAP = 1e12


def _as_coords(E) -> np.ndarray:
    if isinstance(E, Embedding):
        return E.coords
    coords = np.asarray(E, dtype=float)
    if coords.ndim != 2:
        raise ValueError("coordinates must be a 2-D array")
    return coords


def _as_labels(p) -> np.ndarray:
    if isinstance(p, Partition):
        return p.labels
    return np.asarray(p, dtype=int)


def hopkins(E, sample_fraction: float = 0.05, seed: int = 0) -> float:
    """Clustering-tendency ratio in [0, 1]; ~0.5 for uniform data, ~1 for
    concentrated data."""
    X = _as_coords(E)
    n, dim = X.shape
    if n < 20:
        raise ValueError(f"hopkins needs n >= 20, got {n}")
    lo, hi = X.min(axis=0), X.max(axis=0)
    if (hi == lo).any():
        raise ValueError("bounding box has zero volume along some dimension")

    rng = np.random.default_rng(seed)
    m = max(1, math.ceil(sample_fraction * n))
    rows = rng.choice(n, size=m, replace=False)
    Y = rng.uniform(lo, hi, size=(m, dim))

    tree = cKDTree(X)
    u, _ = tree.query(Y, k=1)
    w2, _ = tree.query(X[rows], k=2)
    w = w2[:, 1]
    u_mass = float((u**dim).sum())
    w_mass = float((w**dim).sum())
    return u_mass / (u_mass + w_mass)


def vat_order(D: DistanceMatrix | np.ndarray) -> np.ndarray:
    """Prim-style visitation order starting at the farthest pair's lower-index
    endpoint; ties break toward the lowest row index."""
    vals = D.values if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=float)
    n = vals.shape[0]
    start = int(np.argmax(vals) // n)
    order = [start]
    best = vals[start].copy()
    visited = np.zeros(n, dtype=bool)
    visited[start] = True
    for _ in range(n - 1):
        masked = np.where(visited, np.inf, best)
        j = int(np.argmin(masked))
        order.append(j)
        visited[j] = True
        best = np.minimum(best, vals[j])
    return np.asarray(order)


def minimax_distances(D: DistanceMatrix | np.ndarray) -> np.ndarray:
    """All-pairs minimax path distance: the largest edge on the tree path
    between two points in the MST of D."""
    vals = D.values if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=float)
    n = vals.shape[0]
    out = np.zeros((n, n))
    if n < 2:
        return out
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for u, v, w in mst(vals):
        adj[int(u)].append((int(v), w))
        adj[int(v)].append((int(u), w))
    for src in range(n):
        stack = [(src, 0.0)]
        seen = np.zeros(n, dtype=bool)
        seen[src] = True
        while stack:
            node, peak = stack.pop()
            for nxt, w in adj[node]:
                if not seen[nxt]:
                    seen[nxt] = True
                    out[src, nxt] = max(peak, w)
                    stack.append((nxt, out[src, nxt]))
    return out


def ivat(D: DistanceMatrix | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(visitation permutation, minimax-transformed matrix in that order)."""
    vals = D.values if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=float)
    if vals.shape[0] < 2:
        raise ValueError("ivat needs n >= 2")
    perm = vat_order(vals)
    prime = minimax_distances(vals)
    return perm, prime[np.ix_(perm, perm)]


def _split_clusters(p):
    labels = _as_labels(p)
    keep = labels != OUTLIER
    return labels, keep


def calinski_harabasz(E, p) -> float:
    """Between/within dispersion ratio scaled by (n-k)/(k-1); zero within
    dispersion returns the CH_CAP sentinel."""
    coords = _as_coords(E)
    labels, keep = _split_clusters(p)
    X = coords[keep]
    lab = labels[keep]
    clusters = np.unique(lab)
    k = len(clusters)
    n = X.shape[0]
    if k < 2:
        raise ValueError("calinski_harabasz needs at least 2 non-outlier clusters")
    grand = X.mean(axis=0)
    tr_b = 0.0
    tr_w = 0.0
    for c in clusters:
        xc = X[lab == c]
        center = xc.mean(axis=0)
        tr_b += xc.shape[0] * float(((center - grand) ** 2).sum())
        tr_w += float(((xc - center) ** 2).sum())
    if tr_w == 0.0:
        return CH_CAP
    return min((tr_b / tr_w) * (n - k) / (k - 1), CH_CAP)


def silhouette(D_or_E, p) -> float:
    """Mean (b - a)/max(a, b) over non-outlier points; singletons count 0.

    Accepts a precomputed dissimilarity matrix or coordinates (Euclidean).
    """
    if isinstance(D_or_E, DistanceMatrix):
        dist = D_or_E.values
    else:
        coords = _as_coords(D_or_E)
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.sqrt(np.maximum((diff**2).sum(axis=2), 0.0))
    labels, keep = _split_clusters(p)
    rows = np.flatnonzero(keep)
    lab = labels[rows]
    dist = dist[np.ix_(rows, rows)]
    clusters = np.unique(lab)
    if len(clusters) < 2:
        raise ValueError("silhouette needs at least 2 non-outlier clusters")

    scores = np.zeros(len(rows))
    for i in range(len(rows)):
        own = lab[i]
        same = lab == own
        if same.sum() == 1:
            continue
        a = dist[i, same].sum() / (same.sum() - 1)
        b = min(dist[i, lab == c].mean() for c in clusters if c != own)
        peak = max(a, b)
        scores[i] = 0.0 if peak == 0.0 else (b - a) / peak
    return float(scores.mean())


def davies_bouldin(E, p) -> float:
    """Mean over clusters of the worst (s_i + s_j)/d_ij similarity ratio."""
    coords = _as_coords(E)
    labels, keep = _split_clusters(p)
    X = coords[keep]
    lab = labels[keep]
    clusters = np.unique(lab)
    k = len(clusters)
    if k < 2:
        raise ValueError("davies_bouldin needs at least 2 non-outlier clusters")
    centroids = np.stack([X[lab == c].mean(axis=0) for c in clusters])
    scatter = np.array(
        [float(np.linalg.norm(X[lab == c] - centroids[i], axis=1).mean()) for i, c in enumerate(clusters)]
    )
    diff = centroids[:, None, :] - centroids[None, :, :]
    cdist = np.sqrt((diff**2).sum(axis=2))
    off = ~np.eye(k, dtype=bool)
    if (cdist[off] == 0).any():
        raise ValueError("coincident centroids make the similarity ratio undefined")
    ratio = (scatter[:, None] + scatter[None, :]) / np.where(off, cdist, np.inf)
    return float(ratio.max(axis=1).mean())


@dataclass(frozen=True)
class ValidationReport:
    """One benchmark-table row; degenerate partitions carry -1.0 sentinels."""

    algorithm: str
    calinski_harabasz: float
    silhouette_embedded: float
    silhouette_gower: float
    davies_bouldin: float
    outlier_fraction: float
    k: int
    degenerate: bool = False
    reason: str = ""
    ch_capped: bool = False

    CSV_HEADER = ("algorithm", "CH", "sil_famd", "sil_gower", "DB", "outliers", "k")

    def to_csv_row(self) -> list:
        return [
            self.algorithm,
            repr(self.calinski_harabasz),
            repr(self.silhouette_embedded),
            repr(self.silhouette_gower),
            repr(self.davies_bouldin),
            repr(self.outlier_fraction),
            self.k,
        ]


def report(d: MixedDataset, p: Partition, algorithm: str | None = None) -> ValidationReport:
    """Four-index summary; degeneracy (k < 2 usable clusters) is encoded, not
    raised. Embedded indices use FAMD at the input dimensionality."""
    tag = algorithm if algorithm is not None else p.algorithm
    labels = p.labels
    non_outlier = labels[labels != OUTLIER]
    k = len(np.unique(non_outlier))
    frac = p.outlier_fraction

    def degenerate(reason):
        return ValidationReport(
            algorithm=tag, calinski_harabasz=-1.0, silhouette_embedded=-1.0,
            silhouette_gower=-1.0, davies_bouldin=-1.0, outlier_fraction=frac,
            k=k, degenerate=True, reason=reason,
        )

    if non_outlier.size == 0:
        return degenerate("all points labeled outliers")
    if k < 2:
        return degenerate("only a single cluster")

    m = min(encoded_rank(d), d.n_numeric + d.n_categorical)
    coords = famd(d, m).coords
    gower = pairwise(d, metric="gower")
    try:
        ch = calinski_harabasz(coords, p)
        db = davies_bouldin(coords, p)
    except ValueError as exc:
        return degenerate(str(exc))
    return ValidationReport(
        algorithm=tag,
        calinski_harabasz=ch,
        silhouette_embedded=silhouette(coords, p),
        silhouette_gower=silhouette(gower, p),
        davies_bouldin=db,
        outlier_fraction=frac,
        k=k,
        ch_capped=ch >= CH_CAP,
    )
