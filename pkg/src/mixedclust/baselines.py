"""Baseline mixed-data clusterers and the elbow k-selector.

k-prototypes alternates mean/mode prototypes under the Huang dissimilarity;
KAMILA alternates KDE-balanced numeric and multinomial categorical
likelihoods; the agglomerative baseline cuts an average-linkage dendrogram
over Gower dissimilarities; elbow_k reads the largest drop in marginal
Calinski-Harabasz gain off a k-medoids curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import squareform

from .dataset import MixedDataset
from .dimred import encoded_rank, famd
from .distance import default_gamma, pairwise
from .labels import Hierarchy, HierarchyNode, Partition, compact_labels
from .validation import calinski_harabasz

_MAX_LLOYD_ITERS = 100
_MAX_KAMILA_ITERS = 50
_LIK_FLOOR = 1e-300


@dataclass(frozen=True)
class Prototype:
    """Cluster representative: numeric mean plus per-column categorical mode."""

    numeric_center: np.ndarray
    categorical_mode: np.ndarray


@dataclass(frozen=True)
class KamilaState:
    """Converged KAMILA parameters (per-column theta arrays are k x L_q)."""

    centroids: np.ndarray
    theta: tuple[np.ndarray, ...]
    kde_bandwidth: float


def _check_complete(d: MixedDataset, algorithm: str) -> None:
    if d.has_missing:
        raise ValueError(f"{algorithm} requires complete cases; drop or impute missing values")


def _huang_cost_matrix(numeric, cats, centers, modes, gamma):
    sq = ((numeric[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    if cats.shape[1]:
        mism = (cats[:, None, :] != modes[None, :, :]).sum(axis=2)
    else:
        mism = 0.0
    return sq + gamma * mism


def _modes(cats, labels, k, level_counts, old_modes):
    modes = old_modes.copy()
    for g in range(k):
        rows = np.flatnonzero(labels == g)
        if rows.size == 0:
            continue
        for q, n_levels in enumerate(level_counts):
            counts = np.bincount(cats[rows, q], minlength=n_levels)
            modes[g, q] = int(np.argmax(counts))
    return modes


def kprototypes_detail(
    d: MixedDataset, k: int, gamma: float | None = None, seed: int = 0
) -> tuple[Partition, list[Prototype], np.ndarray]:
    """Full k-prototypes result: partition, prototypes, per-iteration cost."""
    n = d.n_rows
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, n], got {k} with n={n}")
    _check_complete(d, "kprototypes")
    if gamma is None:
        gamma = default_gamma(d)
    numeric = d.numeric_values
    cats = d.categorical_values
    level_counts = [len(lv) for lv in d.levels]

    rng = np.random.default_rng(seed)
    chosen = rng.choice(n, size=k, replace=False)
    centers = numeric[chosen].astype(float).copy()
    modes = cats[chosen].copy()

    labels = np.full(n, -1)
    costs = []
    for _ in range(_MAX_LLOYD_ITERS):
        cost_mat = _huang_cost_matrix(numeric, cats, centers, modes, gamma)
        new_labels = np.argmin(cost_mat, axis=1)

        own = cost_mat[np.arange(n), new_labels]
        order = np.argsort(-own, kind="stable")
        for g in range(k):
            if (new_labels == g).any():
                continue
            counts = np.bincount(new_labels, minlength=k)
            donor = next(int(i) for i in order if counts[new_labels[i]] > 1)
            new_labels[donor] = g

        changed = not np.array_equal(new_labels, labels)
        labels = new_labels
        for g in range(k):
            rows = np.flatnonzero(labels == g)
            if rows.size:
                centers[g] = numeric[rows].mean(axis=0)
        modes = _modes(cats, labels, k, level_counts, modes)

        cost_mat = _huang_cost_matrix(numeric, cats, centers, modes, gamma)
        costs.append(float(cost_mat[np.arange(n), labels].sum()))
        if not changed:
            break

    tag = f"kprototypes(k={k}, gamma={gamma:.6g}, seed={seed})"
    part = Partition(labels=labels, algorithm=tag)
    protos = [Prototype(numeric_center=centers[g].copy(), categorical_mode=modes[g].copy()) for g in range(k)]
    return part, protos, np.asarray(costs)


def kprototypes(d: MixedDataset, k: int, gamma: float | None = None, seed: int = 0) -> Partition:
    return kprototypes_detail(d, k, gamma=gamma, seed=seed)[0]


def laplace_theta(d: MixedDataset, labels: np.ndarray, k: int) -> tuple[np.ndarray, ...]:
    """Add-one smoothed level frequencies per cluster; rows sum to 1."""
    theta = []
    for q, lv in enumerate(d.levels):
        n_levels = len(lv)
        t = np.empty((k, n_levels))
        for g in range(k):
            rows = np.flatnonzero(labels == g)
            counts = np.bincount(d.categorical_values[rows, q], minlength=n_levels)
            t[g] = (counts + 1.0) / (rows.size + n_levels)
        theta.append(t)
    return tuple(theta)


def _silverman_bandwidth(r: np.ndarray) -> float:
    n = r.size
    sigma = float(r.std(ddof=1)) if n > 1 else 0.0
    q75, q25 = np.percentile(r, [75, 25])
    spread = min(sigma, (q75 - q25) / 1.34)
    h = 0.9 * spread * n ** (-0.2)
    return max(h, 1e-12)


def _kde_log_density(points: np.ndarray, samples: np.ndarray, h: float) -> np.ndarray:
    z = (points[..., None] - samples) / h
    dens = np.exp(-0.5 * z**2).sum(axis=-1) / (samples.size * h * np.sqrt(2.0 * np.pi))
    return np.log(np.maximum(dens, _LIK_FLOOR))


def kamila_detail(
    d: MixedDataset, k: int, runs: int = 5, seed: int = 0
) -> tuple[Partition, KamilaState, float]:
    n = d.n_rows
    if d.n_numeric < 1 or d.n_categorical < 1:
        raise ValueError("kamila requires at least one numeric and one categorical column")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, n], got {k} with n={n}")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    _check_complete(d, "kamila")
    numeric = d.numeric_values
    cats = d.categorical_values
    level_counts = [len(lv) for lv in d.levels]

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(runs):
        mu = numeric[rng.choice(n, size=k, replace=False)].astype(float).copy()
        theta = tuple(rng.dirichlet(np.ones(L), size=k) for L in level_counts)
        labels = np.full(n, -1)
        h = 1e-12
        objective = -np.inf
        for _ in range(_MAX_KAMILA_ITERS):
            dist = np.sqrt(np.maximum(((numeric[:, None, :] - mu[None, :, :]) ** 2).sum(axis=2), 0.0))
            r = dist.min(axis=1)
            h = _silverman_bandwidth(r)
            log_fv = _kde_log_density(dist, r, h)
            log_fw = np.zeros((n, k))
            for q in range(d.n_categorical):
                log_fw += np.log(np.maximum(theta[q][:, cats[:, q]].T, _LIK_FLOOR))
            H = log_fw + log_fv
            new_labels = np.argmax(H, axis=1)
            objective = float(H.max(axis=1).sum())
            if np.array_equal(new_labels, labels):
                break
            labels = new_labels
            new_theta = []
            for q, n_levels in enumerate(level_counts):
                t = theta[q].copy()
                for g in range(k):
                    rows = np.flatnonzero(labels == g)
                    if rows.size == 0:
                        continue
                    counts = np.bincount(cats[rows, q], minlength=n_levels)
                    t[g] = (counts + 1.0) / (rows.size + n_levels)
                new_theta.append(t)
            theta = tuple(new_theta)
            for g in range(k):
                rows = np.flatnonzero(labels == g)
                if rows.size:
                    mu[g] = numeric[rows].mean(axis=0)
        if best is None or objective > best[0]:
            best = (objective, labels, mu.copy(), theta, h)

    objective, labels, mu, theta, h = best
    part = compact_labels(labels, algorithm=f"kamila(k={k}, runs={runs}, seed={seed})")
    seen = []
    for g in labels:
        if g not in seen:
            seen.append(int(g))
    state = KamilaState(
        centroids=mu[seen],
        theta=tuple(t[seen] for t in theta),
        kde_bandwidth=h,
    )
    return part, state, objective


def kamila(d: MixedDataset, k: int, runs: int = 5, seed: int = 0) -> Partition:
    return kamila_detail(d, k, runs=runs, seed=seed)[0]


def phillip_ottaway(d: MixedDataset, k: int) -> tuple[Partition, Hierarchy]:
    """Average-linkage agglomeration over Gower dissimilarities, cut at k."""
    n = d.n_rows
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, n], got {k} with n={n}")
    tag = f"phillip_ottaway(k={k})"
    if n == 1:
        node = HierarchyNode(id=0, members=frozenset({0}), scale=0.0, children=(), parent=None)
        return Partition(labels=np.zeros(1, dtype=int), algorithm=tag), Hierarchy(nodes={0: node}, root=0)

    G = pairwise(d, metric="gower")
    Z = linkage(squareform(G.values, checks=False), method="average")
    raw = fcluster(Z, t=k, criterion="maxclust")
    part = compact_labels(raw, algorithm=tag)

    nodes = {
        i: HierarchyNode(id=i, members=frozenset({i}), scale=0.0, children=(), parent=None)
        for i in range(n)
    }
    for t in range(Z.shape[0]):
        left, right = int(Z[t, 0]), int(Z[t, 1])
        node_id = n + t
        members = nodes[left].members | nodes[right].members
        nodes[left] = HierarchyNode(
            id=left, members=nodes[left].members, scale=nodes[left].scale,
            children=nodes[left].children, parent=node_id, meta=nodes[left].meta,
        )
        nodes[right] = HierarchyNode(
            id=right, members=nodes[right].members, scale=nodes[right].scale,
            children=nodes[right].children, parent=node_id, meta=nodes[right].meta,
        )
        nodes[node_id] = HierarchyNode(
            id=node_id, members=members, scale=float(Z[t, 2]), children=(left, right),
            parent=None, meta={"size": int(Z[t, 3])},
        )
    return part, Hierarchy(nodes=nodes, root=2 * n - 2)


def _kmedoids(D: np.ndarray, k: int) -> np.ndarray:
    """Deterministic PAM-style k-medoids: greedy build, then Voronoi updates."""
    n = D.shape[0]
    medoids = [int(np.argmin(D.sum(axis=1)))]
    while len(medoids) < k:
        nearest = D[:, medoids].min(axis=1)
        gains = np.maximum(nearest[None, :] - D, 0.0).sum(axis=1)
        gains[medoids] = -np.inf
        medoids.append(int(np.argmax(gains)))

    for _ in range(_MAX_LLOYD_ITERS):
        labels = np.argmin(D[:, medoids], axis=1)
        new_medoids = list(medoids)
        for g in range(k):
            rows = np.flatnonzero(labels == g)
            if rows.size == 0:
                continue
            within = D[np.ix_(rows, rows)].sum(axis=1)
            new_medoids[g] = int(rows[np.argmin(within)])
        if new_medoids == medoids:
            break
        medoids = new_medoids
    return np.argmin(D[:, medoids], axis=1)


def elbow_k(d: MixedDataset, k_max: int) -> int:
    """k at the largest drop in marginal Calinski-Harabasz gain.

    Scores come from deterministic k-medoids on the Gower matrix, evaluated
    in FAMD coordinates; the k=1 score is pinned at 0 so the first gain is
    defined.
    """
    n = d.n_rows
    if k_max < 3:
        raise ValueError(f"k_max must be >= 3, got {k_max}")
    if k_max >= n:
        raise ValueError(f"k_max must be < n, got {k_max} with n={n}")
    G = pairwise(d, metric="gower")
    m = min(encoded_rank(d), d.n_numeric + d.n_categorical)
    coords = famd(d, m).coords

    scores = {1: 0.0}
    for k in range(2, k_max + 1):
        labels = _kmedoids(G.values, k)
        scores[k] = calinski_harabasz(coords, labels)

    best_k, best_drop = None, -np.inf
    for k in range(2, k_max):
        drop = (scores[k] - scores[k - 1]) - (scores[k + 1] - scores[k])
        if drop > best_drop:
            best_k, best_drop = k, drop
    return best_k
