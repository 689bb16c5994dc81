"""Independent test-side oracles; nothing here imports package internals."""

from __future__ import annotations

import itertools

import numpy as np
from sklearn.metrics import adjusted_rand_score

import mixedclust as mc


def masked_ari(truth, labels) -> float:
    """ARI over rows the partition actually labeled (outliers excluded)."""
    truth = np.asarray(truth)
    labels = np.asarray(labels)
    keep = labels != mc.OUTLIER
    if not keep.any():
        return 0.0
    return float(adjusted_rand_score(truth[keep], labels[keep]))


def random_mixed(rng: np.random.Generator, n: int, p: int, q: int, levels: int = 3):
    """Unstructured mixed table: standard-normal numerics, uniform labels."""
    X = rng.normal(size=(n, p))
    cats = [[f"l{rng.integers(levels)}" for _ in range(q)] for _ in range(n)]
    return mc.from_arrays(X, cats if q else None)


# MST oracle: every spanning tree of K_n, decoded in batch from its
# Prufer sequence; leaf choice per step is the smallest remaining degree-1
# node, which the running degree vector tracks exactly.

def exhaustive_min_spanning_weight(W: np.ndarray) -> float:
    n = W.shape[0]
    if n == 2:
        return float(W[0, 1])
    seqs = np.array(list(itertools.product(range(n), repeat=n - 2)), dtype=np.int64)
    t = len(seqs)
    rows = np.arange(t)
    deg = np.ones((t, n), dtype=np.int64)
    for j in range(n - 2):
        np.add.at(deg, (rows, seqs[:, j]), 1)
    totals = np.zeros(t)
    for j in range(n - 2):
        leaf = (deg == 1).argmax(axis=1)
        s = seqs[:, j]
        totals += W[leaf, s]
        deg[rows, leaf] = 0
        deg[rows, s] -= 1
    first = (deg == 1).argmax(axis=1)
    deg[rows, first] = 0
    second = (deg == 1).argmax(axis=1)
    totals += W[first, second]
    return float(totals.min())


def is_spanning_tree(edges: np.ndarray, n: int) -> bool:
    if edges.shape != (n - 1, 3):
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in edges:
        ru, rv = find(int(u)), find(int(v))
        if ru == rv:
            return False
        parent[ru] = rv
    return True


# Minimax path distances: (min, max) closure of the distance matrix, the
# quantity iVAT displays. Floyd-Warshall order is valid for this semiring.

def minimax_oracle(D: np.ndarray) -> np.ndarray:
    M = np.array(D, dtype=float, copy=True)
    n = M.shape[0]
    for k in range(n):
        M = np.minimum(M, np.maximum(M[:, k][:, None], M[k, :][None, :]))
    np.fill_diagonal(M, 0.0)
    return M


# Condensed-tree extraction oracle: brute force over all antichains.

def random_condensed_tree(rng: np.random.Generator, n_nodes: int):
    """Random-topology tree whose stabilities are dyadic (exact float sums)."""
    parents = {0: None}
    children = {i: [] for i in range(n_nodes)}
    for i in range(1, n_nodes):
        par = int(rng.integers(0, i))
        parents[i] = par
        children[par].append(i)
    stability = rng.integers(0, 41, size=n_nodes) / 4.0
    nodes = {}
    for i in range(n_nodes):
        nodes[i] = mc.CondensedNode(
            id=i,
            parent=parents[i],
            birth=0.0,
            death=1.0,
            size=1,
            children=tuple(children[i]),
            points=[],
            stability=float(stability[i]),
        )
    return mc.CondensedTree(nodes=nodes, root=0, n_points=0)


def ancestor_matrix(tree) -> np.ndarray:
    n = len(tree.nodes)
    anc = np.zeros((n, n), dtype=bool)
    for i in tree.nodes:
        p = tree.node(i).parent
        while p is not None:
            anc[p, i] = True
            p = tree.node(p).parent
    return anc


def best_antichain_total(tree) -> float:
    """Max total stability over every antichain of the tree (root included)."""
    ids = sorted(tree.nodes)
    anc = ancestor_matrix(tree)
    sig = {i: tree.node(i).stability for i in ids}
    best = 0.0
    n = len(ids)
    for mask in range(1, 1 << n):
        chosen = [ids[b] for b in range(n) if mask >> b & 1]
        ok = all(
            not anc[a, b] and not anc[b, a]
            for a, b in itertools.combinations(chosen, 2)
        )
        if ok:
            best = max(best, sum(sig[c] for c in chosen))
    return best


def covers_all_leaves(tree, selected) -> bool:
    """True when every root-to-leaf path meets exactly one selected node."""
    selected = set(selected)

    def walk(nid, hits):
        hits = hits + (1 if nid in selected else 0)
        node = tree.node(nid)
        if not node.children:
            return hits == 1
        return all(walk(c, hits) for c in node.children)

    return walk(tree.root, 0)


# Direct-formula validity indices (outliers removed by the caller).

def ch_direct(X: np.ndarray, labels: np.ndarray) -> float:
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    clusters = np.unique(labels)
    n, k = X.shape[0], len(clusters)
    grand = X.mean(axis=0)
    b = sum(
        (labels == c).sum() * float(((X[labels == c].mean(0) - grand) ** 2).sum())
        for c in clusters
    )
    w = sum(float(((X[labels == c] - X[labels == c].mean(0)) ** 2).sum()) for c in clusters)
    return (b / w) * (n - k) / (k - 1)


def db_direct(X: np.ndarray, labels: np.ndarray) -> float:
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    clusters = np.unique(labels)
    cents = np.stack([X[labels == c].mean(0) for c in clusters])
    s = np.array(
        [np.linalg.norm(X[labels == c] - cents[i], axis=1).mean() for i, c in enumerate(clusters)]
    )
    worst = []
    for i in range(len(clusters)):
        vals = [
            (s[i] + s[j]) / np.linalg.norm(cents[i] - cents[j])
            for j in range(len(clusters))
            if j != i
        ]
        worst.append(max(vals))
    return float(np.mean(worst))


def silhouette_direct(D: np.ndarray, labels: np.ndarray) -> float:
    """Mean per-point silhouette from a dissimilarity matrix; singletons 0."""
    D = np.asarray(D, dtype=float)
    labels = np.asarray(labels)
    clusters = np.unique(labels)
    scores = []
    for i in range(len(labels)):
        own = labels[i]
        same = np.flatnonzero(labels == own)
        if len(same) == 1:
            scores.append(0.0)
            continue
        a = D[i, same].sum() / (len(same) - 1)
        b = min(D[i, labels == c].mean() for c in clusters if c != own)
        peak = max(a, b)
        scores.append(0.0 if peak == 0 else (b - a) / peak)
    return float(np.mean(scores))
