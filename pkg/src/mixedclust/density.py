"""Density-based hierarchy: HDBSCAN chain and the UMAP+HDBSCAN composition.

The chain is core distances -> mutual reachability -> Prim MST -> condensed
tree under a minimum cluster size -> stability-maximizing extraction. Each
stage is exposed on its own so tests can verify it against independent
oracles (exhaustive spanning trees, exhaustive antichain selection).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import MixedDataset
from .distance import DistanceMatrix, embedding_distances
from .labels import OUTLIER, Partition

# lambda = 1/eps; zero-weight MST edges (duplicate points) are floored so
# lambda stays finite and stability arithmetic well-defined
_EPS_FLOOR = 1e-12


def core_distances(D: DistanceMatrix, k: int) -> np.ndarray:
    """Distance from each point to its k-th closest other point."""
    n = D.n
    if not 1 <= k < n:
        raise ValueError(f"k must be in [1, n-1], got {k} with n={n}")
    vals = D.values.copy()
    np.fill_diagonal(vals, np.inf)
    part = np.sort(vals, axis=1)
    return part[:, k - 1]


def mutual_reachability(D: DistanceMatrix, core: np.ndarray) -> DistanceMatrix:
    """m_ij = max(core_i, core_j, d_ij) with a zero diagonal."""
    core = np.asarray(core, dtype=float)
    if core.shape != (D.n,):
        raise ValueError("core distance vector does not match matrix size")
    m = np.maximum(D.values, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(m, 0.0)
    m = np.triu(m, k=1)
    m = m + m.T
    return DistanceMatrix(values=m, metric_tag=f"mreach({D.metric_tag})")


def mst(M: DistanceMatrix | np.ndarray) -> np.ndarray:
    """Prim's algorithm on the dense matrix.

    Returns an (n-1, 3) array of (u, v, weight) rows in insertion order. Ties
    are broken by (weight, min endpoint, max endpoint) both when improving the
    frontier and when choosing the next vertex, so the tree is unique.
    """
    W = M.values if isinstance(M, DistanceMatrix) else np.asarray(M, dtype=float)
    n = W.shape[0]
    if n < 2:
        raise ValueError("MST needs at least two points")
    in_tree = np.zeros(n, dtype=bool)
    best_w = np.full(n, np.inf)
    best_from = np.zeros(n, dtype=int)
    in_tree[0] = True
    best_w[1:] = W[0, 1:]
    best_from[1:] = 0
    edges = np.empty((n - 1, 3))
    for step in range(n - 1):
        cand = np.flatnonzero(~in_tree)
        u = best_from[cand]
        lo = np.minimum(u, cand)
        hi = np.maximum(u, cand)
        pick = cand[np.lexsort((hi, lo, best_w[cand]))[0]]
        edges[step] = (best_from[pick], pick, best_w[pick])
        in_tree[pick] = True
        out = np.flatnonzero(~in_tree)
        if out.size:
            w_new = W[pick, out]
            cur_lo = np.minimum(best_from[out], out)
            new_lo = np.minimum(pick, out)
            better = (w_new < best_w[out]) | (
                (w_new == best_w[out]) & (new_lo < cur_lo)
            ) | (
                (w_new == best_w[out]) & (new_lo == cur_lo) & (pick < best_from[out])
            )
            idx = out[better]
            best_w[idx] = w_new[better]
            best_from[idx] = pick
    return edges


@dataclass
class CondensedNode:
    """A cluster of the condensed tree.

    ``points`` lists (row, lambda) for members that fall out of this cluster
    individually; members handed to children at a true split are reachable
    through ``children``. ``size`` counts every point that ever belonged.
    """

    id: int
    parent: int | None
    birth: float
    death: float
    size: int
    children: tuple = ()
    points: list = field(default_factory=list)
    stability: float = 0.0


@dataclass
class CondensedTree:
    nodes: dict
    root: int
    n_points: int

    def node(self, node_id: int) -> CondensedNode:
        return self.nodes[node_id]

    def to_json(self) -> str:
        payload = []
        for n in sorted(self.nodes.values(), key=lambda x: x.id):
            payload.append(
                {
                    "id": n.id,
                    "parent": n.parent,
                    "lambda_birth": n.birth,
                    "lambda_death": n.death,
                    "size": n.size,
                    "stability": n.stability,
                    "children": sorted(n.children),
                    "points": [[int(p), lam] for p, lam in sorted(n.points)],
                }
            )
        return json.dumps({"root": self.root, "n_points": self.n_points, "nodes": payload}, indent=1)


def _single_linkage(edges: np.ndarray, n: int):
    """Union-find pass over ascending edges; returns the binary merge tree as
    (children pairs, merge eps, leaf counts) indexed by internal node id n..2n-2."""
    order = np.lexsort((edges[:, 1], edges[:, 0], edges[:, 2]))
    parent = np.arange(2 * n - 1)
    # current representative component root for each union-find class
    rep = np.arange(n)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    children = np.zeros((n - 1, 2), dtype=int)
    eps = np.zeros(n - 1)
    count = np.ones(2 * n - 1, dtype=int)
    next_id = n
    for e in order:
        u, v, w = edges[e]
        ru, rv = find(int(u)), find(int(v))
        a, b = rep[ru], rep[rv]
        children[next_id - n] = (a, b)
        eps[next_id - n] = w
        count[next_id] = count[a] + count[b]
        # merge classes and point the surviving class at the new node
        parent[rv] = ru
        rep[ru] = next_id
        next_id += 1
    return children, eps, count


def condense(edges: np.ndarray, n: int, omega: int) -> CondensedTree:
    """Collapse the single-linkage tree under minimum cluster size ``omega``.

    Splits with both sides >= omega become true splits (two child clusters
    born at that lambda); a single small side sheds its points while the
    parent survives; two small sides end the parent outright.
    """
    if omega < 2:
        raise ValueError("minimum cluster size must be >= 2")
    if n == 1:
        node = CondensedNode(id=0, parent=None, birth=0.0, death=0.0, size=1, points=[(0, 0.0)])
        return CondensedTree(nodes={0: node}, root=0, n_points=1)
    children, eps, count = _single_linkage(edges, n)

    def leaves_under(v):
        stack, out = [v], []
        while stack:
            x = stack.pop()
            if x < n:
                out.append(x)
            else:
                stack.extend(children[x - n])
        return out

    nodes = {}
    next_cluster = [0]

    def new_cluster(parent, birth, size):
        cid = next_cluster[0]
        next_cluster[0] += 1
        nodes[cid] = CondensedNode(id=cid, parent=parent, birth=birth, death=birth, size=size)
        return cid

    root_sl = 2 * n - 2
    root = new_cluster(None, 0.0, n)
    # walk (single-linkage node, condensed cluster carrying it)
    stack = [(root_sl, root)]
    while stack:
        v, cid = stack.pop()
        node = nodes[cid]
        if v < n:
            node.points.append((v, node.death))
            continue
        left, right = children[v - n]
        lam = 1.0 / max(eps[v - n], _EPS_FLOOR)
        sl, sr = count[left], count[right]
        if sl >= omega and sr >= omega:
            node.death = lam
            cl = new_cluster(cid, lam, int(sl))
            cr = new_cluster(cid, lam, int(sr))
            node.children = (cl, cr)
            stack.append((left, cl))
            stack.append((right, cr))
        elif sl >= omega or sr >= omega:
            big, small = (left, right) if sl >= omega else (right, left)
            node.death = max(node.death, lam)
            for p in leaves_under(small):
                node.points.append((p, lam))
            stack.append((big, cid))
        else:
            node.death = max(node.death, lam)
            for p in leaves_under(v):
                node.points.append((p, lam))

    for node in nodes.values():
        sigma = sum(lam - node.birth for _, lam in node.points)
        for c in node.children:
            sigma += (nodes[c].birth - node.birth) * nodes[c].size
        node.stability = sigma
    return CondensedTree(nodes=nodes, root=root, n_points=n)


def extract(tree: CondensedTree) -> list:
    """Stability-maximizing antichain, bottom-up.

    A node is kept when its own stability strictly exceeds the total of the
    best selections inside its children; ties go to the children.
    """
    best: dict = {}
    chosen: dict = {}

    def visit(cid):
        node = tree.node(cid)
        child_total = 0.0
        child_sets: list = []
        for c in node.children:
            visit(c)
            child_total += best[c]
            child_sets.extend(chosen[c])
        if not node.children or node.stability > child_total:
            best[cid] = node.stability
            chosen[cid] = [cid]
        else:
            best[cid] = child_total
            chosen[cid] = child_sets

    visit(tree.root)
    return sorted(chosen[tree.root])


def _label_points(tree: CondensedTree, selected, algorithm: str) -> Partition:
    labels = np.full(tree.n_points, OUTLIER, dtype=int)
    selected_set = set(selected)
    # order clusters by smallest member row for stable, compact labels
    member_lists = []
    for cid in selected:
        rows = []
        stack = [cid]
        while stack:
            x = stack.pop()
            node = tree.node(x)
            rows.extend(p for p, _ in node.points)
            stack.extend(node.children)
        member_lists.append(sorted(rows))
    member_lists.sort(key=lambda rows: rows[0] if rows else tree.n_points)
    for lab, rows in enumerate(member_lists):
        labels[rows] = lab
    return Partition(labels=labels, algorithm=algorithm)


def condense_and_extract(edges: np.ndarray, n: int, omega: int, algorithm: str = "hdbscan"):
    tree = condense(edges, n, omega)
    selected = extract(tree)
    return tree, _label_points(tree, selected, algorithm)


def hdbscan(D: DistanceMatrix, omega: int, core_k: int | None = None):
    """Full chain on a precomputed distance matrix; returns (Partition, tree).

    ``core_k`` defaults to omega (capped at n-1), the upstream convention.
    """
    k = min(omega if core_k is None else core_k, D.n - 1)
    core = core_distances(D, k)
    reach = mutual_reachability(D, core)
    edges = mst(reach)
    tree, part = condense_and_extract(edges, D.n, omega, algorithm=f"hdbscan(omega={omega})")
    return part, tree


@dataclass
class DenseClusResult:
    partition: Partition
    tree: CondensedTree
    embedding: "Embedding"


def denseclus(
    d: MixedDataset,
    omega: int | None = None,
    k_nn: int = 15,
    m: int = 5,
    epochs: int = 200,
    seed: int = 0,
) -> DenseClusResult:
    """UMAP to ``m`` dimensions, then HDBSCAN on the embedding's Euclidean
    distances. The embedding dimension default (5) favors density estimation
    over plotting; pass m=2 for figures.

    ``omega`` defaults to max(15, n // 20): the stochastic layout leaves
    small density ripples inside each cluster, and a minimum size that grows
    with n keeps those ripples from surfacing as spurious splits."""
    from .dimred import umap

    if omega is None:
        omega = max(15, d.n_rows // 20)
    emb = umap(d, m=m, k=k_nn, epochs=epochs, seed=seed)
    D = embedding_distances(emb.coords)
    part, tree = hdbscan(D, omega=omega)
    part = Partition(labels=part.labels, algorithm=f"denseclus(omega={omega},k={k_nn},m={m})")
    return DenseClusResult(partition=part, tree=tree, embedding=emb)
