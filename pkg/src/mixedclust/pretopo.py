"""Pretopology-based clustering of mixed data.

A pretopological space pairs a family of weighted directed graphs (one per
feature family) with per-graph activation thresholds and a positive DNF over
the threshold predicates. Pseudoclosure expands a set by admitting outside
points whose summed edge weight into the set clears the thresholds; iterated
to a fixpoint it yields closures of high-density seeds, whose inclusion
structure forms a quasi-hierarchy and, through its leaves, a partition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import MixedDataset, standardize
from .distance import pairwise
from .labels import OUTLIER, Hierarchy, HierarchyNode, Partition, compact_labels


@dataclass(frozen=True)
class PretopoConfig:
    """Construction knobs; every invented rule sits behind one of these."""

    knn: int = 10
    edge_floor: float = 0.01
    threshold_quantile: float = 0.5
    seeds: int | None = None
    dnf: object = None
    merge_overlap: bool = False

    INI_KEYS = (
        ("knn", "knn", int),
        ("edge_floor", "edge_floor", float),
        ("threshold_quantile", "threshold_quantile", float),
        ("seeds", "seeds", int),
        ("dnf", "dnf", str),
        ("merge_overlap", "merge_overlap", lambda v: str(v).strip().lower() in ("1", "true", "yes", "on")),
    )

    @classmethod
    def from_ini_section(cls, section) -> "PretopoConfig":
        kwargs = {}
        for key, attr, cast in cls.INI_KEYS:
            if key in section:
                kwargs[attr] = cast(section[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class WeightedGraphFamily:
    """Same-universe weighted digraphs, one per feature family."""

    weights: tuple
    names: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.names) or not self.weights:
            raise ValueError("need one name per graph and at least one graph")
        n = self.weights[0].shape[0]
        for w in self.weights:
            if w.shape != (n, n):
                raise ValueError("all graphs must share the node universe")
            if (w < 0).any():
                raise ValueError("edge weights must be >= 0")

    @property
    def n(self) -> int:
        return self.weights[0].shape[0]


@dataclass(frozen=True)
class PretopoSpace:
    """Graph family + thresholds + positive DNF over the per-graph predicates."""

    family: WeightedGraphFamily
    thresholds: np.ndarray
    dnf: tuple

    def __post_init__(self):
        object.__setattr__(self, "thresholds", np.asarray(self.thresholds, dtype=float))
        if len(self.thresholds) != len(self.family.weights):
            raise ValueError("one threshold per graph required")
        if not self.dnf:
            raise ValueError("DNF must contain at least one clause")
        for clause in self.dnf:
            if not clause:
                raise ValueError("DNF clauses must be non-empty")
            for lit in clause:
                if not 0 <= lit < len(self.family.weights):
                    raise ValueError(f"DNF literal {lit} out of range")

    @property
    def n(self) -> int:
        return self.family.n


def _normalize_dnf(dnf, names: tuple) -> tuple:
    if dnf is None:
        return (tuple(range(len(names))),)
    if isinstance(dnf, str):
        clauses = []
        for part in dnf.split("|"):
            lits = [tok.strip() for tok in part.split("&")]
            clauses.append(lits)
        dnf = clauses
    index = {name: i for i, name in enumerate(names)}
    out = []
    for clause in dnf:
        lits = []
        for lit in clause:
            if isinstance(lit, str):
                if lit not in index:
                    raise ValueError(f"unknown graph name in DNF: {lit!r}")
                lits.append(index[lit])
            else:
                lits.append(int(lit))
        out.append(tuple(lits))
    return tuple(out)


def _sparsify_rows(W: np.ndarray, knn: int, edge_floor: float) -> np.ndarray:
    """Keep each node's knn strongest out-edges (ties -> lower column index)
    that also clear the floor; remaining entries drop to 0."""
    n = W.shape[0]
    kept = np.zeros_like(W)
    take = min(knn, n - 1)
    for i in range(n):
        order = np.argsort(-W[i], kind="stable")[:take]
        kept[i, order] = W[i, order]
    kept[kept < edge_floor] = 0.0
    return kept


def _threshold(W: np.ndarray, knn: int, quantile: float) -> float:
    """Quantile over nodes of the mean weight of each node's strongest kept
    out-edges (at most knn of them)."""
    n = W.shape[0]
    stats = np.zeros(n)
    for i in range(n):
        row = W[i][W[i] > 0]
        if row.size:
            row = np.sort(row)[::-1][: min(knn, row.size)]
            stats[i] = row.mean()
    return float(np.quantile(stats, quantile))


def build_space(d: MixedDataset, cfg: PretopoConfig | None = None) -> PretopoSpace:
    cfg = cfg or PretopoConfig()
    if d.has_missing:
        raise ValueError("pretopological construction requires complete cases")
    if cfg.knn < 1:
        raise ValueError("knn must be >= 1")
    n = d.n_rows
    graphs, names = [], []

    if d.n_numeric:
        Xs = standardize(d).numeric_values
        sq = ((Xs[:, None, :] - Xs[None, :, :]) ** 2).sum(axis=2)
        off = sq[~np.eye(n, dtype=bool)]
        sbar = float(off.mean()) if off.size and off.max() > 0 else 1.0
        W = np.exp(-sq / sbar)
        np.fill_diagonal(W, 0.0)
        graphs.append(_sparsify_rows(W, cfg.knn, cfg.edge_floor))
        names.append("num")

    if d.n_categorical:
        cats = d.categorical_values
        match = np.zeros((n, n))
        for q in range(d.n_categorical):
            match += cats[:, q][:, None] == cats[:, q][None, :]
        W = match / d.n_categorical
        np.fill_diagonal(W, 0.0)
        W[W < cfg.edge_floor] = 0.0
        graphs.append(W)
        names.append("cat")

    thresholds = np.array([_threshold(W, cfg.knn, cfg.threshold_quantile) for W in graphs])
    family = WeightedGraphFamily(weights=tuple(graphs), names=tuple(names))
    return PretopoSpace(family=family, thresholds=thresholds, dnf=_normalize_dnf(cfg.dnf, tuple(names)))


def pseudoclosure(space: PretopoSpace, A) -> frozenset:
    """A plus every outside point whose summed in-set weights satisfy the DNF."""
    members = sorted(A)
    if not members:
        return frozenset()
    if members[0] < 0 or members[-1] >= space.n:
        raise ValueError("set contains points outside the node universe")
    idx = np.asarray(members)
    sums = [W[:, idx].sum(axis=1) for W in space.family.weights]
    accept = np.zeros(space.n, dtype=bool)
    for clause in space.dnf:
        clause_ok = np.ones(space.n, dtype=bool)
        for lit in clause:
            clause_ok &= sums[lit] >= space.thresholds[lit]
        accept |= clause_ok
    accept[idx] = True
    return frozenset(np.flatnonzero(accept).tolist())


def _closure_detail(space: PretopoSpace, seed) -> tuple[frozenset, int]:
    current = frozenset(seed)
    if not current:
        raise ValueError("closure seed must be non-empty")
    for iteration in range(1, space.n + 1):
        grown = pseudoclosure(space, current)
        if grown == current:
            return current, iteration - 1
        current = grown
    return current, space.n


def closure(space: PretopoSpace, seed) -> frozenset:
    """Least pseudoclosure fixpoint containing the seed (<= |U| iterations)."""
    return _closure_detail(space, seed)[0]


def select_seeds(d: MixedDataset, space: PretopoSpace, n_seeds: int) -> list:
    """Highest-density points, greedily thinned by a Huang-distance floor.

    Density proxy = total out-weight across graphs. The floor is the median
    pairwise Huang distance: in multi-cluster data that sits in the
    between-cluster mass, so each admitted seed lands in a new dense region.
    Fewer than n_seeds may satisfy the floor.
    """
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    n = d.n_rows
    if n_seeds > n:
        raise ValueError(f"n_seeds must be <= n, got {n_seeds} with n={n}")
    proxy = np.sum([W.sum(axis=1) for W in space.family.weights], axis=0)
    order = np.argsort(-proxy, kind="stable")
    huang = pairwise(d, metric="huang").values
    floor = float(np.quantile(huang[np.triu_indices(n, k=1)], 0.5)) if n > 1 else 0.0

    picked: list[int] = []
    for i in order:
        if len(picked) == n_seeds:
            break
        if all(huang[i, j] >= floor for j in picked):
            picked.append(int(i))
    return [frozenset({i}) for i in picked]


def _jaccard(a: frozenset, b: frozenset) -> float:
    return len(a & b) / len(a | b)


def quasi_hierarchy(closures, seed_ids=None) -> Hierarchy:
    """Transitive reduction of the strict-inclusion DAG over distinct closures,
    hung under a virtual root; non-nested overlaps recorded as metadata."""
    if not closures:
        raise ValueError("need at least one closure")
    sets: list[frozenset] = []
    provenance: list[list] = []
    for pos, c in enumerate(closures):
        c = frozenset(c)
        tag = seed_ids[pos] if seed_ids is not None else pos
        try:
            at = sets.index(c)
            provenance[at].append(tag)
        except ValueError:
            sets.append(c)
            provenance.append([tag])

    m = len(sets)
    parents: dict[int, list[int]] = {i: [] for i in range(m)}
    for i in range(m):
        supersets = [j for j in range(m) if j != i and sets[i] < sets[j]]
        minimal = [
            j for j in supersets
            if not any(sets[j2] < sets[j] for j2 in supersets if j2 != j)
        ]
        parents[i] = sorted(minimal)

    root_id = m
    union = frozenset().union(*sets)
    nodes: dict[int, HierarchyNode] = {}
    children: dict[int, list[int]] = {i: [] for i in range(m + 1)}
    for i in range(m):
        for p in parents[i] or [root_id]:
            children[p].append(i)

    for i in range(m):
        overlap = {}
        for j in range(m):
            if j == i or sets[i] <= sets[j] or sets[j] <= sets[i]:
                continue
            if sets[i] & sets[j]:
                overlap[str(j)] = round(_jaccard(sets[i], sets[j]), 6)
        meta = {"seeds": sorted(provenance[i])}
        if overlap:
            meta["overlap"] = overlap
        first_parent = parents[i][0] if parents[i] else root_id
        if len(parents[i]) > 1:
            meta["parents"] = parents[i]
        nodes[i] = HierarchyNode(
            id=i, members=sets[i], scale=float(len(sets[i])),
            children=tuple(sorted(children[i])), parent=first_parent, meta=meta,
        )
    nodes[root_id] = HierarchyNode(
        id=root_id, members=union, scale=float(len(union)),
        children=tuple(sorted(children[root_id])), parent=None, meta={"virtual_root": True},
    )
    return Hierarchy(nodes=nodes, root=root_id)


def _merge_overlapping(closures: list, iterations: list, threshold: float = 0.9):
    """Union closures whose Jaccard overlap reaches the threshold."""
    merged = True
    while merged:
        merged = False
        for i in range(len(closures)):
            for j in range(i + 1, len(closures)):
                if _jaccard(closures[i], closures[j]) >= threshold:
                    closures[i] = closures[i] | closures[j]
                    iterations[i] = max(iterations[i], iterations[j])
                    del closures[j], iterations[j]
                    merged = True
                    break
            if merged:
                break
    return closures, iterations


def pretopomd(d: MixedDataset, cfg: PretopoConfig | None = None) -> tuple[Partition, Hierarchy]:
    """Seeds -> closures -> quasi-hierarchy -> leaf partition.

    Points inside several leaves go to the leaf with the largest summed
    in-weight (ties -> smaller leaf id); points in no closure are outliers.
    """
    cfg = cfg or PretopoConfig()
    space = build_space(d, cfg)
    n = d.n_rows
    n_seeds = cfg.seeds if cfg.seeds is not None else math.ceil(math.sqrt(n))
    seeds = select_seeds(d, space, min(n_seeds, n))

    # Pair each seed with its nearest Huang neighbor before closing. A lone
    # point often cannot clear both thresholds with a single edge (the cat
    # threshold in particular demands an exact row match), which freezes the
    # closure at the seed; a pair doubles every candidate's summed weight and
    # lets expansion start from partial matches.
    anchor_ids = [min(s) for s in seeds]
    if n > 1:
        huang = pairwise(d, metric="huang").values
        np.fill_diagonal(huang, np.inf)
        seeds = [s | {int(np.argmin(huang[min(s)]))} for s in seeds]

    closures, iterations, seed_ids = [], [], []
    for s, anchor in zip(seeds, anchor_ids):
        c, iters = _closure_detail(space, s)
        closures.append(c)
        iterations.append(iters)
        seed_ids.append(anchor)
    if cfg.merge_overlap:
        closures, iterations = _merge_overlapping(closures, iterations)

    hier = quasi_hierarchy(closures, seed_ids=seed_ids)
    iters_by_set: dict[frozenset, int] = {}
    for c, it in zip(closures, iterations):
        iters_by_set.setdefault(c, it)
    for node in hier.nodes.values():
        if node.id != hier.root:
            node.meta["iterations"] = iters_by_set[node.members]

    leaf_ids = sorted(node.id for node in hier.leaves() if node.id != hier.root)
    raw = np.full(n, OUTLIER, dtype=int)
    in_weight = {
        leaf: np.sum([W[sorted(hier.node(leaf).members), :].sum(axis=0) for W in space.family.weights], axis=0)
        for leaf in leaf_ids
    }

    leaves_under: dict[int, tuple] = {}

    def _leaves_under(nid: int) -> tuple:
        if nid not in leaves_under:
            node = hier.node(nid)
            if not node.children:
                leaves_under[nid] = (nid,)
            else:
                leaves_under[nid] = tuple(sorted({l for ch in node.children for l in _leaves_under(ch)}))
        return leaves_under[nid]

    inner_ids = [nid for nid in hier.nodes if nid != hier.root]
    for x in range(n):
        holders = [leaf for leaf in leaf_ids if x in hier.node(leaf).members]
        if not holders:
            # A point swallowed by a closure but left out of every minimal
            # one still belongs to a cluster: hand it to a leaf under its
            # smallest containing node(s), by in-weight.
            containing = [nid for nid in inner_ids if x in hier.node(nid).members]
            if not containing:
                continue
            minimal = [
                nid for nid in containing
                if not any(o != nid and hier.node(o).members < hier.node(nid).members for o in containing)
            ]
            holders = sorted({l for nid in minimal for l in _leaves_under(nid)})
        if len(holders) == 1:
            raw[x] = holders[0]
        else:
            scores = np.array([in_weight[leaf][x] for leaf in holders])
            raw[x] = holders[int(np.argmax(scores))]

    tag = (
        f"pretopomd(knn={cfg.knn}, edge_floor={cfg.edge_floor:g}, "
        f"threshold_quantile={cfg.threshold_quantile:g}, seeds={n_seeds}, "
        f"dnf={'|'.join('&'.join(space.family.names[i] for i in cl) for cl in space.dnf)}, "
        f"merge_overlap={cfg.merge_overlap})"
    )
    part = compact_labels(raw, algorithm=tag)
    return part, hier
