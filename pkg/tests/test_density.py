"""Density clustering chain: core distances, MST, condensed tree, labels."""

import json

import numpy as np
import pytest
from scipy.sparse.csgraph import minimum_spanning_tree

import mixedclust as mc
from helpers import (
    best_antichain_total,
    covers_all_leaves,
    exhaustive_min_spanning_weight,
    is_spanning_tree,
    masked_ari,
    random_condensed_tree,
    random_mixed,
)


def test_core_distances_kth_neighbor():
    rng = np.random.default_rng(0)
    d = random_mixed(rng, 20, 3, 0)
    D = mc.pairwise(d, metric="huang")
    k = 4
    core = mc.core_distances(D, k)
    vals = D.values.copy()
    np.fill_diagonal(vals, np.inf)
    expect = np.sort(vals, axis=1)[:, k - 1]
    assert np.allclose(core, expect, atol=1e-12)


def test_mutual_reachability_formula():
    rng = np.random.default_rng(1)
    d = random_mixed(rng, 15, 2, 1)
    D = mc.pairwise(d, metric="huang")
    core = mc.core_distances(D, 3)
    M = mc.mutual_reachability(D, core)
    for i in range(15):
        for j in range(15):
            if i == j:
                assert M.values[i, j] == 0.0
            else:
                expect = max(core[i], core[j], D.values[i, j])
                assert M.values[i, j] == pytest.approx(expect, abs=1e-12)


def test_mst_against_scipy_total_weight():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(5, 30))
        pts = rng.normal(size=(n, 2))
        W = np.sqrt(((pts[:, None] - pts[None, :]) ** 2).sum(2))
        D = mc.DistanceMatrix(values=W, metric_tag="test")
        edges = mc.mst(D)
        assert is_spanning_tree(edges, n)
        scipy_total = minimum_spanning_tree(W).sum()
        assert edges[:, 2].sum() == pytest.approx(scipy_total, rel=1e-10)


def test_mst_output_ordering_and_determinism():
    rng = np.random.default_rng(3)
    W = rng.uniform(1, 2, size=(8, 8))
    W = (W + W.T) / 2
    np.fill_diagonal(W, 0.0)
    a = mc.mst(W)
    b = mc.mst(W)
    assert np.array_equal(a, b)
    # insertion order: each edge grows the tree from already-reached nodes
    reached = {0}
    for u, v, _ in a:
        assert int(u) in reached
        reached.add(int(v))
    assert reached == set(range(8))
    # an all-ties matrix still yields one deterministic tree
    ones = np.ones((6, 6)) - np.eye(6)
    assert np.array_equal(mc.mst(ones), mc.mst(ones))


def test_mst_exhaustive_small_cases():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = int(rng.integers(3, 8))
        W = rng.integers(1, 64, size=(n, n)) / 16.0
        W = np.triu(W, 1)
        W = W + W.T
        total = mc.mst(W)[:, 2].sum()
        assert total == exhaustive_min_spanning_weight(W)


def test_condense_two_clear_clusters():
    # two tight triples bridged by one long edge
    pts = np.array([0.0, 0.1, 0.2, 10.0, 10.1, 10.2])
    D = np.abs(pts[:, None] - pts[None, :])
    edges = mc.mst(D)
    tree = mc.condense(edges, 6, omega=2)
    root = tree.node(tree.root)
    assert len(root.children) == 2
    kids = [tree.node(c) for c in root.children]
    assert sorted(k.size for k in kids) == [3, 3]
    # every point falls out of exactly one node
    seen = sorted(p for nid in tree.nodes for p, _ in tree.node(nid).points)
    assert seen == list(range(6))
    assert all(tree.node(nid).stability >= 0 for nid in tree.nodes)
    parsed = json.loads(tree.to_json())
    assert len(parsed["nodes"]) == len(tree.nodes)


def test_condense_small_side_dissolves():
    # a pair below omega=3 cannot form its own cluster
    pts = np.array([0.0, 0.1, 10.0, 10.1, 10.2, 20.0])
    D = np.abs(pts[:, None] - pts[None, :])
    edges = mc.mst(D)
    tree = mc.condense(edges, 6, omega=3)
    sizes = sorted(tree.node(nid).size for nid in tree.nodes if nid != tree.root)
    assert all(s >= 3 for s in sizes)


def test_extraction_matches_exhaustive_antichains():
    rng = np.random.default_rng(5)
    for _ in range(25):
        tree = random_condensed_tree(rng, int(rng.integers(2, 13)))
        selected = mc.extract(tree)
        total = sum(tree.node(c).stability for c in selected)
        assert total == best_antichain_total(tree)
        assert covers_all_leaves(tree, selected)


def test_hdbscan_two_blobs():
    rng = np.random.default_rng(6)
    X = np.vstack([rng.normal(0, 0.3, (40, 2)), rng.normal(8, 0.3, (40, 2))])
    D = mc.embedding_distances(X)
    part, tree = mc.hdbscan(D, omega=10)
    assert part.k == 2
    assert part.outlier_fraction < 0.1
    truth = np.repeat([0, 1], 40)
    assert masked_ari(truth, part.labels) == 1.0
    assert isinstance(tree, mc.CondensedTree)


def test_denseclus_recovers_generated_clusters():
    lab = mc.generate(mc.GeneratorConfig(n_samples=300, k_clusters=3, n_numeric=4, n_categorical=3, cluster_std=0.05, rng_seed=1))
    result = mc.denseclus(lab.data, seed=0)
    assert masked_ari(lab.truth, result.partition.labels) == 1.0
    assert result.partition.outlier_fraction <= 0.05
    assert result.embedding.coords.shape == (300, 5)
    assert result.partition.k == 3


def test_denseclus_adaptive_min_cluster_size():
    lab = mc.generate(mc.GeneratorConfig(n_samples=400, k_clusters=2, n_numeric=3, n_categorical=2, cluster_std=0.05, rng_seed=3))
    result = mc.denseclus(lab.data, seed=0)
    # default omega scales with n: max(15, n // 20)
    assert "omega=20" in result.partition.algorithm


def test_condensed_tree_json_structure():
    rng = np.random.default_rng(7)
    tree = random_condensed_tree(rng, 6)
    parsed = json.loads(tree.to_json())
    assert parsed["root"] == 0
    assert {int(k) for k in parsed["nodes"]} == set(range(6))
