"""Embeddings: factorial analysis, spectral maps, neighbor-graph methods."""

import numpy as np
import pytest
import scipy.linalg

import mixedclust as mc
from mixedclust.dimred.pacmap import pair_grad, pair_loss, sample_pairs
from mixedclust.dimred.umap import attract_grad, attract_loss, repel_grad, repel_loss
from helpers import random_mixed


def _encode_oracle(d):
    """Re-derive the factorial design matrix from raw arrays: z-scored
    numerics, centered indicators scaled by 1/sqrt(level share)."""
    X = d.numeric_values
    mu, sd = X.mean(0), X.std(0)
    sd = np.where(sd == 0, 1.0, sd)
    blocks = [(X - mu) / sd]
    n = d.n_rows
    for q in range(d.n_categorical):
        codes = d.categorical_values[:, q]
        levels = len(d.levels[q])
        ind = np.zeros((n, levels))
        ind[np.arange(n), codes] = 1.0
        p = ind.mean(0)
        blocks.append((ind - p) / np.sqrt(p))
    return np.column_stack(blocks)


def test_encode_matches_reconstruction():
    rng = np.random.default_rng(0)
    d = random_mixed(rng, 30, 3, 2, levels=3)
    Z = mc.encode(d)
    assert np.allclose(Z, _encode_oracle(d), atol=1e-10)


def test_encoded_rank_counts_dimensions():
    rng = np.random.default_rng(1)
    d = random_mixed(rng, 40, 3, 2, levels=4)
    # 3 numerics plus (levels - 1) per categorical actually observed
    expect = 3 + sum(len(lv) - 1 for lv in d.levels)
    assert mc.encoded_rank(d) == expect


def test_famd_matches_independent_svd():
    rng = np.random.default_rng(2)
    d = random_mixed(rng, 50, 3, 2, levels=3)
    emb = mc.famd(d, 2)
    Z = _encode_oracle(d)
    n = Z.shape[0]
    U, S, Vt = np.linalg.svd(Z / np.sqrt(n), full_matrices=False)
    scores = np.sqrt(n) * U[:, :2] * S[:2]
    # align per-component signs before comparing
    for j in range(2):
        if np.dot(scores[:, j], emb.coords[:, j]) < 0:
            scores[:, j] = -scores[:, j]
    assert np.allclose(emb.coords, scores, atol=1e-8)
    lam = S**2
    assert emb.explained_inertia == pytest.approx(lam[:2].sum() / lam.sum(), abs=1e-10)
    # total inertia equals the average squared row norm of the design matrix
    assert lam.sum() == pytest.approx((Z**2).sum() / n, rel=1e-10)


def test_famd_numeric_only_equals_pca():
    from sklearn.decomposition import PCA

    rng = np.random.default_rng(3)
    X = rng.normal(size=(40, 5)) @ np.diag([3.0, 2.0, 1.0, 0.5, 0.2])
    d = mc.from_arrays(X)
    emb = mc.famd(d, 3)
    Z = (X - X.mean(0)) / X.std(0)
    ref = PCA(n_components=3, svd_solver="full").fit_transform(Z)
    for j in range(3):
        if np.dot(ref[:, j], emb.coords[:, j]) < 0:
            ref[:, j] = -ref[:, j]
    assert np.allclose(emb.coords, ref, atol=1e-8)


def test_famd_deterministic_sign_convention():
    rng = np.random.default_rng(4)
    d = random_mixed(rng, 25, 2, 1)
    a = mc.famd(d, 2)
    b = mc.famd(d, 2)
    assert np.array_equal(a.coords, b.coords)


def test_famd_embedding_contract():
    rng = np.random.default_rng(5)
    d = random_mixed(rng, 20, 2, 1)
    emb = mc.famd(d, 2)
    assert emb.method == "famd"
    assert emb.explained_inertia is not None
    assert 0 < emb.explained_inertia <= 1
    with pytest.raises(ValueError, match="explained_inertia"):
        mc.Embedding(coords=np.zeros((3, 2)), method="umap", explained_inertia=0.5)


def test_embedding_csv_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    emb = mc.famd(random_mixed(rng, 15, 2, 1), 2)
    path = tmp_path / "e.csv"
    emb.save_csv(path)
    back = mc.load_embedding_csv(path)
    assert np.allclose(back.coords, emb.coords, atol=1e-12)
    assert back.method == "loaded"
    assert back.params["original_method"] == "famd"


def test_spectral_coordinates_solve_generalized_problem():
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(25, 2))
    W = np.exp(-((pts[:, None, :] - pts[None, :, :]) ** 2).sum(2))
    np.fill_diagonal(W, 0.0)
    coords, vals = mc.spectral_coordinates(W, 3)
    deg = W.sum(1)
    L = np.diag(deg) - W
    D = np.diag(deg)
    for j in range(3):
        f = coords[:, j]
        assert np.max(np.abs(L @ f - vals[j] * (D @ f))) < 1e-8
    # the trivial constant eigenvector is excluded
    full = scipy.linalg.eigh(L, D, eigvals_only=True)
    assert np.allclose(np.sort(vals), full[1:4], atol=1e-8)


def test_laplacian_eigenmaps_residual_and_params():
    rng = np.random.default_rng(8)
    d = random_mixed(rng, 30, 2, 1)
    emb = mc.laplacian_eigenmaps(d, 2, t=1.5)
    W = np.exp(-mc.pairwise(d, metric="huang").values / 1.5)
    np.fill_diagonal(W, 0.0)
    deg = W.sum(1)
    L, D = np.diag(deg) - W, np.diag(deg)
    vals = emb.params["eigenvalues"]
    assert len(vals) == 2
    for j in range(2):
        f = emb.coords[:, j]
        assert np.max(np.abs(L @ f - vals[j] * (D @ f))) < 1e-8
    assert emb.explained_inertia is None


def test_laplacian_eigenmaps_guards():
    rng = np.random.default_rng(9)
    d = random_mixed(rng, 30, 2, 1)
    with pytest.raises(ValueError, match="t must be positive"):
        mc.laplacian_eigenmaps(d, 2, t=0.0)
    # far-flung rows underflow the affinity kernel at tiny t
    far = mc.from_arrays(np.array([[0.0], [1e6], [2e6], [3e6], [4e6]]))
    with pytest.raises(ValueError, match="increase t"):
        mc.laplacian_eigenmaps(far, 1, t=1e-3)


def test_neighbor_graph_calibration_and_symmetrization():
    rng = np.random.default_rng(10)
    d = random_mixed(rng, 40, 3, 1)
    k = 8
    g = mc.build_neighbor_graph(d, k)
    H = mc.pairwise(d, metric="huang").values
    # per-row similarity mass is bisected onto log2(k)
    assert np.allclose(g.sim_sums, np.log2(k), atol=1e-6)
    # neighbors are the k nearest by the mixed metric
    vals = H.copy()
    np.fill_diagonal(vals, np.inf)
    for i in range(40):
        expect = set(np.argsort(vals[i], kind="stable")[:k])
        assert set(g.neighbors[i]) == expect
    # fuzzy union: W = S + S^T - S o S^T, symmetric with unit-capped entries
    S = g.sims
    assert np.allclose(g.weights, S + S.T - S * S.T, atol=1e-12)
    assert np.allclose(g.weights, g.weights.T)
    assert g.weights.max() <= 1.0 + 1e-12


def test_neighbor_graph_guards():
    rng = np.random.default_rng(11)
    d = random_mixed(rng, 10, 2, 0)
    with pytest.raises(ValueError, match="k must be"):
        mc.build_neighbor_graph(d, 1)
    with pytest.raises(ValueError, match="k must be"):
        mc.build_neighbor_graph(d, 10)
    same = mc.from_arrays(np.zeros((5, 2)))
    with pytest.raises(ValueError, match="identical"):
        mc.build_neighbor_graph(same, 2)


def test_umap_pair_gradients_match_finite_differences():
    rng = np.random.default_rng(12)
    for _ in range(5):
        y_a = rng.normal(size=2) * 2
        y_b = y_a + rng.normal(size=2)
        for loss, grad in ((attract_loss, attract_grad),
                           (repel_loss, repel_grad)):
            g = grad(y_a, y_b)
            fd = np.zeros(2)
            eps = 1e-6
            for j in range(2):
                step = np.zeros(2)
                step[j] = eps
                fd[j] = (loss(y_a + step, y_b) - loss(y_a - step, y_b)) / (2 * eps)
            assert np.allclose(g, fd, atol=1e-5)


def test_umap_shapes_determinism_and_seed_sensitivity():
    rng = np.random.default_rng(13)
    d = random_mixed(rng, 60, 3, 1)
    a = mc.umap(d, m=2, k=10, epochs=30, seed=0)
    b = mc.umap(d, m=2, k=10, epochs=30, seed=0)
    c = mc.umap(d, m=2, k=10, epochs=30, seed=1)
    assert a.coords.shape == (60, 2)
    assert np.array_equal(a.coords, b.coords)
    assert not np.array_equal(a.coords, c.coords)
    assert a.method == "umap"
    with pytest.raises(ValueError, match="epochs"):
        mc.umap(d, epochs=0)


def test_umap_embedding_supports_kmeans_recovery():
    from sklearn.cluster import KMeans
    from sklearn.metrics import adjusted_rand_score

    lab = mc.generate(mc.GeneratorConfig(n_samples=500, k_clusters=3, n_numeric=5, n_categorical=5, cluster_std=0.1, rng_seed=1))
    emb = mc.umap(lab.data, m=2, k=15, epochs=200, seed=0)
    km = KMeans(3, n_init=5, random_state=0).fit_predict(emb.coords)
    assert adjusted_rand_score(lab.truth, km) > 0.8


def test_pacmap_weight_schedule():
    assert mc.pacmap_weights(1) == (2.0, 1000.0, 1.0)
    assert mc.pacmap_weights(100) == (2.0, 3.0, 1.0)
    assert mc.pacmap_weights(150) == (3.0, 3.0, 1.0)
    assert mc.pacmap_weights(200) == (3.0, 3.0, 1.0)
    assert mc.pacmap_weights(201) == (1.0, 0.0, 1.0)
    assert mc.pacmap_weights(450) == (1.0, 0.0, 1.0)
    mids = [mc.pacmap_weights(t)[1] for t in range(1, 101)]
    assert all(x >= y for x, y in zip(mids, mids[1:]))
    with pytest.raises(ValueError):
        mc.pacmap_weights(0)


def test_pacmap_pair_gradients_match_finite_differences():
    rng = np.random.default_rng(14)
    for kind in ("neighbor", "mid", "far"):
        for _ in range(4):
            y_a = rng.normal(size=2) * 2
            y_b = y_a + rng.normal(size=2)
            w = float(rng.uniform(0.5, 3.0))
            g = pair_grad(y_a, y_b, kind, weight=w)
            fd = np.zeros(2)
            eps = 1e-6
            for j in range(2):
                step = np.zeros(2)
                step[j] = eps
                fd[j] = (
                    pair_loss(y_a + step, y_b, kind, weight=w)
                    - pair_loss(y_a - step, y_b, kind, weight=w)
                ) / (2 * eps)
            assert np.allclose(g, fd, atol=1e-5)


def test_pacmap_pair_sampling_structure():
    rng = np.random.default_rng(15)
    d = random_mixed(rng, 30, 3, 0)
    D = mc.pairwise(d, metric="huang").values
    pairs = sample_pairs(D, 4, 3, 6, np.random.default_rng(0))
    assert pairs.neighbors.shape == (30, 4)
    assert pairs.mid_near.shape == (30, 3)
    assert pairs.far.shape[0] == 30
    vals = D.copy()
    np.fill_diagonal(vals, np.inf)
    for i in range(30):
        assert set(pairs.neighbors[i]) == set(np.argsort(vals[i], kind="stable")[:4])
        assert i not in pairs.mid_near[i]
        # far pairs avoid the row itself and its neighbor set
        assert not (set(pairs.far[i]) & (set(pairs.neighbors[i]) | {i}))


def test_pacmap_runs_and_records_loss_trace():
    rng = np.random.default_rng(16)
    d = random_mixed(rng, 40, 3, 1)
    emb = mc.pacmap(d, m=2, iters=40, seed=0)
    assert emb.coords.shape == (40, 2)
    assert emb.method == "pacmap"
    trace = emb.params["loss_trace"]
    assert len(trace) == 40
    assert all(np.isfinite(v) for v in trace)
    again = mc.pacmap(d, m=2, iters=40, seed=0)
    assert np.array_equal(emb.coords, again.coords)


def test_pacmap_tracks_umap_on_many_blob_case():
    from sklearn.cluster import KMeans
    from sklearn.metrics import davies_bouldin_score

    rng = np.random.default_rng(0)
    centers = rng.normal(0.0, 1.0, (10, 300))
    X = np.vstack([c + rng.normal(0.0, 0.1, (30, 300)) for c in centers])
    d = mc.from_arrays(X)
    e_pac = mc.pacmap(d, m=2, iters=450, seed=0)
    e_map = mc.umap(d, m=2, k=15, epochs=200, seed=0)
    db_pac = davies_bouldin_score(e_pac.coords, KMeans(10, n_init=5, random_state=0).fit_predict(e_pac.coords))
    db_map = davies_bouldin_score(e_map.coords, KMeans(10, n_init=5, random_state=0).fit_predict(e_map.coords))
    assert db_pac <= 1.5 * db_map


def test_pacmap_phase3_loss_decreases():
    rng = np.random.default_rng(17)
    d = mc.from_arrays(rng.normal(size=(60, 4)), [[f"l{i % 3}"] for i in range(60)])
    emb = mc.pacmap(d, m=2, iters=450, seed=0)
    trace = emb.params["loss_trace"]
    assert len(trace) == 450
    assert all(np.isfinite(v) for v in trace)
    # the far-pair-only phase must not drift the layout uphill
    assert trace[-1] <= trace[200]


def test_famd_inertia_invariants():
    rng = np.random.default_rng(18)
    d = random_mixed(rng, 45, 3, 2, levels=3)
    emb = mc.famd(d, 2)
    lam = np.array(emb.params["eigenvalues"])
    assert np.all(np.diff(lam) <= 1e-12)
    shares = lam / lam.sum()
    assert shares.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(emb.coords.mean(axis=0), 0.0, atol=1e-10)
    with pytest.raises(ValueError, match="exceeds"):
        mc.famd(d, mc.encoded_rank(d) + 1)


def test_penguins_famd_inertia_band(penguins):
    emb = mc.famd(penguins, 2)
    assert 0.55 < emb.explained_inertia < 0.70
