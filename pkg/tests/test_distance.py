"""Distance layer: mixed-penalty metric, overlap dissimilarity, matrices."""

import numpy as np
import pytest

import mixedclust as mc
from helpers import random_mixed


def _hand_dataset():
    X = np.array([[0.0, 1.0], [3.0, 5.0], [0.0, 1.0]])
    cats = [["a", "x"], ["b", "x"], ["a", "y"]]
    return mc.from_arrays(X, cats)


def test_mixed_distance_hand_values():
    d = _hand_dataset()
    # squared numeric gap + gamma per categorical mismatch
    assert mc.huang_distance(d, 0, 1, gamma=2.0) == pytest.approx(9.0 + 16.0 + 2.0 * 1)
    assert mc.huang_distance(d, 0, 2, gamma=2.0) == pytest.approx(0.0 + 2.0 * 1)
    assert mc.huang_distance(d, 0, 0, gamma=2.0) == 0.0


def test_default_gamma_is_half_mean_sigma():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(40, 3)) * np.array([1.0, 2.0, 5.0])
    d = mc.from_arrays(X, [["a"] for _ in range(40)])
    expect = 0.5 * np.mean(X.std(axis=0))
    assert mc.default_gamma(d) == pytest.approx(expect, rel=1e-12)


def test_default_gamma_no_numerics_warns_and_returns_one():
    d = mc.from_arrays(np.zeros((5, 0)), [["a"], ["b"], ["a"], ["b"], ["a"]])
    with pytest.warns(UserWarning):
        assert mc.default_gamma(d) == 1.0


def test_overlap_dissimilarity_hand_values():
    X = np.array([[1.0, 10.0], [3.0, 30.0], [2.0, 20.0]])
    cats = [["a"], ["a"], ["b"]]
    d = mc.from_arrays(X, cats)
    # ranges: 2 and 20; rows 0,1: sims (1-1, 1-1, 1) -> 1 - 1/3
    assert mc.gower_dissimilarity(d, 0, 1) == pytest.approx(1 - 1 / 3)
    # rows 0,2: sims (0.5, 0.5, 0) -> 1 - 1/3
    assert mc.gower_dissimilarity(d, 0, 2) == pytest.approx(1 - 1 / 3)
    assert mc.gower_dissimilarity(d, 0, 0) == 0.0


def test_overlap_dissimilarity_missing_weights(tmp_path):
    path = tmp_path / "g.csv"
    path.write_text("a,b,c\n1.0,,x\n3.0,5.0,x\n")
    d = mc.load_csv(path)
    # column b missing in row 0 gets weight 0; range of a is 2
    assert mc.gower_dissimilarity(d, 0, 1) == pytest.approx(1 - (0.0 + 1.0) / 2)


def test_overlap_dissimilarity_no_shared_features_raises(tmp_path):
    path = tmp_path / "g2.csv"
    path.write_text("a,b\n1.0,\n,2.0\n")
    d = mc.load_csv(path)
    with pytest.raises(ValueError, match="comparable"):
        mc.gower_dissimilarity(d, 0, 1)


def test_overlap_literal_polarity_flag():
    X = np.array([[0.0], [1.0], [2.0]])
    d = mc.from_arrays(X, [["a"], ["a"], ["a"]])
    # corrected polarity: identical rows are similar
    assert mc.gower_dissimilarity(d, 0, 0) == 0.0
    # literal polarity treats the scaled gap itself as the similarity
    assert mc.gower_dissimilarity(d, 0, 2, literal=True) == pytest.approx(1 - (1.0 + 1.0) / 2)
    assert mc.gower_dissimilarity(d, 0, 1, literal=True) == pytest.approx(1 - (0.5 + 1.0) / 2)


def test_zero_range_column_gets_zero_weight():
    X = np.column_stack([np.ones(3), np.array([0.0, 1.0, 2.0])])
    d = mc.from_arrays(X, [["a"], ["a"], ["b"]])
    # constant column drops out of the weighted mean entirely
    assert mc.gower_dissimilarity(d, 0, 1) == pytest.approx(1 - (0.5 + 1.0) / 2)
    # rows 0,2 disagree on both live features: maximal dissimilarity
    assert mc.gower_dissimilarity(d, 0, 2) == pytest.approx(1.0)


def test_pairwise_matches_pointwise_loops():
    rng = np.random.default_rng(7)
    d = random_mixed(rng, 12, 3, 2)
    gamma = 0.7
    H = mc.pairwise(d, metric="huang", gamma=gamma)
    G = mc.pairwise(d, metric="gower")
    for i in range(12):
        for j in range(12):
            assert H.values[i, j] == pytest.approx(mc.huang_distance(d, i, j, gamma=gamma), abs=1e-9)
            assert G.values[i, j] == pytest.approx(mc.gower_dissimilarity(d, i, j), abs=1e-12)
    assert np.array_equal(H.values, H.values.T)
    assert np.all(np.diag(H.values) == 0)


def test_pairwise_euclid2_oracle():
    rng = np.random.default_rng(8)
    d = random_mixed(rng, 10, 4, 0)
    E = mc.pairwise(d, metric="euclid2")
    X = d.numeric_values
    direct = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    assert np.allclose(E.values, direct, atol=1e-9)


def test_pairwise_requires_complete_rows_for_mixed_metric(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("a,b\n1.0,x\n,y\n")
    d = mc.load_csv(path)
    with pytest.raises(ValueError, match="complete"):
        mc.pairwise(d, metric="huang")
    # the overlap metric absorbs missing cells through its weights
    G = mc.pairwise(d, metric="gower")
    assert G.values.shape == (2, 2)


def test_embedding_distances_oracle():
    from scipy.spatial.distance import cdist

    rng = np.random.default_rng(9)
    Y = rng.normal(size=(15, 3))
    D = mc.embedding_distances(Y)
    assert np.allclose(D.values, cdist(Y, Y), atol=1e-12)


def test_distance_matrix_validation():
    with pytest.raises(ValueError, match="symmetric"):
        mc.DistanceMatrix(values=np.array([[0.0, 1.0], [2.0, 0.0]]), metric_tag="x")
    with pytest.raises(ValueError, match="diagonal"):
        mc.DistanceMatrix(values=np.array([[1.0]]), metric_tag="x")
    with pytest.raises(ValueError, match="non-negative"):
        mc.DistanceMatrix(values=np.array([[0.0, -1.0], [-1.0, 0.0]]), metric_tag="x")


def test_distance_matrix_csv_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    d = random_mixed(rng, 8, 2, 1)
    D = mc.pairwise(d, metric="gower")
    path = tmp_path / "d.csv"
    D.save_csv(path)
    back = mc.DistanceMatrix.load_csv(path)
    assert np.array_equal(back.values, D.values)
