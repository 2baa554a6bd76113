"""Distance construction against brute-force references."""
import numpy as np
import pytest

import oracles
from embclust import (
    DistanceMatrix,
    EmbeddingSet,
    NeighborSets,
    jaccard_distance,
    k_reciprocal_neighbors,
    pairwise_euclidean,
)


def unit_rows(rng, n, dim):
    raw = rng.standard_normal((n, dim))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def two_blobs(rng, m, dim, spread=0.05):
    """Two tight antipodal blobs of m points each."""
    center = np.zeros(dim)
    center[0] = 1.0
    a = center + spread * rng.standard_normal((m, dim))
    b = -center + spread * rng.standard_normal((m, dim))
    raw = np.vstack([a, b])
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def test_euclidean_matches_double_loop():
    rng = np.random.default_rng(3)
    data = unit_rows(rng, 40, 8)
    got = pairwise_euclidean(EmbeddingSet(data))
    want = oracles.euclidean_oracle(data)
    assert np.max(np.abs(got.values - want)) < 1e-9
    assert got.kind == "euclidean"


def test_euclidean_is_chord_of_cosine():
    # for unit vectors d^2 = 2 - 2 cos
    rng = np.random.default_rng(4)
    data = unit_rows(rng, 25, 6)
    d = pairwise_euclidean(EmbeddingSet(data)).values
    cos = data @ data.T
    assert np.max(np.abs(d ** 2 - (2.0 - 2.0 * cos))) < 1e-9


def test_euclidean_exact_symmetry_and_zero_diagonal():
    rng = np.random.default_rng(5)
    d = pairwise_euclidean(EmbeddingSet(unit_rows(rng, 30, 5))).values
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0.0)


def test_k_reciprocal_matches_set_oracle():
    rng = np.random.default_rng(6)
    for trial in range(5):
        n = int(rng.integers(10, 60))
        k1 = int(rng.integers(1, n))
        data = unit_rows(rng, n, 6)
        dist = pairwise_euclidean(EmbeddingSet(data))
        got = k_reciprocal_neighbors(dist, k1)
        want = oracles.k_reciprocal_oracle(dist.values, k1)
        assert [set(s.tolist()) for s in got.sets] == want, f"trial {trial} k1={k1} n={n}"


def test_neighbors_contain_self():
    rng = np.random.default_rng(7)
    dist = pairwise_euclidean(EmbeddingSet(unit_rows(rng, 20, 4)))
    ns = k_reciprocal_neighbors(dist, 5)
    for i, s in enumerate(ns.sets):
        assert i in set(s.tolist())


def test_neighbors_stay_inside_blob():
    rng = np.random.default_rng(8)
    data = two_blobs(rng, 12, 6)
    dist = pairwise_euclidean(EmbeddingSet(data))
    ns = k_reciprocal_neighbors(dist, 6)
    for i, s in enumerate(ns.sets):
        side = set(range(12)) if i < 12 else set(range(12, 24))
        assert set(s.tolist()) <= side


def test_equidistant_triple_tie_break():
    # three unit vectors at mutual 120 degrees, every pair equidistant
    data = np.array(
        [
            [1.0, 0.0],
            [-0.5, np.sqrt(3.0) / 2.0],
            [-0.5, -np.sqrt(3.0) / 2.0],
        ]
    )
    dist = pairwise_euclidean(EmbeddingSet(data))
    ns = k_reciprocal_neighbors(dist, 1)
    got = [set(s.tolist()) for s in ns.sets]
    # ties resolve toward the smaller index, so 0 pairs with 1 and 2 stays alone
    assert got == [{0, 1}, {0, 1}, {2}]
    d = jaccard_distance(ns).values
    assert d[0, 1] == 0.0
    assert d[0, 2] == 1.0


def test_k1_bounds():
    rng = np.random.default_rng(9)
    dist = pairwise_euclidean(EmbeddingSet(unit_rows(rng, 10, 4)))
    with pytest.raises(ValueError):
        k_reciprocal_neighbors(dist, 0)
    with pytest.raises(ValueError):
        k_reciprocal_neighbors(dist, 10)


def test_k_reciprocal_requires_euclidean_input():
    values = np.zeros((3, 3))
    jac = DistanceMatrix(values=values, kind="jaccard")
    with pytest.raises(ValueError):
        k_reciprocal_neighbors(jac, 1)


def test_jaccard_matches_set_oracle():
    rng = np.random.default_rng(10)
    data = unit_rows(rng, 35, 6)
    ns = k_reciprocal_neighbors(pairwise_euclidean(EmbeddingSet(data)), 7)
    got = jaccard_distance(ns).values
    want = oracles.jaccard_oracle([set(s.tolist()) for s in ns.sets])
    assert np.max(np.abs(got - want)) == 0.0
    assert jaccard_distance(ns).kind == "jaccard"


def test_jaccard_zero_iff_equal_sets():
    sets = (np.array([0, 1]), np.array([0, 1]), np.array([1, 2]))
    ns = NeighborSets(k1=1, sets=sets)
    d = jaccard_distance(ns).values
    assert d[0, 1] == 0.0
    assert d[0, 2] > 0.0
    assert d[1, 2] > 0.0


def test_jaccard_range_and_symmetry():
    rng = np.random.default_rng(11)
    data = unit_rows(rng, 50, 8)
    d = jaccard_distance(k_reciprocal_neighbors(pairwise_euclidean(EmbeddingSet(data)), 12))
    assert np.all(d.values >= 0.0)
    assert np.all(d.values <= 1.0)
    assert np.array_equal(d.values, d.values.T)


def test_distance_matrix_validation():
    with pytest.raises(ValueError):
        DistanceMatrix(values=np.zeros((2, 3)), kind="euclidean")
    asym = np.zeros((2, 2))
    asym[0, 1] = 1.0
    with pytest.raises(ValueError):
        DistanceMatrix(values=asym, kind="euclidean")
    neg = np.zeros((2, 2))
    neg[0, 1] = neg[1, 0] = -0.5
    with pytest.raises(ValueError):
        DistanceMatrix(values=neg, kind="euclidean")
    over = np.zeros((2, 2))
    over[0, 1] = over[1, 0] = 1.5
    with pytest.raises(ValueError):
        DistanceMatrix(values=over, kind="jaccard")
