"""Density clustering against a graph-components reference."""
import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

import oracles
from embclust import Clustering, DistanceMatrix, EmbeddingSet, OUTLIER, dbscan, pairwise_euclidean, remove_clusters
from embclust.dbscan import canonicalize, canonicalize_labels


def unit_rows(rng, n, dim):
    raw = rng.standard_normal((n, dim))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def random_distance(rng, n, dim=8):
    return pairwise_euclidean(EmbeddingSet(unit_rows(rng, n, dim)))


def core_mask(values, eps, min_pts):
    return (values <= eps).sum(axis=1) >= min_pts


def test_two_blobs_two_clusters():
    rng = np.random.default_rng(20)
    a = np.array([1.0, 0, 0, 0]) + 0.02 * rng.standard_normal((10, 4))
    b = np.array([0, 1.0, 0, 0]) + 0.02 * rng.standard_normal((10, 4))
    raw = np.vstack([a, b])
    data = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    c = dbscan(pairwise_euclidean(EmbeddingSet(data)), eps=0.3, min_pts=3)
    assert c.K == 2
    assert np.all(c.labels[:10] == 0)
    assert np.all(c.labels[10:] == 1)


def test_core_partition_matches_components_oracle():
    rng = np.random.default_rng(21)
    for _ in range(10):
        n = int(rng.integers(20, 80))
        dist = random_distance(rng, n)
        eps = float(rng.uniform(0.3, 1.2))
        min_pts = int(rng.integers(1, 6))
        c = dbscan(dist, eps, min_pts)
        want = oracles.core_partition_oracle(dist.values, eps, min_pts)
        cores = np.flatnonzero(core_mask(dist.values, eps, min_pts))
        got = set()
        for k in set(c.labels[cores].tolist()):
            got.add(frozenset(int(i) for i in cores if c.labels[i] == k))
        assert got == want


def test_core_partition_matches_scipy_components():
    rng = np.random.default_rng(22)
    dist = random_distance(rng, 60)
    eps, min_pts = 0.8, 4
    c = dbscan(dist, eps, min_pts)
    cores = np.flatnonzero(core_mask(dist.values, eps, min_pts))
    adj = (dist.values[np.ix_(cores, cores)] <= eps).astype(np.int8)
    _, comp = connected_components(csr_matrix(adj), directed=False)
    for x in range(cores.size):
        for y in range(cores.size):
            same_comp = comp[x] == comp[y]
            same_cluster = c.labels[cores[x]] == c.labels[cores[y]]
            assert same_comp == same_cluster


def test_labels_are_canonical():
    rng = np.random.default_rng(23)
    for _ in range(5):
        c = dbscan(random_distance(rng, 50), 0.9, 3)
        seen = []
        for lab in c.labels:
            if lab >= 0 and lab not in seen:
                seen.append(lab)
        assert seen == list(range(c.K))


def test_border_joins_lowest_index_core():
    # two 4-cliques of cores with one shared border point between them
    n = 9
    left, bridge, right = [0, 1, 2, 3], 4, [5, 6, 7, 8]
    values = np.full((n, n), 0.9)
    np.fill_diagonal(values, 0.0)
    for grp in (left, right):
        for x in grp:
            for y in grp:
                if x != y:
                    values[x, y] = 0.2
    values[bridge, 0] = values[0, bridge] = 0.5
    values[bridge, 5] = values[5, bridge] = 0.5
    c = dbscan(DistanceMatrix(values=values, kind="euclidean"), eps=0.5, min_pts=4)
    # the bridge touches core 0 (cluster 0) and core 5 (cluster 1) but is no core itself
    assert c.K == 2
    assert c.labels[bridge] == c.labels[0] == 0
    assert c.labels[5] == 1


def test_every_cluster_contains_a_core():
    rng = np.random.default_rng(24)
    dist = random_distance(rng, 70)
    eps, min_pts = 0.7, 5
    c = dbscan(dist, eps, min_pts)
    cores = core_mask(dist.values, eps, min_pts)
    for k in range(c.K):
        assert cores[c.labels == k].any()


def test_growing_eps_never_splits_core_comemberships():
    rng = np.random.default_rng(25)
    dist = random_distance(rng, 60)
    min_pts = 3
    small = dbscan(dist, 0.5, min_pts)
    large = dbscan(dist, 0.8, min_pts)
    cores_small = np.flatnonzero(core_mask(dist.values, 0.5, min_pts))
    for x in cores_small:
        for y in cores_small:
            if small.labels[x] == small.labels[y]:
                assert large.labels[x] == large.labels[y]


def test_permutation_invariance_of_core_comembership():
    rng = np.random.default_rng(26)
    dist = random_distance(rng, 40)
    eps, min_pts = 0.8, 3
    perm = rng.permutation(40)
    permuted = DistanceMatrix(values=dist.values[np.ix_(perm, perm)], kind="euclidean")
    c0 = dbscan(dist, eps, min_pts)
    c1 = dbscan(permuted, eps, min_pts)
    cores = core_mask(dist.values, eps, min_pts)
    inv = np.empty(40, dtype=np.int64)
    inv[perm] = np.arange(40)
    for x in np.flatnonzero(cores):
        for y in np.flatnonzero(cores):
            same0 = c0.labels[x] == c0.labels[y]
            same1 = c1.labels[inv[x]] == c1.labels[inv[y]]
            assert same0 == same1


def test_min_pts_one_leaves_no_outliers():
    rng = np.random.default_rng(27)
    c = dbscan(random_distance(rng, 30), 0.05, 1)
    assert np.all(c.labels >= 0)


def test_eps_and_min_pts_validation():
    rng = np.random.default_rng(28)
    dist = random_distance(rng, 10)
    for eps in (0.0, -1.0, np.nan, np.inf):
        with pytest.raises(ValueError):
            dbscan(dist, eps, 2)
    with pytest.raises(ValueError):
        dbscan(dist, 0.5, 0)


def test_canonicalize_orders_by_first_member():
    labels = np.array([5, -1, 2, 5, 2, 9], dtype=np.int64)
    c = canonicalize_labels(labels)
    assert c.labels.tolist() == [0, -1, 1, 0, 1, 2]
    assert c.K == 3
    again = canonicalize(c)
    assert np.array_equal(again.labels, c.labels)


def test_canonicalize_rejects_labels_below_outlier():
    with pytest.raises(ValueError):
        canonicalize_labels(np.array([0, -2], dtype=np.int64))


def test_remove_clusters():
    labels = np.array([0, 0, 1, 1, 2, -1], dtype=np.int64)
    c = Clustering(labels=labels, K=3)
    out = remove_clusters(c, [1])
    assert out.K == 2
    assert out.labels.tolist() == [0, 0, -1, -1, 1, -1]
    with pytest.raises(IndexError):
        remove_clusters(c, [3])
    same = remove_clusters(c, [])
    assert np.array_equal(same.labels, c.labels)


def test_clustering_validation():
    with pytest.raises(ValueError):
        Clustering(labels=np.array([0, 2], dtype=np.int64), K=2)  # id 1 missing
    with pytest.raises(ValueError):
        Clustering(labels=np.array([0, 1], dtype=np.int64), K=1)
    with pytest.raises(ValueError):
        Clustering(labels=np.array([[0, 1]], dtype=np.int64), K=2)
    c = Clustering(labels=np.array([0, 1, -1], dtype=np.int64), K=2)
    assert c.members(1).tolist() == [1]
    with pytest.raises(IndexError):
        c.members(2)
