"""Clustering quality metrics against sklearn and scalar references."""
import numpy as np
import pytest
from sklearn.metrics import normalized_mutual_info_score

import oracles
from embclust import nmi, purity


def test_nmi_identical_is_one():
    labels = np.array([0, 0, 1, 1, 2])
    assert nmi(labels, labels) == pytest.approx(1.0, abs=1e-12)


def test_nmi_permutation_is_one():
    a = np.array([0, 0, 1, 1, 2, 2])
    b = np.array([2, 2, 0, 0, 1, 1])
    assert nmi(a, b) == pytest.approx(1.0, abs=1e-12)


def test_nmi_independent_is_zero():
    a = np.array([0, 0, 1, 1])
    b = np.array([0, 1, 0, 1])
    assert nmi(a, b) == pytest.approx(0.0, abs=1e-12)


def test_nmi_matches_sklearn_geometric():
    rng = np.random.default_rng(80)
    for _ in range(20):
        n = int(rng.integers(10, 200))
        a = rng.integers(0, int(rng.integers(2, 8)), size=n)
        b = rng.integers(0, int(rng.integers(2, 8)), size=n)
        want = normalized_mutual_info_score(a, b, average_method="geometric")
        assert nmi(a, b) == pytest.approx(want, abs=1e-10)


def test_nmi_outliers_become_singletons():
    a = np.array([0, 0, -1, -1, 1, 1])
    b = np.array([0, 0, 0, 0, 1, 1])
    # expand outliers by hand, then hand both to sklearn
    a_exp = np.array([0, 0, 2, 3, 1, 1])
    want = normalized_mutual_info_score(a_exp, b, average_method="geometric")
    assert nmi(a, b) == pytest.approx(want, abs=1e-12)


def test_nmi_zero_entropy_conventions():
    flat = np.zeros(5, dtype=np.int64)
    varied = np.array([0, 0, 1, 1, 2])
    assert nmi(flat, flat) == 1.0
    assert nmi(flat, varied) == 0.0
    assert nmi(varied, flat) == 0.0


def test_nmi_symmetry_and_range():
    rng = np.random.default_rng(81)
    for _ in range(10):
        n = int(rng.integers(5, 60))
        a = rng.integers(-1, 4, size=n)
        b = rng.integers(-1, 3, size=n)
        ab, ba = nmi(a, b), nmi(b, a)
        assert ab == pytest.approx(ba, abs=1e-12)
        assert -1e-12 <= ab <= 1.0 + 1e-12


def test_nmi_length_mismatch():
    with pytest.raises(ValueError):
        nmi(np.array([0, 1]), np.array([0, 1, 2]))


def test_purity_perfect():
    labels = np.array([0, 0, 1, 1, 2])
    assert purity(labels, labels) == 1.0


def test_purity_even_split():
    pred = np.array([0, 0, 1, 1])
    truth = np.array([0, 1, 0, 1])
    assert purity(pred, truth) == 0.5


def test_purity_matches_scalar_oracle():
    rng = np.random.default_rng(82)
    for _ in range(15):
        n = int(rng.integers(10, 120))
        pred = rng.integers(-1, 5, size=n)
        truth = rng.integers(0, 4, size=n)
        if not (pred >= 0).any():
            continue
        want = oracles.purity_oracle(pred.tolist(), truth.tolist())
        assert purity(pred, truth) == pytest.approx(want, abs=1e-12)


def test_purity_subset():
    pred = np.array([0, 0, 0, 1, 1, 1])
    truth = np.array([0, 0, 1, 1, 1, 0])
    subset = np.array([True, True, False, True, True, False])
    assert purity(pred, truth, subset=subset) == 1.0
    assert purity(pred, truth) == pytest.approx(4.0 / 6.0)


def test_purity_outliers_excluded():
    pred = np.array([-1, -1, 0, 0])
    truth = np.array([0, 1, 2, 2])
    assert purity(pred, truth) == 1.0


def test_purity_empty_subset_raises():
    pred = np.array([0, 0, -1])
    truth = np.array([0, 0, 0])
    with pytest.raises(ValueError):
        purity(pred, truth, subset=np.zeros(3, dtype=bool))
    with pytest.raises(ValueError):
        purity(np.array([-1, -1]), np.array([0, 1]))


def test_purity_relabel_invariance():
    rng = np.random.default_rng(83)
    pred = rng.integers(0, 4, size=50)
    truth = rng.integers(0, 3, size=50)
    perm = np.array([3, 0, 2, 1])
    assert purity(perm[pred], truth) == pytest.approx(purity(pred, truth), abs=1e-15)
