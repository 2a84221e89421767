import numpy as np
import pytest
import scipy.sparse as sp

from buggin.balance import SmoteConfig, SmoteOversampler, smote
from buggin.exceptions import BalanceError, InsufficientMinorityError
from buggin.features import FeatureMatrix

from conftest import dense_matrix


def segment_residual(point, a, b):
    """Distance from `point` to the segment [a, b]."""
    d = b - a
    denom = float(d @ d)
    if denom == 0.0:
        return float(np.linalg.norm(point - a))
    t = np.clip(float((point - a) @ d) / denom, 0.0, 1.0)
    return float(np.linalg.norm(point - (a + t * d)))


def min_pair_residual(point, originals):
    best = np.inf
    for i in range(len(originals)):
        for j in range(i + 1, len(originals)):
            best = min(best, segment_residual(point, originals[i], originals[j]))
    return best


def test_paper_training_counts():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(1504, 8))
    y = np.array([1] * 896 + [0] * 608)
    out = SmoteOversampler(seed=1).fit_resample(dense_matrix(X, y))
    assert int((out.labels == 1).sum()) == 896
    assert int((out.labels == 0).sum()) == 896
    assert out.n_rows == 1504 + 288


def test_two_point_minority_stays_on_segment():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [3.0, 5.0], [4.0, 5.0], [5.0, 5.0], [6.0, 5.0]])
    y = np.array([1, 1, 0, 0, 0, 0])
    out = smote(dense_matrix(X, y), SmoteConfig(k_neighbors=5, seed=42))
    for row in np.asarray(out.values[6:]):
        t = row[0]
        np.testing.assert_allclose(row, [t, t], atol=1e-12)
        assert 0.0 <= t < 1.0


def test_already_balanced_returned_unchanged():
    X = np.eye(4)
    y = np.array([0, 0, 1, 1])
    matrix = dense_matrix(X, y)
    out = SmoteOversampler(seed=0).fit_resample(matrix)
    assert out is matrix


def test_single_class_rejected():
    with pytest.raises(BalanceError):
        SmoteOversampler().fit_resample(dense_matrix(np.eye(3), [1, 1, 1]))


def test_minority_of_one_rejected():
    with pytest.raises(InsufficientMinorityError):
        SmoteOversampler().fit_resample(dense_matrix(np.eye(4), [0, 1, 1, 1]))


def test_deterministic_and_majority_bit_identical():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(30, 6))
    y = (np.arange(30) < 10).astype(int)
    m = dense_matrix(X, y)
    out1 = SmoteOversampler(k_neighbors=3, seed=9).fit_resample(m)
    out2 = SmoteOversampler(k_neighbors=3, seed=9).fit_resample(m)
    np.testing.assert_array_equal(np.asarray(out1.values), np.asarray(out2.values))
    assert out1.row_ids == out2.row_ids
    # Original rows (both classes) are bit-identical and in order.
    assert np.asarray(out1.values[:30]).tobytes() == X.astype(np.float64).tobytes()
    out3 = SmoteOversampler(k_neighbors=3, seed=10).fit_resample(m)
    assert np.asarray(out3.values[30:]).tobytes() != np.asarray(out1.values[30:]).tobytes()


def test_synthetic_ids_fresh_and_unique():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(12, 3))
    y = (np.arange(12) < 4).astype(int)
    out = SmoteOversampler(seed=0).fit_resample(dense_matrix(X, y))
    assert len(set(out.row_ids)) == out.n_rows
    assert all(rid.startswith("synthetic:") for rid in out.row_ids[12:])


def test_sparse_interpolation_union_support_no_renormalize():
    X = sp.csr_matrix(
        np.array(
            [
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 3.0],
                [0.0, 0.0, 4.0],
                [0.0, 0.0, 5.0],
            ]
        )
    )
    y = np.array([1, 1, 0, 0, 0])
    matrix = FeatureMatrix(tuple("abcde"), X, y)
    out = SmoteOversampler(k_neighbors=1, seed=3).fit_resample(matrix)
    assert sp.issparse(out.values)
    synth = out.values[5:].toarray()
    for row in synth:
        # Interpolation between the two one-hot minority rows: u on one
        # axis, 1-u on the other, nothing on the third; not re-normalized.
        assert row[2] == 0.0
        np.testing.assert_allclose(row[0] + row[1], 1.0, atol=1e-12)


def test_k_clamped_to_minority_minus_one():
    X = np.array([[0.0], [10.0], [1.0], [2.0], [3.0], [4.0], [5.0]])
    y = np.array([1, 1, 0, 0, 0, 0, 0])
    out = SmoteOversampler(k_neighbors=50, seed=0).fit_resample(dense_matrix(X, y))
    # The only neighbor of each minority point is the other one.
    for v in np.asarray(out.values[7:]).ravel():
        assert 0.0 <= v < 10.0


def test_geometry_property_random_instances():
    rng = np.random.default_rng(77)
    for _ in range(60):
        n_min = int(rng.integers(2, 12))
        n_maj = n_min + int(rng.integers(1, 12))
        d = int(rng.integers(2, 6))
        X = np.vstack([rng.normal(size=(n_min, d)), rng.normal(size=(n_maj, d)) + 3.0])
        y = np.array([1] * n_min + [0] * n_maj)
        out = smote(dense_matrix(X, y), SmoteConfig(k_neighbors=5, seed=int(rng.integers(0, 1 << 31))))
        assert int((out.labels == 0).sum()) == int((out.labels == 1).sum())
        originals = X[:n_min]
        for row in np.asarray(out.values[n_min + n_maj :]):
            assert min_pair_residual(row, originals) <= 1e-9
