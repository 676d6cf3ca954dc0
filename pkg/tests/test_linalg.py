import numpy as np
import pytest

from fgnsr.linalg import (as_matrix, col_l1_norms, frob_norm, nnls_cd, nnls_objective,
                          spectral_norm_sq)


def naive_l1(M):
    m, n = M.shape
    out = [0.0] * n
    for j in range(n):
        for i in range(m):
            out[j] += abs(M[i, j])
    return np.array(out)


def naive_frob(M):
    s = 0.0
    for i in range(M.shape[0]):
        for j in range(M.shape[1]):
            s += M[i, j] * M[i, j]
    return s ** 0.5


def test_col_l1_norms_examples():
    np.testing.assert_array_equal(col_l1_norms([[1, -2], [0, 3]]), [1, 5])
    np.testing.assert_array_equal(col_l1_norms(np.zeros((2, 2))), [0, 0])


def test_frob_norm_examples():
    assert frob_norm(np.eye(3)) == pytest.approx(np.sqrt(3), rel=1e-15)
    assert frob_norm(np.zeros((2, 3))) == 0.0


def test_norms_match_naive_loops():
    rng = np.random.default_rng(11)
    for k in range(100):
        m, n = rng.integers(1, 10, size=2)
        M = rng.standard_normal((m, n)) * 10.0 ** rng.integers(-3, 4)
        np.testing.assert_allclose(col_l1_norms(M), naive_l1(M), rtol=1e-13, atol=0)
        assert frob_norm(M) == pytest.approx(naive_frob(M), rel=1e-13)


def test_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(ValueError):
        as_matrix(np.zeros((0, 3)))


def test_spectral_norm_small_cases():
    assert spectral_norm_sq(np.eye(3)) == pytest.approx(1.0, rel=1e-12)
    assert spectral_norm_sq(np.diag([1.0, 2.0])) == pytest.approx(4.0, rel=1e-6)


def test_spectral_norm_zero_operator():
    with pytest.raises(ValueError, match="zero operator"):
        spectral_norm_sq(np.zeros((3, 2)))


@pytest.mark.parametrize("seed", range(5))
def test_spectral_norm_vs_eigensolver(seed):
    M = np.random.default_rng(seed).standard_normal((8, 6))
    lam = np.linalg.eigvalsh(M.T @ M)[-1]
    assert spectral_norm_sq(M) == pytest.approx(lam, rel=1e-6)


def test_spectral_norm_bounds():
    rng = np.random.default_rng(3)
    for _ in range(50):
        M = rng.random((rng.integers(1, 12), rng.integers(1, 12)))
        L = spectral_norm_sq(M)
        assert L <= frob_norm(M) ** 2 * (1 + 1e-12)
        assert L >= (np.linalg.norm(M, axis=0).max() ** 2) * (1 - 1e-6)


def test_spectral_norm_deterministic():
    M = np.random.default_rng(0).random((20, 30))
    assert spectral_norm_sq(M) == spectral_norm_sq(M.copy())


def test_nnls_single_sweep_example():
    H = nnls_cd([[1.0], [0.0]], [[2.0, -1.0], [0.0, 0.0]], sweeps=1)
    np.testing.assert_array_equal(H, [[2.0, 0.0]])


def test_nnls_zero_sweeps():
    M = np.random.default_rng(1).random((4, 5))
    H, hist = nnls_cd(M[:, :2], M, sweeps=0, return_history=True)
    assert not H.any()
    assert hist == [pytest.approx(np.linalg.norm(M) ** 2)]


def test_nnls_recovers_separable():
    rng = np.random.default_rng(5)
    W = rng.random((5, 3))
    H0 = rng.random((3, 12))
    M = W @ H0
    H = nnls_cd(W, M, sweeps=200, tol=None)
    assert np.linalg.norm(M - W @ H) <= 1e-8
    assert (H >= 0).all()


def test_nnls_monotone():
    rng = np.random.default_rng(9)
    for _ in range(30):
        m, r, n = rng.integers(2, 8), rng.integers(1, 5), rng.integers(1, 9)
        W = rng.standard_normal((m, r))
        M = rng.standard_normal((m, n))
        H, hist = nnls_cd(W, M, sweeps=30, tol=None, return_history=True)
        assert (H >= 0).all()
        assert all(b <= a + 1e-12 * hist[0] for a, b in zip(hist, hist[1:]))


def test_nnls_zero_column_stays_zero():
    W = np.array([[1.0, 0.0], [1.0, 0.0]])
    H = nnls_cd(W, np.ones((2, 3)), sweeps=5)
    assert not H[1].any()
    np.testing.assert_allclose(H[0], 1.0)


def test_nnls_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        nnls_cd(np.ones((3, 2)), np.ones((4, 2)))


def test_nnls_inputs_not_mutated():
    rng = np.random.default_rng(2)
    W, M = rng.random((4, 2)), rng.random((4, 6))
    W0, M0 = W.copy(), M.copy()
    H0 = np.ones((2, 6))
    nnls_cd(W, M, H0=H0)
    np.testing.assert_array_equal(W, W0)
    np.testing.assert_array_equal(M, M0)
    np.testing.assert_array_equal(H0, 1.0)
    assert nnls_objective(W, M, np.zeros((2, 6))) == pytest.approx(np.linalg.norm(M) ** 2)
