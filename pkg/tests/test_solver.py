import numpy as np
import pytest

from fgnsr.linalg import spectral_norm_sq
from fgnsr.projection import in_omega, omega_violation
from fgnsr.solver import (SolverConfig, SolverError, default_p, estimate_mu, fgnsr,
                          gradient, momentum_beta, next_alpha, objective,
                          postprocess_spa_rows, postprocess_topdiag, solve)
from fgnsr.synthgen import gen_middlepoint


def fd_gradient(M, X, mu, p, h=1e-4):
    G = np.zeros_like(X)
    for i in range(X.shape[0]):
        for j in range(X.shape[1]):
            E = np.zeros_like(X)
            E[i, j] = h
            G[i, j] = (objective(M, X + E, mu, p) - objective(M, X - E, mu, p)) / (2 * h)
    return G


def max_rel_err(G, ref):
    # unit-free relative error with a floor for entries that happen to vanish
    return float((np.abs(G - ref) / np.maximum(np.abs(ref), 1e-6)).max())


def test_gradient_at_zero_and_identity():
    rng = np.random.default_rng(0)
    M = rng.random((5, 7))
    p = rng.uniform(0.99, 1.01, 7)
    gram = M.T @ M
    np.testing.assert_allclose(gradient(gram, np.zeros((7, 7)), 0.3, p), -gram + 0.3 * np.diag(p))
    np.testing.assert_allclose(gradient(gram, np.eye(7), 0.0, p), 0.0, atol=1e-14)


@pytest.mark.parametrize("mu", [0.0, 0.1, 10.0])
def test_gradient_finite_differences(mu):
    rng = np.random.default_rng(int(mu * 10) + 1)
    M = rng.random((5, 7))
    X = rng.random((7, 7))
    p = rng.uniform(0.99, 1.01, 7)
    G = gradient(M.T @ M, X, mu, p)
    G_lowrank_path = gradient(M.T @ M, X, mu, p, M=M)
    np.testing.assert_allclose(G, G_lowrank_path, rtol=1e-12, atol=1e-12)
    assert max_rel_err(G, fd_gradient(M, X, mu, p)) <= 1e-5


def test_objective_examples():
    rng = np.random.default_rng(4)
    M = rng.random((6, 4))
    p = np.ones(4)
    assert objective(M, np.zeros((4, 4)), 1.0, p) == pytest.approx(0.5 * np.linalg.norm(M) ** 2, rel=1e-15)
    inst = gen_middlepoint(8, 3, 0.0, 1)
    n = inst.M.shape[1]
    X = np.zeros((n, n))
    X[inst.K_true, :] = inst.H_true
    assert objective(inst.M, X, 0.0, np.ones(n)) == pytest.approx(0.0, abs=1e-28)
    X = rng.random((4, 4))
    naive = 0.5 * sum((M[i, j] - sum(M[i, k] * X[k, j] for k in range(4))) ** 2
                      for i in range(6) for j in range(4)) + 0.7 * sum(p[i] * X[i, i] for i in range(4))
    assert objective(M, X, 0.7, p) == pytest.approx(naive, rel=1e-12)


def test_momentum_recursion():
    a = 0.05
    for _ in range(10_000):
        b = next_alpha(a)
        assert b >= 0
        assert abs(b * b - (1 - b) * a * a) <= 1e-14
        beta = momentum_beta(a, b)
        assert 0 <= beta < 1
        a = b


def test_default_p():
    p = default_p(100)
    assert ((p >= 0.99) & (p <= 1.01)).all()
    np.testing.assert_array_equal(p, default_p(100))


def test_topdiag_examples():
    assert postprocess_topdiag(np.diag([0.9, 0.1, 0.8]), 2) == [0, 2]
    assert postprocess_topdiag(np.eye(3) * 0.5, 2) == [0, 1]
    with pytest.raises(ValueError):
        postprocess_topdiag(np.eye(3), 4)
    rng = np.random.default_rng(2)
    for _ in range(20):
        X = rng.random((9, 9))
        order = sorted(range(9), key=lambda i: (-X[i, i], i))
        assert postprocess_topdiag(X, 4) == order[:4]


def test_spa_rows_examples():
    assert postprocess_spa_rows(np.diag([3.0, 2.0, 1.0]), 2) == [0, 1]
    X = np.array([[2.0, 2.0, 0.0], [2.0, 2.0, 0.0], [0.0, 0.0, 0.5]])
    assert postprocess_spa_rows(X, 2) == [0, 2]


def naive_spa_rows(X, r):
    rows = [np.array(x, dtype=float) for x in X]
    picked, basis = [], []
    for _ in range(r):
        res = []
        for x in rows:
            v = x.copy()
            for q in basis:
                v = v - (q @ v) * q
            res.append(np.linalg.norm(v))
        for i in picked:
            res[i] = -1.0
        i = int(np.argmax(res))
        v = rows[i].copy()
        for q in basis:
            v = v - (q @ v) * q
        basis.append(v / np.linalg.norm(v))
        picked.append(i)
    return picked


def test_spa_rows_matches_gram_schmidt_oracle():
    rng = np.random.default_rng(8)
    for _ in range(20):
        X = rng.random((8, 8))
        assert postprocess_spa_rows(X, 5) == naive_spa_rows(X, 5)


def test_spa_rows_rank_deficient_warns():
    X = np.zeros((4, 4))
    X[0, 0] = 1.0
    with pytest.warns(UserWarning):
        K = postprocess_spa_rows(X, 3)
    assert K == [0]


def test_estimate_mu_identity():
    rng = np.random.default_rng(13)
    M = rng.random((20, 25))
    p = default_p(25)
    mu, X0 = estimate_mu(M, 5, p)
    assert mu * (p @ np.diag(X0)) == pytest.approx(np.linalg.norm(M - M @ X0) ** 2, rel=1e-10)
    assert np.count_nonzero(np.abs(X0).sum(axis=1)) <= 5


def test_estimate_mu_floor_on_noiseless():
    inst = gen_middlepoint(30, 4, 0.0, 3)
    mu, _ = estimate_mu(inst.M, 4)
    L = spectral_norm_sq(inst.M)
    assert mu == pytest.approx(1e-6 * L / inst.M.shape[1], rel=1e-12)


def test_estimate_mu_positive_on_noisy_middlepoint():
    inst = gen_middlepoint(50, 10, 0.1 * np.linalg.norm(gen_middlepoint(50, 10, 0, 5).M), 5)
    mu, _ = estimate_mu(inst.M, 10)
    assert np.isfinite(mu) and mu > 0


def test_noiseless_recovery():
    inst = gen_middlepoint(50, 10, 0.0, 21)
    res = fgnsr(inst.M, 10, maxiter=1000)
    assert set(res.K) == set(inst.K_true)
    assert res.iterations_run == 1000


def test_iterates_feasible_and_best_objective_monotone():
    inst = gen_middlepoint(20, 4, 0.05, 2)
    M = inst.M
    n = M.shape[1]
    w = np.abs(M).sum(axis=0)
    worst = []
    res = solve(M, SolverConfig(r=4, maxiter=200, record_objective=True),
                callback=lambda k, Y, mu: worst.append(omega_violation(Y, w)))
    assert len(worst) == 200 and max(worst) <= 1e-12
    best = np.minimum.accumulate(res.objective_history)
    assert np.all(np.diff(best) <= 0)
    assert res.X_final.shape == (n, n)


def test_single_iteration_does_not_increase_objective():
    rng = np.random.default_rng(6)
    M = rng.random((10, 12))
    res = fgnsr(M, 3, maxiter=1, record_objective=True)
    assert in_omega(res.X_final, np.abs(M).sum(axis=0))
    F0, F1 = res.objective_history
    assert F1 <= F0 + 1e-12


def test_large_mu_shrinks_diagonal():
    inst = gen_middlepoint(30, 5, 0.05, 4)
    M = inst.M
    p = default_p(M.shape[1])
    heur = fgnsr(M, 5, maxiter=300)
    big = fgnsr(M, 5, maxiter=300, mu_mode="fixed", mu=1e3 * np.linalg.norm(M) ** 2)
    assert p @ big.diag <= p @ heur.diag
    assert big.diag.max() <= 1e-3


def test_dynamic_mu_steers_residual():
    for seed, eps in [(3, 0.05), (3, 0.1), (4, 0.2)]:
        inst = gen_middlepoint(50, 10, eps, seed)
        res = fgnsr(inst.M, 10, mu_mode="dynamic", eps_target=eps)
        resid = np.linalg.norm(inst.M - inst.M @ res.X_final)
        assert abs(resid - eps) <= 0.05 * eps
        assert len(res.mu_history) > 1


def test_warm_start_heuristic_and_spa_rows_postprocess():
    inst = gen_middlepoint(40, 6, 0.0, 9)
    res = fgnsr(inst.M, 6, warm_start="heuristic", postprocess="spa_rows", maxiter=300)
    assert set(res.K) == set(inst.K_true)


def test_early_exit():
    inst = gen_middlepoint(20, 3, 0.0, 1)
    res = fgnsr(inst.M, 3, maxiter=5000, early_exit_tol=1e-5)
    assert res.iterations_run < 5000


def test_errors():
    with pytest.raises(SolverError):
        fgnsr(np.zeros((3, 3)), 1)
    M = np.random.default_rng(0).random((4, 5))
    with pytest.raises(ValueError):
        fgnsr(M, 6)
    with pytest.raises(ValueError):
        fgnsr(M, 2, mu_mode="dynamic")
    with pytest.raises(ValueError):
        fgnsr(M, 2, maxiter=0)
    with pytest.raises(ValueError):
        fgnsr(M, 2, p=-np.ones(5))
