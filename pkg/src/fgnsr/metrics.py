"""Evaluation measures for column selections."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .linalg import as_matrix, nnls_cd

__all__ = [
    "EvalReport",
    "mrsa_pair",
    "mrsa_matrix",
    "mrsa",
    "nnls_residual",
    "rel_approx_measure",
    "rel_error_pct",
    "index_recovery",
    "evaluate",
    "METRIC_NNLS_SWEEPS",
    "METRIC_NNLS_TOL",
]

METRIC_NNLS_SWEEPS = 200
METRIC_NNLS_TOL = 1e-10


def mrsa_pair(w, w_true):
    """Mean-removed spectral angle between two vectors, scaled to [0, 100]."""
    return float(mrsa_matrix(np.reshape(w, (-1, 1)), np.reshape(w_true, (-1, 1)))[0, 0])


def mrsa_matrix(A, B):
    """All pairwise MRSA values between the columns of ``A`` and ``B``.

    A column that is constant (zero after mean removal) scores 100 against
    any non-constant column and 0 against another constant column.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape[0] != B.shape[0]:
        raise ValueError("column lengths differ")
    Ac = A - A.mean(axis=0)
    Bc = B - B.mean(axis=0)
    na = np.linalg.norm(Ac, axis=0)
    nb = np.linalg.norm(Bc, axis=0)
    # a column is constant when its centred norm is at rounding level
    za = na <= 1e-14 * np.maximum(np.abs(A).max(axis=0), 1e-300)
    zb = nb <= 1e-14 * np.maximum(np.abs(B).max(axis=0), 1e-300)
    # angle as 2 atan2(|a - b|, |a + b|) on unit vectors: same value as
    # arccos(<a, b>) but exact near zero, where arccos loses half the digits
    Au = Ac / np.where(za, 1.0, na)
    Bu = Bc / np.where(zb, 1.0, nb)
    diff = cdist(Au.T, Bu.T)
    summ = cdist(Au.T, -Bu.T)
    out = 100.0 / np.pi * 2.0 * np.arctan2(diff, summ)
    out[za, :] = 100.0
    out[:, zb] = 100.0
    out[np.ix_(za, zb)] = 0.0
    return out


def mrsa(W_est, W_true):
    """Mean MRSA over the optimal one-to-one matching of estimated to true
    columns (Hungarian assignment on the pairwise MRSA table)."""
    W_est = as_matrix(W_est, "W_est")
    W_true = as_matrix(W_true, "W_true")
    if W_est.shape != W_true.shape:
        raise ValueError(f"shape mismatch {W_est.shape} vs {W_true.shape}")
    C = mrsa_matrix(W_est, W_true)
    rows, cols = linear_sum_assignment(C)
    return float(C[rows, cols].mean())


def nnls_residual(M, K, sweeps=METRIC_NNLS_SWEEPS, tol=METRIC_NNLS_TOL):
    """``min_{H >= 0} ||M - M(:,K) H||_F`` computed by coordinate descent."""
    M = as_matrix(M)
    K = list(K)
    if not K:
        raise ValueError("K must be nonempty")
    H = nnls_cd(M[:, K], M, sweeps=sweeps, tol=tol)
    return float(np.linalg.norm(M - M[:, K] @ H))


def rel_approx_measure(M, K, sweeps=METRIC_NNLS_SWEEPS, tol=METRIC_NNLS_TOL):
    """``1 - min_{H>=0} ||M - M(:,K) H||_F / ||M||_F``, clamped to [0, 1]."""
    M = as_matrix(M)
    res = nnls_residual(M, K, sweeps, tol)
    return float(np.clip(1.0 - res / np.linalg.norm(M), 0.0, 1.0))


def rel_error_pct(M, K, sweeps=METRIC_NNLS_SWEEPS, tol=METRIC_NNLS_TOL):
    """Relative NNLS residual in percent, ``100 ||M - M(:,K) H||_F / ||M||_F``."""
    M = as_matrix(M)
    return 100.0 * nnls_residual(M, K, sweeps, tol) / np.linalg.norm(M)


def index_recovery(K_est, K_true):
    K_true = set(int(k) for k in K_true)
    if len(list(K_est)) != len(K_true):
        raise ValueError("index sets must have equal length")
    return len(set(int(k) for k in K_est) & K_true) / len(K_true)


@dataclass
class EvalReport:
    mrsa_mean: float
    rel_measure: float
    rel_error_pct: float
    index_recovery: float


def evaluate(M, K, W_true, K_true):
    M = as_matrix(M)
    K = list(K)
    res = nnls_residual(M, K)
    frac = res / np.linalg.norm(M)
    return EvalReport(
        mrsa_mean=mrsa(M[:, K], W_true),
        rel_measure=float(np.clip(1.0 - frac, 0.0, 1.0)),
        rel_error_pct=100.0 * frac,
        index_recovery=index_recovery(K, K_true),
    )
