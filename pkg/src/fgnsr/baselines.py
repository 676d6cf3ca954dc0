"""Greedy separable NMF baselines: SPA, SNPA and XRAY ("max" variant)."""

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix, nnls_cd

__all__ = [
    "GreedySelection",
    "RankExhausted",
    "spa",
    "snpa",
    "xray_max",
    "spa_select",
    "normalize_columns_l1",
]

REFIT_SWEEPS = 100
# residual columns below this fraction of the largest input column count as zero
ZERO_RTOL = 1e-12


class RankExhausted(ValueError):
    """Raised when every residual column vanishes before ``r`` picks."""


@dataclass
class GreedySelection:
    K: list
    residual_norms: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.K)

    def __len__(self):
        return len(self.K)


def spa_select(A, r):
    """Core SPA loop on the columns of ``A``; stops early on rank exhaustion.

    Returns the picked indices and the Frobenius norm of the residual after
    each pick.
    """
    R = np.array(A, dtype=np.float64, copy=True)
    norms = np.einsum("ij,ij->j", R, R)
    cutoff = (ZERO_RTOL * np.sqrt(norms.max())) ** 2 if norms.size else 0.0
    K, res = [], []
    for _ in range(r):
        j = int(np.argmax(norms))
        if norms[j] <= cutoff or norms[j] == 0.0:
            break
        u = R[:, j] / np.sqrt(norms[j])
        R -= np.outer(u, u @ R)
        norms = np.einsum("ij,ij->j", R, R)
        norms[K + [j]] = 0.0
        K.append(j)
        res.append(float(np.sqrt(norms.sum())))
    return K, res


def spa(M, r):
    """Successive projection algorithm.

    Picks the residual column of largest l2 norm, then projects every column
    onto the orthogonal complement of the pick. Ties go to the lowest index.
    """
    M = as_matrix(M)
    _check_r(M, r)
    K, res = spa_select(M, r)
    if len(K) < r:
        raise RankExhausted(f"rank exhausted after {len(K)} of {r} columns")
    return GreedySelection(K, res)


def snpa(M, r, sweeps=REFIT_SWEEPS):
    """Successive nonnegative projection algorithm.

    Like SPA, but the residual after each pick is ``M - M(:,K) H`` with
    ``H >= 0`` the nonnegative least-squares fit on the picked columns.
    """
    M = as_matrix(M)
    _check_r(M, r)
    R = M.copy()
    cutoff = ZERO_RTOL * np.linalg.norm(M, axis=0).max()
    K, res = [], []
    H = None
    for _ in range(r):
        norms = np.linalg.norm(R, axis=0)
        norms[K] = -np.inf
        j = int(np.argmax(norms))
        if norms[j] <= cutoff:
            raise RankExhausted(f"rank exhausted after {len(K)} of {r} columns")
        K.append(j)
        H0 = np.zeros((len(K), M.shape[1])) if H is None else np.vstack([H, np.zeros((1, M.shape[1]))])
        H = nnls_cd(M[:, K], M, sweeps=sweeps, H0=H0)
        R = M - M[:, K] @ H
        res.append(float(np.linalg.norm(R)))
    return GreedySelection(K, res)


def xray_max(M, r, sweeps=REFIT_SWEEPS, allow_negative=False):
    """XRAY with the "max" selection rule on unnormalised nonnegative data.

    Each step takes the residual column of largest norm as anchor ``i`` and
    selects ``argmax_j R(:,i)^T M(:,j) / (1^T M(:,j))``, which is an extreme
    ray of the cone spanned by the data; the residual is then refitted by
    nonnegative least squares on all picks.

    Noisy benchmark data can dip slightly below zero; ``allow_negative``
    skips the input check for that case (columns with nonpositive sum are
    never selected).
    """
    M = as_matrix(M)
    if not allow_negative and np.any(M < 0):
        raise ValueError("XRAY requires nonnegative input")
    _check_r(M, r)
    colsum = M.sum(axis=0)
    eligible = colsum > 0
    R = M.copy()
    cutoff = ZERO_RTOL * np.linalg.norm(M, axis=0).max()
    K, res = [], []
    H = None
    for _ in range(r):
        rn = np.linalg.norm(R, axis=0)
        anchor = int(np.argmax(rn))
        if rn[anchor] <= cutoff:
            raise RankExhausted(f"rank exhausted after {len(K)} of {r} columns")
        score = np.full(M.shape[1], -np.inf)
        score[eligible] = (R[:, anchor] @ M[:, eligible]) / colsum[eligible]
        score[K] = -np.inf
        j = int(np.argmax(score))
        if not np.isfinite(score[j]):
            raise RankExhausted(f"no eligible column left after {len(K)} picks")
        K.append(j)
        H0 = np.zeros((len(K), M.shape[1])) if H is None else np.vstack([H, np.zeros((1, M.shape[1]))])
        H = nnls_cd(M[:, K], M, sweeps=sweeps, H0=H0)
        R = M - M[:, K] @ H
        res.append(float(np.linalg.norm(R)))
    return GreedySelection(K, res)


def normalize_columns_l1(M):
    """Scale every nonzero column to unit l1 norm (zero columns untouched)."""
    M = as_matrix(M)
    s = np.abs(M).sum(axis=0)
    s[s == 0] = 1.0
    return M / s


def _check_r(M, r):
    if not 1 <= r <= M.shape[1]:
        raise ValueError(f"r={r} must lie in [1, {M.shape[1]}]")
