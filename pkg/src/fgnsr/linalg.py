"""Dense matrix helpers shared by every solver in the package.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. Columns are
the unit of data throughout (one data point / pixel per column).
"""

import numpy as np

__all__ = [
    "as_matrix",
    "col_l1_norms",
    "frob_norm",
    "spectral_norm_sq",
    "nnls_cd",
    "nnls_objective",
]

DEFAULT_POWER_TOL = 1e-6
DEFAULT_POWER_ITERS = 100
POWER_SEED = 20160101
DEFAULT_NNLS_SWEEPS = 100
DEFAULT_NNLS_TOL = 1e-10


def as_matrix(M, name="M"):
    """Validate ``M`` and return it as a 2-D float64 array (no copy if possible)."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={A.ndim}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def col_l1_norms(M):
    """Column-wise l1 norms, ``w_j = sum_i |M_ij|``."""
    return np.abs(as_matrix(M)).sum(axis=0)


def frob_norm(M):
    return float(np.linalg.norm(as_matrix(M), "fro"))


def spectral_norm_sq(M, tol=DEFAULT_POWER_TOL, max_power_iters=DEFAULT_POWER_ITERS,
                     seed=POWER_SEED):
    """Estimate ``lambda_max(M^T M) = sigma_max(M)^2`` by the power method.

    The start vector is drawn from a fixed seed so the estimate is
    reproducible. Iteration stops once two successive Rayleigh quotients
    agree to relative tolerance ``tol`` or after ``max_power_iters`` steps.

    Raises
    ------
    ValueError
        If ``M`` is the zero matrix ("zero operator").
    """
    M = as_matrix(M)
    if not np.any(M):
        raise ValueError("zero operator")
    n = M.shape[1]
    v = np.random.default_rng(seed).standard_normal(n)
    v /= np.linalg.norm(v)
    lam_prev = None
    lam = 0.0
    for _ in range(max(1, max_power_iters)):
        u = M.T @ (M @ v)
        lam = float(v @ u)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            # start vector in the null space; restart along the heaviest column
            v = np.zeros(n)
            v[np.argmax(np.einsum("ij,ij->j", M, M))] = 1.0
            lam_prev = None
            continue
        v = u / nu
        if lam_prev is not None and abs(lam - lam_prev) <= tol * abs(lam):
            break
        lam_prev = lam
    # one last Rayleigh quotient on the freshest vector
    Mv = M @ v
    return float(max(lam, Mv @ Mv))


def nnls_objective(W, M, H):
    R = M - W @ H
    return float(np.einsum("ij,ij->", R, R))


def nnls_cd(W, M, sweeps=DEFAULT_NNLS_SWEEPS, tol=DEFAULT_NNLS_TOL, H0=None,
            return_history=False):
    """Nonnegative least squares ``min_{H >= 0} ||M - W H||_F^2`` by
    cyclic coordinate descent over the rows of ``H``.

    Each row update is the exact nonnegative minimiser with the other rows
    fixed, so the objective never increases. Iteration stops after
    ``sweeps`` full passes or once the relative objective decrease of a
    sweep drops below ``tol``.

    Parameters
    ----------
    W : (m, r) array
    M : (m, n) array
    sweeps : int
        Maximum number of passes; ``0`` returns the zero matrix.
    tol : float or None
        Relative decrease threshold for early exit (``None`` disables it).
    H0 : (r, n) array, optional
        Nonnegative warm start.
    return_history : bool
        Also return the objective after every sweep (index 0 = start).

    Returns
    -------
    H : (r, n) array
    history : list of float, only if ``return_history``
    """
    W = as_matrix(W, "W")
    M = as_matrix(M, "M")
    if W.shape[0] != M.shape[0]:
        raise ValueError(f"dimension mismatch: W has {W.shape[0]} rows, M has {M.shape[0]}")
    r, n = W.shape[1], M.shape[1]
    if H0 is None:
        H = np.zeros((r, n))
    else:
        H = np.maximum(np.array(H0, dtype=np.float64), 0.0)
        if H.shape != (r, n):
            raise ValueError(f"H0 has shape {H.shape}, expected {(r, n)}")

    WtW = W.T @ W
    WtM = W.T @ M
    diag = np.diag(WtW).copy()
    obj = nnls_objective(W, M, H)
    history = [obj]
    for _ in range(sweeps):
        for k in range(r):
            if diag[k] <= 0.0:
                H[k] = 0.0
                continue
            grad_k = WtM[k] - WtW[k] @ H
            H[k] = np.maximum(0.0, H[k] + grad_k / diag[k])
        new_obj = nnls_objective(W, M, H)
        history.append(new_obj)
        decrease = obj - new_obj
        obj = new_obj
        if tol is not None and decrease <= tol * history[-2]:
            break
    if return_history:
        return H, history
    return H
