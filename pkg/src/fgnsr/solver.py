"""Fast gradient method for nonnegative sparse regression with self dictionary.

Minimises

    F(X) = 1/2 ||M - M X||_F^2 + mu p^T diag(X)    over X in Omega

with Nesterov's accelerated projected gradient, then reads the selected
columns off the solution.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .baselines import spa_select
from .linalg import (DEFAULT_POWER_TOL, as_matrix, col_l1_norms, nnls_cd,
                     spectral_norm_sq)
from .projection import project_omega

__all__ = [
    "SolverConfig",
    "ExtractionResult",
    "SolverError",
    "default_p",
    "gradient",
    "objective",
    "estimate_mu",
    "next_alpha",
    "momentum_beta",
    "solve",
    "fgnsr",
    "postprocess_topdiag",
    "postprocess_spa_rows",
]

ALPHA0 = 0.05
P_SEED = 7
P_SPREAD = 0.01
MU_MODES = ("fixed", "heuristic", "dynamic")
POSTPROCESS = ("topdiag", "spa_rows")


class SolverError(RuntimeError):
    pass


@dataclass
class SolverConfig:
    """Parameters of :func:`solve`.

    ``mu`` is used as given in ``"fixed"`` mode; in ``"heuristic"`` and
    ``"dynamic"`` mode it is computed by :func:`estimate_mu` unless given.
    ``eps_target`` is the residual level ``||M - M X||_F`` that dynamic mode
    steers towards.
    """

    r: int
    mu: float = None
    mu_mode: str = "heuristic"
    eps_target: float = None
    maxiter: int = 1000
    p: np.ndarray = None
    postprocess: str = "topdiag"
    warm_start: object = None
    record_objective: bool = False
    early_exit_tol: float = None
    adjustment_period: int = 50
    gamma_up: float = 2.0
    gamma_down: float = 0.5
    gamma_decay: float = 0.8
    power_tol: float = DEFAULT_POWER_TOL

    def validate(self, n):
        if not 1 <= self.r <= n:
            raise ValueError(f"r={self.r} must lie in [1, {n}]")
        if self.maxiter < 1:
            raise ValueError("maxiter must be >= 1")
        if self.mu_mode not in MU_MODES:
            raise ValueError(f"unknown mu_mode {self.mu_mode!r}")
        if self.mu_mode == "fixed" and (self.mu is None or self.mu < 0):
            raise ValueError("fixed mode needs mu >= 0")
        if self.mu_mode == "dynamic" and not (self.eps_target is not None and self.eps_target > 0):
            raise ValueError("dynamic mode needs eps_target > 0")
        if self.postprocess not in POSTPROCESS:
            raise ValueError(f"unknown postprocess {self.postprocess!r}")
        if self.p is not None:
            p = np.asarray(self.p, dtype=np.float64)
            if p.shape != (n,) or np.any(p <= 0):
                raise ValueError("p must be a positive vector of length n")


@dataclass
class ExtractionResult:
    K: list
    X_final: np.ndarray
    objective_history: list = field(default_factory=list)
    mu_used: float = 0.0
    iterations_run: int = 0
    L: float = 0.0
    complete: bool = True
    mu_history: list = field(default_factory=list)

    @property
    def diag(self):
        return np.diag(self.X_final).copy()


def default_p(n, seed=P_SEED):
    """Entries drawn uniformly from [0.99, 1.01] with a fixed seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.uniform(1.0 - P_SPREAD, 1.0 + P_SPREAD, size=n)


def objective(M, X, mu, p):
    R = M - M @ X
    return 0.5 * float(np.einsum("ij,ij->", R, R)) + mu * float(p @ np.diag(X))


class _Gradient:
    """Evaluates ``M^T M X - M^T M + mu Diag(p)`` with the Gram matrix
    cached; the product is taken as ``M^T (M X)`` when ``m < 2 n``."""

    def __init__(self, M):
        self.M = M
        m, n = M.shape
        self.gram = M.T @ M
        self.use_gram = m >= 2 * n

    def __call__(self, X, mu, p):
        if self.use_gram:
            G = self.gram @ X
        else:
            G = self.M.T @ (self.M @ X)
        G -= self.gram
        G[np.diag_indices_from(G)] += mu * p
        return G


def gradient(gram, X, mu, p, M=None):
    """Gradient of F at ``X`` given the cached Gram matrix ``M^T M``.

    If ``M`` is supplied and has fewer than ``2 n`` rows the product is
    evaluated as ``M^T (M X)``.
    """
    gram = np.asarray(gram, dtype=np.float64)
    if M is not None and M.shape[0] < 2 * M.shape[1]:
        G = M.T @ (M @ X)
    else:
        G = gram @ X
    G = G - gram
    G[np.diag_indices_from(G)] += mu * np.asarray(p, dtype=np.float64)
    return G


def next_alpha(alpha_prev):
    """Nonnegative root of ``a^2 = (1 - a) alpha_prev^2``."""
    c = alpha_prev * alpha_prev
    return 2.0 * c / (c + math.sqrt(c * c + 4.0 * c))


def momentum_beta(alpha_prev, alpha):
    return alpha_prev * (1.0 - alpha_prev) / (alpha_prev * alpha_prev + alpha)


def estimate_mu(M, r, p=None, L=None):
    """Penalty heuristic balancing the two terms of F.

    SPA picks ``r`` columns, ``H`` is their NNLS fit, ``X0`` holds ``H`` on the
    picked rows and zeros elsewhere, and
    ``mu = ||M - M X0||_F^2 / p^T diag(X0)``.

    If the residual or the denominator is negligible the heuristic is
    undefined; ``mu = 1e-6 L / n`` is returned instead.

    Returns
    -------
    mu : float
    X0 : (n, n) array
    """
    M = as_matrix(M)
    n = M.shape[1]
    p = np.ones(n) if p is None else np.asarray(p, dtype=np.float64)
    K, _ = spa_select(M, r)
    X0 = np.zeros((n, n))
    if K:
        X0[K, :] = nnls_cd(M[:, K], M)
    num = float(np.linalg.norm(M - M @ X0) ** 2)
    den = float(p @ np.diag(X0))
    if num < 1e-12 * float(np.linalg.norm(M) ** 2) or den < 1e-12:
        if L is None:
            L = spectral_norm_sq(M)
        return 1e-6 * L / n, X0
    return num / den, X0


def postprocess_topdiag(X, r):
    """Indices of the ``r`` largest diagonal entries (ties: lower index)."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("X must be square")
    if r > X.shape[0]:
        raise ValueError(f"r={r} exceeds n={X.shape[0]}")
    d = np.diag(X)
    return [int(i) for i in np.argsort(-d, kind="stable")[:r]]


def postprocess_spa_rows(X, r, return_complete=False):
    """SPA on the rows of ``X``: repeatedly take the row of largest l2 norm
    and project all rows onto its orthogonal complement.

    Rows with large norm are columns of ``M`` that take part in many
    reconstructions; the projection keeps near-parallel rows (near-duplicate
    columns of ``M``) from being picked twice. If ``X`` has rank below ``r``
    fewer indices come back, with a warning.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("X must be square")
    if r > X.shape[0]:
        raise ValueError(f"r={r} exceeds n={X.shape[0]}")
    K, _ = spa_select(X.T, r)
    complete = len(K) == r
    if not complete:
        warnings.warn(f"rank of X below r: only {len(K)} of {r} rows selected", stacklevel=2)
    if return_complete:
        return K, complete
    return K


def solve(M, config, callback=None):
    """Run the accelerated projected gradient method and extract ``r`` columns.

    Parameters
    ----------
    M : (m, n) array
    config : SolverConfig
    callback : callable, optional
        Called as ``callback(k, Y, mu)`` after every iteration ``k``.

    Returns
    -------
    ExtractionResult
        ``X_final`` is the last projected iterate ``Y`` (always in Omega).
    """
    M = as_matrix(M)
    m, n = M.shape
    config.validate(n)
    if not np.any(M):
        raise SolverError("zero matrix M")

    p = default_p(n) if config.p is None else np.asarray(config.p, dtype=np.float64)
    L = spectral_norm_sq(M, tol=config.power_tol) * (1.0 + 10.0 * config.power_tol)
    w = col_l1_norms(M)
    grad = _Gradient(M)

    X0 = None
    if config.mu_mode == "fixed" or config.mu is not None:
        mu = float(config.mu)
    else:
        mu, X0 = estimate_mu(M, config.r, p, L=L)

    if config.warm_start is None:
        Y = np.zeros((n, n))
    elif isinstance(config.warm_start, str) and config.warm_start == "heuristic":
        if X0 is None:
            _, X0 = estimate_mu(M, config.r, p, L=L)
        Y = project_omega(X0, w)
    else:
        Y = project_omega(as_matrix(config.warm_start, "warm_start"), w)
        if Y.shape != (n, n):
            raise ValueError("warm start must be n x n")
    X = Y.copy()

    history = []
    if config.record_objective:
        history.append(objective(M, Y, mu, p))
    mu_history = [mu]
    alpha = ALPHA0
    gamma_up, gamma_down = config.gamma_up, config.gamma_down
    k = 0
    for k in range(1, config.maxiter + 1):
        Y_prev = Y
        G = grad(X, mu, p)
        Y = project_omega(X - G / L, w)
        if not np.all(np.isfinite(Y)):
            raise SolverError("divergence")
        alpha_next = next_alpha(alpha)
        beta = momentum_beta(alpha, alpha_next)
        alpha = alpha_next
        X = Y + beta * (Y - Y_prev)
        if config.record_objective:
            history.append(objective(M, Y, mu, p))
        if callback is not None:
            callback(k, Y, mu)

        if config.mu_mode == "dynamic" and k % config.adjustment_period == 0 and k < config.maxiter:
            resid = np.linalg.norm(M - M @ Y)
            if resid < config.eps_target:
                mu *= gamma_up
            elif resid > config.eps_target:
                mu *= gamma_down
            gamma_up **= config.gamma_decay
            gamma_down **= config.gamma_decay
            mu_history.append(mu)
            # the objective changed, so the momentum sequence starts over
            alpha = ALPHA0
            X = Y.copy()

        if config.early_exit_tol is not None:
            step = np.linalg.norm(Y - Y_prev) / (1.0 + np.linalg.norm(Y))
            if step < config.early_exit_tol:
                break

    if config.postprocess == "topdiag":
        K, complete = postprocess_topdiag(Y, config.r), True
    else:
        K, complete = postprocess_spa_rows(Y, config.r, return_complete=True)
    return ExtractionResult(K=K, X_final=Y, objective_history=history, mu_used=mu,
                            iterations_run=k, L=L, complete=complete, mu_history=mu_history)


def fgnsr(M, r, **kwargs):
    """Shorthand for ``solve(M, SolverConfig(r=r, **kwargs))``."""
    return solve(M, SolverConfig(r=r, **kwargs))
