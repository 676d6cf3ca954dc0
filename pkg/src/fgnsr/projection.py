"""Euclidean projection onto the weighted polyhedron

    Omega = { X >= 0 : X_ii <= 1,  w_i X_ij <= w_j X_ii  for all i, j }.

Rows decouple, so the work is done one row at a time: row ``i`` of ``X`` is
projected onto

    Omega_1(i) = { z >= 0 : z_i <= 1,  w_i z_j <= w_j z_i }.

The optimum is ``phi_t(x)`` for a scalar ``t`` (the value of ``z_i``) that
minimises a strongly convex, piecewise quadratic function whose breakpoints
are ``b_j = (w_i / w_j) x_j``. Coordinates with ``b_j >= t`` are clipped to
``(w_j / w_i) t``; all others keep ``x_j``. ``t`` is found by adding
breakpoints to the active set in decreasing order until the trial value
``t = w_i (w_i x_i + sum_B w_j x_j) / (w_i^2 + sum_B w_j^2)`` is no longer
below the next breakpoint. Breakpoints above 1 are always active and those
below ``max(x_i, 0)`` never are, so only the ones in between are scanned,
either off a binary heap (default) or after a full sort.
"""

import itertools

import numpy as np
from numba import njit

__all__ = [
    "RowProjection",
    "project_row",
    "project_row_info",
    "project_omega",
    "brute_force_project_row",
    "in_omega",
    "omega_violation",
]

METHOD_HEAP = 0
METHOD_SORT = 1
_METHODS = {"heap": METHOD_HEAP, "sort": METHOD_SORT}
ORACLE_LIMIT = 12


@njit(cache=True)
def _before(b, idx, a, c):
    # heap order: larger breakpoint first, lower index on ties
    return b[a] > b[c] or (b[a] == b[c] and idx[a] < idx[c])


@njit(cache=True)
def _sift_down(heap, size, pos, b, idx):
    while True:
        left = 2 * pos + 1
        if left >= size:
            return
        best = left
        right = left + 1
        if right < size and _before(b, idx, heap[right], heap[left]):
            best = right
        if _before(b, idx, heap[best], heap[pos]):
            tmp = heap[pos]
            heap[pos] = heap[best]
            heap[best] = tmp
            pos = best
        else:
            return


@njit(cache=True)
def _project_row_kernel(x, w, pivot, method, z, active, trace):
    """Project ``x`` onto Omega_1(pivot) into ``z``.

    ``active`` receives the coupled coordinates, ``trace`` the successive
    trial values of ``t``. Returns ``(t, n_active, n_trace)`` where ``t`` is
    the final (unclamped) trial value.
    """
    n = x.shape[0]
    wp = w[pivot]
    for j in range(n):
        z[j] = 0.0
        active[j] = False
    if wp <= 0.0:
        # coupling constraints are vacuous: box on the pivot, orthant elsewhere
        for j in range(n):
            if j != pivot and x[j] > 0.0:
                z[j] = x[j]
        t = min(1.0, max(0.0, x[pivot]))
        z[pivot] = t
        trace[0] = t
        return t, 0, 1

    xp_plus = max(0.0, x[pivot])
    p = wp * x[pivot]
    q = wp * wp
    n_active = 0
    bvals = np.empty(n)
    cand = np.empty(n, dtype=np.int64)
    n_cand = 0
    for j in range(n):
        if j == pivot:
            continue
        if x[j] <= 0.0 or w[j] <= 0.0:
            continue
        bj = wp * x[j] / w[j]
        bvals[j] = bj
        if bj > 1.0:
            active[j] = True
            n_active += 1
            p += w[j] * x[j]
            q += w[j] * w[j]
        elif bj >= xp_plus:
            cand[n_cand] = j
            n_cand += 1
        else:
            z[j] = x[j]

    idx = np.arange(n)
    t = wp * p / q
    trace[0] = t
    n_trace = 1
    taken = np.zeros(n, dtype=np.bool_)
    if method == METHOD_HEAP:
        heap = cand[:n_cand].copy()
        size = n_cand
        for pos in range(size // 2 - 1, -1, -1):
            _sift_down(heap, size, pos, bvals, idx)
        while size > 0 and t < bvals[heap[0]]:
            j = heap[0]
            size -= 1
            heap[0] = heap[size]
            _sift_down(heap, size, 0, bvals, idx)
            taken[j] = True
            active[j] = True
            n_active += 1
            p += w[j] * x[j]
            q += w[j] * w[j]
            t = wp * p / q
            trace[n_trace] = t
            n_trace += 1
    else:
        keys = np.empty(n_cand)
        for k in range(n_cand):
            keys[k] = -bvals[cand[k]]
        # stable on index order, which cand already follows
        order = np.argsort(keys, kind="mergesort")
        for k in range(n_cand):
            j = cand[order[k]]
            if not t < bvals[j]:
                break
            taken[j] = True
            active[j] = True
            n_active += 1
            p += w[j] * x[j]
            q += w[j] * w[j]
            t = wp * p / q
            trace[n_trace] = t
            n_trace += 1

    for k in range(n_cand):
        j = cand[k]
        if not taken[j]:
            z[j] = x[j]
    zp = min(1.0, max(0.0, t))
    z[pivot] = zp
    for j in range(n):
        if active[j]:
            z[j] = zp * w[j] / wp
    return t, n_active, n_trace


@njit(cache=True)
def _project_matrix_kernel(X, w, method, Z):
    n = X.shape[0]
    m = X.shape[1]
    active = np.empty(m, dtype=np.bool_)
    trace = np.empty(m + 1)
    z = np.empty(m)
    for i in range(n):
        row = X[i].copy()
        _project_row_kernel(row, w, i, method, z, active, trace)
        for j in range(m):
            Z[i, j] = z[j]


def _check_row_args(x, w, pivot):
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    w = np.ascontiguousarray(w, dtype=np.float64).ravel()
    if x.shape != w.shape:
        raise ValueError(f"x has length {x.size} but w has length {w.size}")
    if not 0 <= pivot < x.size:
        raise IndexError(f"pivot {pivot} out of range for length {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
        raise ValueError("x and w must be finite")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    return x, w, int(pivot)


class RowProjection:
    """Result of a single row projection with scan diagnostics."""

    __slots__ = ("z", "t", "active", "trace")

    def __init__(self, z, t, active, trace):
        self.z = z
        self.t = t
        self.active = active
        self.trace = trace

    @property
    def n_active(self):
        return int(self.active.sum())

    def __repr__(self):
        return f"RowProjection(z={self.z!r}, t={self.t!r}, n_active={self.n_active})"


def project_row_info(x, w, pivot, method="heap"):
    """Project one row and return the realised ``t``, the active (coupled)
    coordinates and the sequence of trial values visited by the scan."""
    x, w, pivot = _check_row_args(x, w, pivot)
    n = x.size
    z = np.empty(n)
    active = np.empty(n, dtype=np.bool_)
    trace = np.empty(n + 1)
    t, _, n_trace = _project_row_kernel(x, w, pivot, _METHODS[method], z, active, trace)
    return RowProjection(z, float(t), active, trace[:n_trace].copy())


def project_row(x, w, pivot, method="heap"):
    """Euclidean projection of ``x`` onto Omega_1(pivot).

    Parameters
    ----------
    x : (n,) array
    w : (n,) nonnegative weights (column l1 norms of the data)
    pivot : int
        Position of the diagonal entry of this row (0-based).
    method : {"heap", "sort"}
        How breakpoints are ordered during the scan. Both give bit-identical
        results.

    Notes
    -----
    If ``w[pivot] == 0`` the coupling constraints impose nothing, and the
    result is ``clip(x[pivot], 0, 1)`` on the pivot and ``max(x_j, 0)``
    elsewhere. Coordinates with ``w_j == 0`` (and ``w[pivot] > 0``) are
    forced to zero.
    """
    return project_row_info(x, w, pivot, method).z


def project_omega(X, w, method="heap"):
    """Project the square matrix ``X`` onto Omega, row by row."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"X must be square, got shape {X.shape}")
    w = np.ascontiguousarray(w, dtype=np.float64).ravel()
    if w.size != X.shape[0]:
        raise ValueError(f"w has length {w.size}, expected {X.shape[0]}")
    Z = np.empty_like(X)
    _project_matrix_kernel(X, w, _METHODS[method], Z)
    return Z


def omega_violation(X, w):
    """Largest violation of the constraints defining Omega (0 if feasible).

    Coupling violations are measured relative to ``1 + w_j``.
    """
    X = np.asarray(X, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    d = np.diag(X)
    neg = max(0.0, -X.min())
    box = max(0.0, (d - 1.0).max())
    coupling = (w[:, None] * X - w[None, :] * d[:, None]) / (1.0 + w[None, :])
    return float(max(neg, box, max(0.0, coupling.max())))


def in_omega(X, w, slack=1e-12):
    return omega_violation(X, w) <= slack


_state_cache = {}


def _states(k):
    # every coordinate: 0 = free, 1 = zero, 2 = coupled to the pivot
    if k not in _state_cache:
        _state_cache[k] = np.array(list(itertools.product((0, 1, 2), repeat=k)),
                                   dtype=np.int8).reshape(-1, k)
    return _state_cache[k]


def brute_force_project_row(x, w, pivot, slack=1e-12):
    """Reference projection onto Omega_1(pivot) by exhaustive enumeration.

    Every combination of active constraints is tried: each non-pivot
    coordinate is either free, held at zero or coupled to the pivot
    (``w_p z_j = w_j z_p``), and the pivot is free, held at 0 or held at 1.
    For each combination the equality-constrained least-squares problem is
    solved in closed form; the best feasible candidate wins. Exponential in
    the length of ``x``; limited to 12 entries.
    """
    x, w, pivot = _check_row_args(x, w, pivot)
    n = x.size
    if n > ORACLE_LIMIT:
        raise ValueError("oracle limit")
    if w[pivot] <= 0.0:
        raise ValueError("oracle requires a positive pivot weight")
    others = np.array([j for j in range(n) if j != pivot], dtype=np.int64)
    xo, wo = x[others], w[others]
    wp, xp = w[pivot], x[pivot]
    S = _states(others.size)
    coupled = S == 2
    free = S == 0

    num = wp * xp + coupled @ (wo * xo)
    den = wp * wp + coupled @ (wo * wo)
    t_free = wp * num / den
    best_z, best_cost = None, np.inf
    for t in (t_free, np.zeros(len(S)), np.ones(len(S))):
        Zo = np.where(free, xo[None, :], 0.0)
        Zo = np.where(coupled, t[:, None] * wo[None, :] / wp, Zo)
        feas = (Zo >= -slack).all(axis=1) & (t >= -slack) & (t <= 1.0 + slack)
        feas &= (wp * Zo <= wo[None, :] * t[:, None] + slack * (1.0 + wo[None, :])).all(axis=1)
        if not feas.any():
            continue
        cost = ((Zo - xo[None, :]) ** 2).sum(axis=1) + (t - xp) ** 2
        cost = np.where(feas, cost, np.inf)
        k = int(np.argmin(cost))
        if cost[k] < best_cost:
            best_cost = cost[k]
            best_z = np.empty(n)
            best_z[others] = Zo[k]
            best_z[pivot] = t[k]
    return np.maximum(best_z, 0.0)
