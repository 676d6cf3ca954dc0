"""Algorithm registry, the unmixing pipeline and the noise sweep harness."""

import time
from dataclasses import dataclass

import numpy as np

from .baselines import normalize_columns_l1, snpa, spa, xray_max
from .metrics import (METRIC_NNLS_SWEEPS, METRIC_NNLS_TOL, index_recovery, mrsa,
                      nnls_residual)
from .preselect import centroids_scaled, simple_split_cluster
from .solver import SolverConfig, solve
from .synthgen import gen_middlepoint, gen_scaled_middlepoint

__all__ = [
    "ALGORITHMS",
    "SWEEP_FIELDS",
    "Selection",
    "select_columns",
    "unmix",
    "sweep_seed",
    "run_sweep",
]

ALGORITHMS = ("fgnsr", "fgnsr-dynamic", "fgnsr-normalized", "spa", "spa-normalized",
              "snpa", "xray")
SWEEP_FIELDS = ("algorithm", "eps", "trial_seed", "index_recovery", "mrsa_mean",
                "rel_measure", "runtime_seconds")


@dataclass
class Selection:
    K: list
    diag: np.ndarray = None
    row_norms: np.ndarray = None
    mu_used: float = None
    complete: bool = True


def select_columns(M, algorithm, r, maxiter=1000, mu_mode="heuristic", mu=None,
                   eps_target=None, postprocess="topdiag"):
    """Run one of :data:`ALGORITHMS` on ``M`` and return the chosen columns.

    ``*-normalized`` variants scale the columns of ``M`` to unit l1 norm
    first. ``fgnsr-dynamic`` steers the residual towards ``eps_target``
    (heuristic mu if the target is zero). XRAY is run without the
    nonnegativity check because noisy benchmark data dips below zero.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    base = algorithm.split("-")[0]
    A = normalize_columns_l1(M) if algorithm.endswith("-normalized") else M
    if base == "spa":
        return Selection(spa(A, r).K)
    if base == "snpa":
        return Selection(snpa(A, r).K)
    if base == "xray":
        return Selection(xray_max(A, r, allow_negative=True).K)
    if algorithm == "fgnsr-dynamic":
        if eps_target:
            mu_mode = "dynamic"
        else:
            mu_mode = "heuristic"
            eps_target = None
    cfg = SolverConfig(r=r, mu=mu, mu_mode=mu_mode, eps_target=eps_target, maxiter=maxiter,
                       postprocess=postprocess)
    res = solve(A, cfg)
    return Selection(res.K, diag=res.diag, row_norms=np.linalg.norm(res.X_final, axis=1),
                     mu_used=res.mu_used, complete=res.complete)


def unmix(M, algorithm, r, preselect_C=None, labels=None, seed=0, **kwargs):
    """Select ``r`` columns of ``M``, optionally after cluster subsampling.

    With ``labels`` (a :class:`~fgnsr.preselect.ClusterAssignment`) or
    ``preselect_C`` the algorithm runs on the ``sqrt(n_k)``-scaled centroids
    and the picks are mapped back to representative original columns.

    Returns a JSON-ready dict.
    """
    t0 = time.perf_counter()
    centroids = None
    if labels is None and preselect_C is not None:
        labels = simple_split_cluster(M, preselect_C, seed=seed)
    if labels is not None:
        centroids = centroids_scaled(M, labels)
        sel = select_columns(centroids.Mc, algorithm, r, **kwargs)
        K = [int(centroids.colmap[k]) for k in sel.K]
    else:
        sel = select_columns(M, algorithm, r, **kwargs)
        K = [int(k) for k in sel.K]
    runtime = time.perf_counter() - t0

    diagnostics = []
    l1 = np.abs(M).sum(axis=0)
    for pos, k in enumerate(K):
        entry = {"index": k, "column_l1": float(l1[k]), "column_l2": float(np.linalg.norm(M[:, k]))}
        if sel.diag is not None:
            entry["X_diag"] = float(sel.diag[sel.K[pos]])
            entry["X_row_norm"] = float(sel.row_norms[sel.K[pos]])
        if centroids is not None:
            entry["cluster"] = int(sel.K[pos])
            entry["cluster_size"] = int(centroids.counts[sel.K[pos]])
        diagnostics.append(entry)

    res = nnls_residual(M, K)
    out = {
        "algorithm": algorithm,
        "r": int(r),
        "m": int(M.shape[0]),
        "n": int(M.shape[1]),
        "indices": K,
        "diagnostics": diagnostics,
        "rel_error_pct": 100.0 * res / float(np.linalg.norm(M)),
        "nnls": {"sweeps": METRIC_NNLS_SWEEPS, "tol": METRIC_NNLS_TOL},
        "runtime_seconds": runtime,
        "complete": bool(sel.complete),
    }
    if sel.mu_used is not None:
        out["mu"] = float(sel.mu_used)
    if centroids is not None:
        out["preselect_clusters"] = int(centroids.counts.size)
    return out


def sweep_seed(base_seed, eps_index, trial):
    """Instance seed for one (noise level, trial) cell."""
    return int(np.random.SeedSequence([base_seed, eps_index, trial]).generate_state(1)[0])


def run_sweep(kind, m, r, eps_list, trials, algorithms, alpha=4.0, base_seed=0,
              maxiter=1000, progress=None):
    """Run every algorithm on every (noise level, trial) instance.

    Returns one dict per (algorithm, eps, trial) with the fields of
    :data:`SWEEP_FIELDS`. Everything except ``runtime_seconds`` is
    deterministic for fixed arguments.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    rows = []
    for ei, eps in enumerate(eps_list):
        for t in range(trials):
            seed = sweep_seed(base_seed, ei, t)
            if kind == "middlepoint":
                inst = gen_middlepoint(m, r, eps, seed)
            elif kind == "scaled":
                inst = gen_scaled_middlepoint(m, r, eps, alpha, seed)
            else:
                raise ValueError(f"unknown kind {kind!r}")
            M = inst.M
            for a in algorithms:
                t0 = time.perf_counter()
                K = select_columns(M, a, r, maxiter=maxiter, eps_target=eps).K
                runtime = time.perf_counter() - t0
                rows.append({
                    "algorithm": a,
                    "eps": float(eps),
                    "trial_seed": seed,
                    "index_recovery": index_recovery(K, inst.K_true),
                    "mrsa_mean": mrsa(M[:, sorted(K)], inst.W_true),
                    "rel_measure": float(np.clip(1.0 - nnls_residual(M, K) / np.linalg.norm(M), 0.0, 1.0)),
                    "runtime_seconds": runtime,
                })
            if progress is not None:
                progress(ei, t)
    return rows


def summarize(rows):
    """Mean of each measure per (algorithm, eps), keyed in that order."""
    acc = {}
    for row in rows:
        key = (row["algorithm"], row["eps"])
        acc.setdefault(key, []).append(row)
    out = {}
    for key, group in acc.items():
        out[key] = {f: float(np.mean([g[f] for g in group]))
                    for f in ("index_recovery", "mrsa_mean", "rel_measure")}
    return out
