"""Synthetic near-separable test matrices.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``, whose
stream is stable across platforms for a fixed numpy release.
"""

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SyntheticInstance",
    "PlantedClusters",
    "gen_middlepoint",
    "gen_scaled_middlepoint",
    "gen_planted_clusters",
    "middlepoint_count",
]


@dataclass(frozen=True)
class SyntheticInstance:
    M: np.ndarray
    W_true: np.ndarray
    K_true: list
    H_true: np.ndarray
    eps: float
    seed: int
    alpha: float = 1.0
    kind: str = "middlepoint"

    @property
    def shape(self):
        return self.M.shape

    @property
    def r(self):
        return self.W_true.shape[1]

    @property
    def noise(self):
        return self.M - self.W_true @ self.H_true

    def metadata(self):
        m, n = self.M.shape
        return {
            "kind": self.kind,
            "m": int(m),
            "n": int(n),
            "r": int(self.r),
            "eps": float(self.eps),
            "alpha": float(self.alpha),
            "seed": int(self.seed),
            "K_true": [int(k) for k in self.K_true],
        }

    def metadata_json(self):
        return json.dumps(self.metadata(), sort_keys=True, indent=1) + "\n"


def middlepoint_count(r):
    return r + r * (r - 1) // 2


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _build(m, r, eps, seed, alpha, kind):
    if m < 1:
        raise ValueError("m must be >= 1")
    if r < 2:
        raise ValueError("r must be >= 2")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    rng = _rng(seed)
    W = rng.random((m, r))
    W /= W.sum(axis=0)

    pairs = list(itertools.combinations(range(r), 2))
    n = r + len(pairs)
    H = np.zeros((r, n))
    H[:, :r] = np.eye(r)
    for k, (a, b) in enumerate(pairs):
        H[a, r + k] = 0.5
        H[b, r + k] = 0.5
    perm = rng.permutation(n)
    # drawn after the permutation so alpha = 1 reproduces the unscaled stream
    scales = alpha ** rng.uniform(-1.0, 1.0, size=len(pairs))
    H[:, r:] *= scales

    clean = W @ H
    wbar = W.mean(axis=1)
    N = np.zeros((m, n))
    N[:, r:] = clean[:, r:] - wbar[:, None]
    nrm = np.linalg.norm(N)
    if eps == 0 or nrm == 0:
        N[:] = 0.0
    else:
        N *= eps / nrm

    M = (clean + N)[:, perm]
    H = H[:, perm]
    inv = np.empty(n, dtype=np.int64)
    inv[perm] = np.arange(n)
    K_true = [int(inv[k]) for k in range(r)]
    return SyntheticInstance(M=M, W_true=W, K_true=K_true, H_true=H, eps=float(eps),
                             seed=int(seed), alpha=float(alpha), kind=kind)


def gen_middlepoint(m, r, eps, seed):
    """Middle-point data set: the r columns of a random column-stochastic W,
    plus the midpoints of every pair of them pushed away from the vertex
    centroid by noise of Frobenius norm ``eps``; columns randomly permuted.

    ``K_true[k]`` is the position of ``W_true[:, k]`` in ``M``.
    """
    return _build(m, r, eps, seed, 1.0, "middlepoint")


def gen_scaled_middlepoint(m, r, eps, alpha, seed):
    """Like :func:`gen_middlepoint`, but every middle-point column of H is
    multiplied by an independent log-uniform scalar in ``[1/alpha, alpha]``
    before the noise is formed, so the columns of H no longer sum to one."""
    return _build(m, r, eps, seed, alpha, "scaled")


@dataclass(frozen=True)
class PlantedClusters:
    M: np.ndarray
    W_true: np.ndarray
    dominant: np.ndarray
    outliers: np.ndarray = field(repr=False)


def gen_planted_clusters(m, r, n, seed, outlier_frac=0.01, mix=0.3, noise=0.01,
                         outlier_scale=3.0):
    """Clustered data around ``r`` planted endmembers.

    Each regular column is ``W ((1 - d) e_k + d h) + noise`` with a dominant
    endmember ``k`` chosen uniformly, ``d`` uniform on ``[0, mix]`` and ``h``
    a flat Dirichlet draw. A fraction ``outlier_frac`` of the columns are
    replaced by random nonnegative vectors ``outlier_scale`` times brighter
    than a typical pixel; their ``dominant`` label is -1.
    """
    rng = _rng(seed)
    W = rng.random((m, r))
    W /= W.sum(axis=0)
    dominant = rng.integers(0, r, size=n)
    d = rng.uniform(0.0, mix, size=n)
    Hmix = rng.dirichlet(np.ones(r), size=n).T
    H = d * Hmix
    H[dominant, np.arange(n)] += 1.0 - d
    M = W @ H
    M += noise * rng.standard_normal((m, n)) * M.mean()
    np.maximum(M, 0.0, out=M)
    n_out = int(round(outlier_frac * n))
    out_idx = np.sort(rng.choice(n, size=n_out, replace=False))
    if n_out:
        O = rng.random((m, n_out))
        O *= outlier_scale / O.sum(axis=0)
        M[:, out_idx] = O
        dominant[out_idx] = -1
    return PlantedClusters(M=M, W_true=W, dominant=dominant, outliers=out_idx)
