"""Column subsampling for large data sets.

The columns are grouped into clusters, and each cluster is replaced by its
centroid multiplied by ``sqrt(n_k)``. The self-dictionary fit on the scaled
centroids then weights every cluster by its population, so isolated
outliers count for little.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix

__all__ = [
    "ClusterAssignment",
    "Centroids",
    "assignment_from_labels",
    "centroids_scaled",
    "weighted_centroid_residual",
    "simple_split_cluster",
    "read_labels",
]


@dataclass(frozen=True)
class ClusterAssignment:
    """``labels[j]`` is the cluster (0..C-1) of column ``j``."""

    labels: np.ndarray

    @property
    def n_clusters(self):
        return int(self.labels.max()) + 1

    @property
    def counts(self):
        return np.bincount(self.labels, minlength=self.n_clusters)


def assignment_from_labels(labels):
    """Relabel arbitrary integer ids to ``0..C-1`` in order of first appearance
    sorted by id value."""
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size == 0:
        raise ValueError("labels must be a nonempty 1-D sequence")
    _, inv = np.unique(labels, return_inverse=True)
    return ClusterAssignment(inv.astype(np.int64))


def read_labels(path):
    """One integer cluster id per line, in column order."""
    with open(path) as fh:
        vals = [line.strip() for line in fh]
    vals = [v for v in vals if v]
    return assignment_from_labels(np.array([int(v) for v in vals], dtype=np.int64))


@dataclass(frozen=True)
class Centroids:
    Mc: np.ndarray
    centroids: np.ndarray
    counts: np.ndarray
    colmap: np.ndarray


def centroids_scaled(M, assignment):
    """Scaled centroid matrix.

    Returns
    -------
    Centroids
        ``Mc[:, k] = sqrt(n_k) * mean of cluster k``, the unscaled
        ``centroids``, the ``counts`` and ``colmap[k]``: the member column
        closest (l2) to the unscaled centroid, lowest index on ties.
    """
    M = as_matrix(M)
    if not isinstance(assignment, ClusterAssignment):
        assignment = ClusterAssignment(np.asarray(assignment, dtype=np.int64))
    labels = assignment.labels
    if labels.shape != (M.shape[1],):
        raise ValueError("one label per column required")
    if labels.min() < 0:
        raise ValueError("labels must be nonnegative")
    C = int(labels.max()) + 1
    counts = np.bincount(labels, minlength=C)
    if np.any(counts == 0):
        raise ValueError(f"empty cluster(s): {np.flatnonzero(counts == 0).tolist()}")
    sums = np.zeros((M.shape[0], C))
    np.add.at(sums.T, labels, M.T)
    cent = sums / counts
    dist = np.einsum("ij,ij->j", M - cent[:, labels], M - cent[:, labels])
    order = np.lexsort((np.arange(M.shape[1]), dist, labels))
    first = np.ones(order.size, dtype=bool)
    first[1:] = labels[order[1:]] != labels[order[:-1]]
    colmap = np.empty(C, dtype=np.int64)
    colmap[labels[order[first]]] = order[first]
    return Centroids(Mc=cent * np.sqrt(counts), centroids=cent, counts=counts, colmap=colmap)


def weighted_centroid_residual(centroids, counts, Xc):
    """``sum_k n_k ||c_k - C Xc(:, k)||^2`` for unscaled centroids ``C``.

    With ``D = diag(sqrt(n))`` and ``Mc = C D`` this equals
    ``||Mc - Mc X||_F^2`` for ``X = D^{-1} Xc D``.
    """
    C = np.asarray(centroids, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    R = C - C @ Xc
    return float(counts @ np.einsum("ij,ij->j", R, R))


def _scatter(Z):
    c = Z.mean(axis=1, keepdims=True)
    return float(np.einsum("ij,ij->", Z - c, Z - c))


def _two_means(Z, rng, iters=25):
    n = Z.shape[1]
    start = int(rng.integers(n))
    d0 = np.einsum("ij,ij->j", Z - Z[:, [start]], Z - Z[:, [start]])
    a = int(np.argmax(d0))
    da = np.einsum("ij,ij->j", Z - Z[:, [a]], Z - Z[:, [a]])
    b = int(np.argmax(da))
    centers = Z[:, [a, b]].copy()
    assign = None
    for _ in range(iters):
        # squared distances via the expansion; fine for a 2-way split
        d = (np.einsum("ij,ij->j", Z, Z)[:, None] - 2.0 * Z.T @ centers
             + np.einsum("ij,ij->j", centers, centers)[None, :])
        new = (d[:, 1] < d[:, 0]).astype(np.int64)
        if assign is not None and np.array_equal(new, assign):
            break
        assign = new
        for k in (0, 1):
            sel = assign == k
            if sel.any():
                centers[:, k] = Z[:, sel].mean(axis=1)
    return assign


def simple_split_cluster(M, C, seed=0):
    """Divisive 2-means clustering of the l2-normalised columns.

    Starting from one cluster, the cluster with the largest within-cluster
    scatter is split by 2-means (farthest-point initialisation from a seeded
    random member) until there are ``C`` clusters. Clusters whose members
    coincide are halved by index instead. Deterministic for a fixed seed.
    """
    M = as_matrix(M)
    n = M.shape[1]
    if not 1 <= C <= n:
        raise ValueError(f"C={C} must lie in [1, {n}]")
    nrm = np.linalg.norm(M, axis=0)
    Z = M / np.where(nrm > 0, nrm, 1.0)
    rng = np.random.Generator(np.random.PCG64(seed))
    clusters = [np.arange(n)]
    scatter = [_scatter(Z)]
    while len(clusters) < C:
        cand = [k for k in range(len(clusters)) if clusters[k].size > 1]
        k = max(cand, key=lambda i: (scatter[i], clusters[i].size, -i))
        idx = clusters[k]
        split = None
        if scatter[k] > 0:
            assign = _two_means(Z[:, idx], rng)
            if 0 < assign.sum() < idx.size:
                split = (idx[assign == 0], idx[assign == 1])
        if split is None:
            half = idx.size // 2
            split = (idx[:half], idx[half:])
        clusters[k] = split[0]
        scatter[k] = _scatter(Z[:, split[0]])
        clusters.append(split[1])
        scatter.append(_scatter(Z[:, split[1]]))
    # number clusters by their smallest member so labels do not depend on split order
    clusters.sort(key=lambda c: c.min())
    labels = np.empty(n, dtype=np.int64)
    for lab, idx in enumerate(clusters):
        labels[idx] = lab
    return ClusterAssignment(labels)
