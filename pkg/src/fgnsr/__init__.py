"""Near-separable NMF by fast-gradient nonnegative sparse regression with a
self dictionary, plus greedy baselines, synthetic benchmarks and cluster
subsampling."""

from .baselines import GreedySelection, RankExhausted, normalize_columns_l1, snpa, spa, xray_max
from .linalg import col_l1_norms, frob_norm, nnls_cd, spectral_norm_sq
from .metrics import index_recovery, mrsa, rel_approx_measure, rel_error_pct
from .preselect import ClusterAssignment, centroids_scaled, simple_split_cluster
from .projection import brute_force_project_row, project_omega, project_row
from .solver import (ExtractionResult, SolverConfig, SolverError, estimate_mu, fgnsr,
                     postprocess_spa_rows, postprocess_topdiag, solve)
from .synthgen import SyntheticInstance, gen_middlepoint, gen_scaled_middlepoint

__version__ = "0.1.0"

__all__ = [
    "GreedySelection", "RankExhausted", "normalize_columns_l1", "snpa", "spa", "xray_max",
    "col_l1_norms", "frob_norm", "nnls_cd", "spectral_norm_sq",
    "index_recovery", "mrsa", "rel_approx_measure", "rel_error_pct",
    "ClusterAssignment", "centroids_scaled", "simple_split_cluster",
    "brute_force_project_row", "project_omega", "project_row",
    "ExtractionResult", "SolverConfig", "SolverError", "estimate_mu", "fgnsr",
    "postprocess_spa_rows", "postprocess_topdiag", "solve",
    "SyntheticInstance", "gen_middlepoint", "gen_scaled_middlepoint",
]
