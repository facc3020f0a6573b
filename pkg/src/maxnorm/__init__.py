"""Low-rank approximation in the maximum norm: solvers, constructions, bounds, experiments."""

__version__ = "0.1.0"

from .apsolve import ApConfig, ApReport, DistanceEstimate, ap_run, estimate_distance, project_ball, project_rank
from .diagnostics import (
    BoundReport,
    MatrixDiagnostics,
    alon_rank,
    bound_report,
    coherence,
    cross_bound,
    diagnose,
    thm4_bound,
    thm8_bound,
    udell_rank,
)
from .embeddings import ConstructReport, SplitFactors, hw_approximant, jl_approximant, split_factors, verify_construction
from .genmat import MatrixSpec, banded_uniform, generate, hadamard, identity, stiefel_product, uniform
from .matcore import (
    LowRankFactors,
    fro_norm,
    make_rng,
    max_norm,
    qr_thin,
    read_matrix,
    rsvd_truncate,
    spectral_norm,
    svd_dense,
    write_matrix,
)
