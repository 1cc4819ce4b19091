"""Hard-thresholded dual ascent for sparsity-constrained regularized learning."""

from sparsedual._core import (
    Problem,
    SolverAbort,
    estimation_error,
    hard_threshold,
    load_libsvm_problem,
    support_recovered,
    synthetic_problem,
    top_k_indices,
)

__all__ = [
    "Problem",
    "SolverAbort",
    "estimation_error",
    "hard_threshold",
    "load_libsvm_problem",
    "support_recovered",
    "synthetic_problem",
    "top_k_indices",
]
