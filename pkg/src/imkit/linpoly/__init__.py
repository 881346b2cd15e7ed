"""Polynomials, rational functions, linear systems, and the linear
internal-model pipeline."""

from .poly import Poly, poly_divmod, poly_gcd, poly_roots
from .ratfn import PAIRING_TOL, RationalFn, pair_roots
from .linsys import (
    LinSys,
    char_poly,
    leverrier,
    markov_relative_degree,
    realize_controller_form,
    transfer_function,
)
from .pipeline import (
    EPS_STAB,
    FeedbackDecomposition,
    LinearIMResult,
    StabilityVerdict,
    check_linear_adaptation,
    extract_internal_model_linear,
    feedback_decomposition,
)
from .embedding import (
    DEFAULT_TOL,
    EmbeddingResult,
    observability_matrix,
    observable_split,
    solve_embedding,
)

__all__ = [
    "DEFAULT_TOL",
    "EPS_STAB",
    "EmbeddingResult",
    "FeedbackDecomposition",
    "LinSys",
    "LinearIMResult",
    "PAIRING_TOL",
    "Poly",
    "RationalFn",
    "StabilityVerdict",
    "char_poly",
    "check_linear_adaptation",
    "extract_internal_model_linear",
    "feedback_decomposition",
    "leverrier",
    "markov_relative_degree",
    "observability_matrix",
    "observable_split",
    "pair_roots",
    "poly_divmod",
    "poly_gcd",
    "poly_roots",
    "realize_controller_form",
    "solve_embedding",
    "transfer_function",
]
