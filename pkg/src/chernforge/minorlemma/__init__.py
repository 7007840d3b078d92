"""Plücker-minor determinant checks over Z_p and Monte Carlo rank statistics."""
from ._backend import BACKEND, det_mod_p, eval_multilinear_derivs, rank_mod_p
from .fppoly import PRIME, FpPoly, Ring
from .lemma import (
    CodimReport,
    FactorReport,
    LemmaReport,
    PluckerMatrix,
    codim_monte_carlo,
    cofactor_columns,
    factor_components,
    lemma_suite,
    multilinearity_check,
    plucker_matrix,
    symbolic_det,
)

__all__ = [
    "BACKEND", "CodimReport", "FactorReport", "FpPoly", "LemmaReport", "PRIME", "PluckerMatrix",
    "Ring", "codim_monte_carlo", "cofactor_columns", "det_mod_p", "eval_multilinear_derivs",
    "factor_components", "lemma_suite", "multilinearity_check", "plucker_matrix", "rank_mod_p",
    "symbolic_det",
]
