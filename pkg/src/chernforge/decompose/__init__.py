"""Decomposition of exact 4-forms and 3-forms into sums over regular tuples."""
from .operators import apply_D, apply_Dbar, linearized_apply, linearized_apply_dbar
from .solver import (
    SolveReport,
    SolverOptions,
    decompose_exact_4form,
    independent_residual,
    realize_pontryagin,
    solve_dbar,
)

__all__ = [
    "SolveReport", "SolverOptions", "apply_D", "apply_Dbar", "decompose_exact_4form",
    "independent_residual", "linearized_apply", "linearized_apply_dbar", "realize_pontryagin",
    "solve_dbar",
]
