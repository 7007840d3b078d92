"""Discrete exterior calculus on flat tori with spectral differentiation."""
from .forms import (
    DEFAULT_EXACT_TOL,
    DiffForm,
    ExactnessReport,
    codifferential,
    exterior_d,
    harmonic_part,
    hodge_primitive,
    integrate,
    is_exact,
    random_form,
    wedge,
)
from .grid import Spectral, TorusGrid
from .trig import TrigPoly, TrigSpec, random_trig_poly, random_trig_spec, scalar_spec


def eval_trig_spec(spec: TrigSpec, grid: TorusGrid) -> DiffForm:
    return spec.evaluate(grid)


__all__ = [
    "DEFAULT_EXACT_TOL", "DiffForm", "ExactnessReport", "Spectral", "TorusGrid", "TrigPoly",
    "TrigSpec", "codifferential", "eval_trig_spec", "exterior_d", "harmonic_part",
    "hodge_primitive", "integrate", "is_exact", "random_form", "random_trig_poly",
    "random_trig_spec", "scalar_spec", "wedge",
]
