"""The nonlinear operators D, Dbar and their linearizations on tuples of 1-forms.

Array conventions: a tuple is ``W`` of shape (q, m, *grid); its derivative
``F = dW`` has shape (q, C(m,2), *grid).
"""
from __future__ import annotations

import numpy as np

from ..errors import DegreeError, GridMismatch
from ..regtuples import OneFormTuple
from ..torusforms import DiffForm, TorusGrid
from ..torusforms.forms import codiff_arrays, d_arrays, wedge_arrays
from .._combinatorics import wedge_table


def wedge_transpose(y: np.ndarray, F: np.ndarray, m: int, p: int, q: int) -> np.ndarray:
    """Pointwise transpose of beta -> beta ^ F for fixed degree-q ``F``.

    Returns z of degree p with <z, beta> = <y, beta ^ F> pointwise; broadcasts
    over leading dimensions of ``F``.
    """
    from math import comb

    lead = F.shape[:-m - 1]
    out = np.zeros(lead + (comb(m, p),) + F.shape[-m:])
    for k, i, j, sign in wedge_table(m, p, q):
        out[(Ellipsis, i) + (slice(None),) * m] += sign * F[(Ellipsis, j) + (slice(None),) * m] * y[k]
    return out


def D_arrays(F: np.ndarray, m: int) -> np.ndarray:
    return wedge_arrays(F, F, m, 2, 2).sum(axis=0)


def L_arrays(F: np.ndarray, dA: np.ndarray, m: int) -> np.ndarray:
    """2 sum_i dA_i ^ F_i."""
    return 2.0 * wedge_arrays(dA, F, m, 2, 2).sum(axis=0)


def LT_arrays(F: np.ndarray, y: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Grid adjoint of A -> 2 sum_i d A_i ^ F_i."""
    z = wedge_transpose(y, F, grid.m, 2, 2)
    return 2.0 * codiff_arrays(z, grid, 2)


def _tuple_array(t) -> tuple[TorusGrid, np.ndarray]:
    if isinstance(t, OneFormTuple):
        return t.grid, t.array
    t = OneFormTuple(t)
    return t.grid, t.array


def apply_D(t) -> DiffForm:
    """sum_i d w_i ^ d w_i."""
    grid, W = _tuple_array(t)
    if grid.m < 4:
        raise DegreeError("D produces 4-forms; need m >= 4")
    return DiffForm(grid, 4, D_arrays(d_arrays(W, grid, 1), grid.m))


def apply_Dbar(t, phi: DiffForm | None = None) -> DiffForm:
    """sum_i w_i ^ d w_i + d phi."""
    grid, W = _tuple_array(t)
    if grid.m < 3:
        raise DegreeError("Dbar produces 3-forms; need m >= 3")
    F = d_arrays(W, grid, 1)
    out = wedge_arrays(W, F, grid.m, 1, 2).sum(axis=0)
    if phi is not None:
        if phi.grid != grid:
            raise GridMismatch("phi lives on a different grid")
        if phi.degree != 2:
            raise DegreeError("phi must be a 2-form")
        out = out + phi.d().data
    return DiffForm(grid, 3, out)


def _increment_array(t: OneFormTuple, a) -> np.ndarray:
    grid, A = _tuple_array(a)
    if grid != t.grid or A.shape != t.array.shape:
        raise ValueError("increment shape does not match the tuple")
    return A


def linearized_apply(t, a) -> DiffForm:
    """Derivative of D at t in direction a: 2 sum_i d a_i ^ d w_i."""
    t = t if isinstance(t, OneFormTuple) else OneFormTuple(t)
    A = _increment_array(t, a)
    grid = t.grid
    if grid.m < 4:
        raise DegreeError("need m >= 4")
    F = d_arrays(t.array, grid, 1)
    return DiffForm(grid, 4, L_arrays(F, d_arrays(A, grid, 1), grid.m))


def linearized_apply_dbar(t, a) -> DiffForm:
    """Derivative of sum w_i ^ d w_i in direction a: sum (a_i ^ d w_i + w_i ^ d a_i)."""
    t = t if isinstance(t, OneFormTuple) else OneFormTuple(t)
    A = _increment_array(t, a)
    grid, m = t.grid, t.grid.m
    W = t.array
    F = d_arrays(W, grid, 1)
    dA = d_arrays(A, grid, 1)
    return DiffForm(grid, 3, (wedge_arrays(A, F, m, 1, 2) + wedge_arrays(W, dA, m, 1, 2)).sum(axis=0))
