"""Connections on trivial Sp(k)-bundles over flat tori and their Pontrjagin forms.

A connection is an sp(k)-valued 1-form.  To keep the rank-q diagonal
connections of the decomposition pipeline affordable, :class:`MatrixOneForm`
stores a block-diagonal structure: each block is a dense connection in the
J-convention of its own rank, and the dense form interleaves the blocks' A and
B quadrants into the J-convention of the total rank.  Everything that depends
on the interleaving (membership checks, additivity) can be run on
``densify()``.

Normalization: p_1(w) = -1/2 trace(Omega ^ Omega), which makes the diagonal
connection diag(i w_1.., -i w_1..) have p_1 = sum (d w_i)^2.  The secondary
form carries the matching constant -1 on int_0^1 trace(alpha ^ D(w + t alpha)) dt.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from ._combinatorics import wedge_table
from .errors import AlgebraCheckFailed, DegreeError, GridMismatch
from .quatlin import _sp_residuals
from .torusforms import DiffForm, TorusGrid
from .torusforms.forms import d_arrays

P1_NORMALIZATION = -0.5
SECONDARY_NORMALIZATION = 2 * P1_NORMALIZATION
MEMBERSHIP_TOL = 1e-10
MAX_DENSE_RANK = 8


@dataclass(frozen=True)
class PontryaginNormalization:
    c1: float = P1_NORMALIZATION


def _spatial_d(X: np.ndarray, grid: TorusGrid, p: int) -> np.ndarray:
    """Exterior derivative of an sp(k)-valued form with layout (C, *grid, 2k, 2k).

    d is real and commutes with the sp(k) symmetries, so only the top block
    row [A, B] is differentiated and the bottom row [-conj(B), -A^T] is rebuilt.
    """
    k = X.shape[-1] // 2
    top = np.moveaxis(X[..., :k, :], (-2, -1), (0, 1))  # (k, 2k, C, *grid)
    dtop = d_arrays(top.real, grid, p) + 1j * d_arrays(top.imag, grid, p)
    dtop = np.moveaxis(dtop, (0, 1), (-2, -1))
    out = np.empty(dtop.shape[:-2] + (2 * k, 2 * k), dtype=complex)
    out[..., :k, :] = dtop
    out[..., k:, :k] = -np.conj(dtop[..., :, k:])
    out[..., k:, k:] = -np.swapaxes(dtop[..., :, :k], -1, -2)
    return out


def _matrix_wedge(a: np.ndarray, b: np.ndarray, m: int, p: int, q: int) -> np.ndarray:
    out = np.zeros((comb(m, p + q),) + np.broadcast_shapes(a.shape[1:], b.shape[1:]), dtype=complex)
    prod = np.empty(out.shape[1:], dtype=complex)
    for k, i, j, sign in wedge_table(m, p, q):
        np.matmul(a[i], b[j], out=prod)
        if sign > 0:
            out[k] += prod
        else:
            out[k] -= prod
    return out


def _trace_wedge(a: np.ndarray, b: np.ndarray, m: int, p: int, q: int) -> np.ndarray:
    """trace(a ^ b) without forming the matrix products."""
    out = np.zeros((comb(m, p + q),) + a.shape[1:-2], dtype=complex)
    for k, i, j, sign in wedge_table(m, p, q):
        out[k] += sign * np.einsum("...ab,...ba->...", a[i], b[j])
    return out


def _block_offsets(ranks: Sequence[int]) -> list[int]:
    offs, acc = [], 0
    for r in ranks:
        offs.append(acc)
        acc += r
    return offs


def _interleave(blocks: Sequence[np.ndarray], lead_shape) -> np.ndarray:
    ranks = [b.shape[-1] // 2 for b in blocks]
    k = sum(ranks)
    out = np.zeros(tuple(lead_shape) + (2 * k, 2 * k), dtype=complex)
    for blk, o, kb in zip(blocks, _block_offsets(ranks), ranks):
        for r_src, r_dst in ((slice(0, kb), slice(o, o + kb)), (slice(kb, 2 * kb), slice(k + o, k + o + kb))):
            for c_src, c_dst in ((slice(0, kb), slice(o, o + kb)), (slice(kb, 2 * kb), slice(k + o, k + o + kb))):
                out[..., r_dst, c_dst] = blk[..., r_src, c_src]
    return out


class _BlockForm:
    degree = 0

    def __init__(self, grid: TorusGrid, blocks: Sequence[np.ndarray]):
        if not blocks:
            raise ValueError("a matrix form needs at least one block (rank >= 1)")
        ncomp = comb(grid.m, self.degree)
        clean = []
        for blk in blocks:
            blk = np.array(blk, dtype=complex)
            r = blk.shape[-1]
            if blk.shape != (ncomp,) + grid.shape + (r, r) or r % 2:
                raise ValueError(f"block shape {blk.shape} does not fit grid {grid} and degree {self.degree}")
            blk.setflags(write=False)
            clean.append(blk)
        self.grid = grid
        self.blocks = tuple(clean)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(b.shape[-1] // 2 for b in self.blocks)

    @property
    def rank(self) -> int:
        return sum(self.ranks)

    def dense(self) -> np.ndarray:
        if len(self.blocks) == 1:
            return self.blocks[0]
        return _interleave(self.blocks, self.blocks[0].shape[:-2])

    def sup_norm(self) -> float:
        return max(float(np.abs(b).max()) for b in self.blocks)


class MatrixOneForm(_BlockForm):
    """An sp(k)-valued 1-form; each block has layout (m, *grid, 2k_b, 2k_b)."""

    degree = 1

    def __init__(self, grid: TorusGrid, blocks: Sequence[np.ndarray], check: bool = True):
        super().__init__(grid, blocks)
        if check:
            res = self.membership_residual()
            if res > MEMBERSHIP_TOL * max(1.0, self.sup_norm()):
                raise AlgebraCheckFailed(f"connection leaves sp(k): residual {res:.3e}")

    @classmethod
    def from_dense(cls, grid: TorusGrid, data: np.ndarray, check: bool = True) -> "MatrixOneForm":
        return cls(grid, [data], check=check)

    @classmethod
    def zero(cls, grid: TorusGrid, k: int) -> "MatrixOneForm":
        return cls(grid, [np.zeros((grid.m,) + grid.shape + (2 * k, 2 * k), dtype=complex)], check=False)

    def membership_residual(self) -> float:
        worst = 0.0
        for blk in self.blocks:
            skew, sym = _sp_residuals(blk)
            worst = max(worst, float(skew.max()), float(sym.max()))
        return worst

    def densify(self) -> "MatrixOneForm":
        return MatrixOneForm(self.grid, [self.dense()], check=False)

    def same_structure(self, other: "MatrixOneForm") -> bool:
        return self.grid == other.grid and self.ranks == other.ranks

    def __add__(self, other: "MatrixOneForm") -> "MatrixOneForm":
        if self.grid != other.grid:
            raise GridMismatch("grid mismatch")
        if self.ranks == other.ranks:
            return MatrixOneForm(self.grid, [a + b for a, b in zip(self.blocks, other.blocks)], check=False)
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")
        return MatrixOneForm.from_dense(self.grid, self.dense() + other.dense(), check=False)

    def scale(self, t: float) -> "MatrixOneForm":
        return MatrixOneForm(self.grid, [t * b for b in self.blocks], check=False)

    def to_dict(self) -> dict:
        X = self.dense()
        return {
            "rank": self.rank,
            "grid": {"m": self.grid.m, "n": self.grid.n},
            "components": [np.stack([X[a].real, X[a].imag], axis=-1).tolist() for a in range(self.grid.m)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatrixOneForm":
        grid = TorusGrid(int(data["grid"]["m"]), int(data["grid"]["n"]))
        arr = np.asarray(data["components"], dtype=float)
        return cls.from_dense(grid, arr[..., 0] + 1j * arr[..., 1])


class MatrixTwoForm(_BlockForm):
    """Curvature-type form; each block has layout (C(m, 2), *grid, 2k_b, 2k_b)."""

    degree = 2


def _block_curvature(blk: np.ndarray, grid: TorusGrid) -> np.ndarray:
    return _spatial_d(blk, grid, 1) + _matrix_wedge(blk, blk, grid.m, 1, 1)


def curvature(omega: MatrixOneForm) -> MatrixTwoForm:
    """Omega = d omega + omega ^ omega, block by block."""
    return MatrixTwoForm(omega.grid, [_block_curvature(b, omega.grid) for b in omega.blocks])


def _real_top(values: np.ndarray, what: str, scale: float, tol: float = 1e-9) -> np.ndarray:
    imag = float(np.abs(values.imag).max()) if values.size else 0.0
    if imag > tol * max(scale, 1.0):
        raise AlgebraCheckFailed(f"{what} has imaginary residual {imag:.3e}")
    return values.real


def pontryagin1(omega: MatrixOneForm, check_closed: bool = True) -> DiffForm:
    """First symplectic Pontrjagin form -1/2 trace(Omega ^ Omega) as a real 4-form."""
    grid = omega.grid
    m = grid.m
    if m < 4:
        raise DegreeError("p_1 is a 4-form; need m >= 4")
    total = np.zeros((comb(m, 4),) + grid.shape, dtype=complex)
    scale = 0.0
    for blk in omega.blocks:
        F = _block_curvature(blk, grid)
        total += _trace_wedge(F, F, m, 2, 2)
        scale = max(scale, float(np.abs(F).max()) ** 2 * F.shape[-1])
    p1 = DiffForm(grid, 4, P1_NORMALIZATION * _real_top(total, "trace(Omega^Omega)", scale))
    if check_closed and m > 4:
        dp = p1.d().sup_norm()
        if dp > 1e-8 * max(scale, 1.0):
            raise AlgebraCheckFailed(f"p_1 is not closed: |d p_1| = {dp:.3e}")
    return p1


def direct_sum(omega: MatrixOneForm, other: MatrixOneForm) -> MatrixOneForm:
    if omega.grid != other.grid:
        raise GridMismatch(f"grid mismatch: {omega.grid} vs {other.grid}")
    return MatrixOneForm(omega.grid, omega.blocks + other.blocks, check=False)


def _stack_one_forms(*forms: DiffForm) -> TorusGrid:
    grid = forms[0].grid
    for f in forms:
        if f.grid != grid:
            raise GridMismatch("all 1-forms must share one grid")
        if f.degree != 1:
            raise DegreeError("expected 1-forms")
    return grid


def sp1_connection(alpha: DiffForm, beta: DiffForm, gamma: DiffForm) -> MatrixOneForm:
    """[[i alpha, beta + i gamma], [-beta + i gamma, -i alpha]]."""
    grid = _stack_one_forms(alpha, beta, gamma)
    a, b, c = alpha.data, beta.data, gamma.data
    blk = np.empty((grid.m,) + grid.shape + (2, 2), dtype=complex)
    blk[..., 0, 0] = 1j * a
    blk[..., 0, 1] = b + 1j * c
    blk[..., 1, 0] = -b + 1j * c
    blk[..., 1, 1] = -1j * a
    return MatrixOneForm(grid, [blk], check=False)


def diag_connection(entries: Sequence[DiffForm]) -> MatrixOneForm:
    """diag(i w_1, ..., i w_q, -i w_1, ..., -i w_q), stored as q rank-1 blocks."""
    entries = list(getattr(entries, "entries", entries))
    if not entries:
        raise ValueError("diag_connection needs q >= 1 entries")
    grid = _stack_one_forms(*entries)
    blocks = []
    for w in entries:
        blk = np.zeros((grid.m,) + grid.shape + (2, 2), dtype=complex)
        blk[..., 0, 0] = 1j * w.data
        blk[..., 1, 1] = -1j * w.data
        blocks.append(blk)
    return MatrixOneForm(grid, blocks, check=False)


def secondary_form(omega: MatrixOneForm, alpha: MatrixOneForm,
                   normalization: float = SECONDARY_NORMALIZATION) -> DiffForm:
    """Transgression 3-form with d(result) = p_1(omega + alpha) - p_1(omega).

    The integrand trace(alpha ^ D(omega + t alpha)) is quadratic in t:
    F_omega + t (d alpha + omega^alpha + alpha^omega) + t^2 alpha^alpha, so
    the t-integral is taken exactly with weights 1, 1/2, 1/3.
    """
    if omega.grid != alpha.grid:
        raise GridMismatch("grid mismatch")
    if omega.rank != alpha.rank:
        raise ValueError(f"rank mismatch: {omega.rank} vs {alpha.rank}")
    grid = omega.grid
    m = grid.m
    if m < 3:
        raise DegreeError("secondary form is a 3-form; need m >= 3")
    if omega.ranks == alpha.ranks:
        pairs = list(zip(omega.blocks, alpha.blocks))
    else:
        pairs = [(omega.dense(), alpha.dense())]
    total = np.zeros((comb(m, 3),) + grid.shape, dtype=complex)
    scale = 0.0
    for w, a in pairs:
        F = _block_curvature(w, grid)
        da = _spatial_d(a, grid, 1)
        mixed = _matrix_wedge(w, a, m, 1, 1) + _matrix_wedge(a, w, m, 1, 1)
        aa = _matrix_wedge(a, a, m, 1, 1)
        total += _trace_wedge(a, F, m, 1, 2)
        total += 0.5 * _trace_wedge(a, da + mixed, m, 1, 2)
        total += (1.0 / 3.0) * _trace_wedge(a, aa, m, 1, 2)
        scale = max(scale, float(np.abs(a).max()) * max(float(np.abs(F).max()), float(np.abs(da).max()), 1.0))
    return DiffForm(grid, 3, normalization * _real_top(total, "secondary integrand", scale * omega.rank))


@dataclass
class Sp1FormulaReport:
    p1_sup: float
    candidate_sup: float
    discrepancies: dict
    omega_wedge_omega_sup: float
    omega_wedge_omega_vanishes: bool
    best_constant: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def sp1_formula_check(alpha: DiffForm, beta: DiffForm, gamma: DiffForm,
                      tol: float = 1e-9) -> Sp1FormulaReport:
    """Compare p_1 of the sp(1) connection against c((d alpha)^2 + (d beta)^2 + (d gamma)^2)."""
    conn = sp1_connection(alpha, beta, gamma)
    grid = conn.grid
    if grid.m < 4:
        raise DegreeError("need m >= 4")
    p1 = pontryagin1(conn)
    da, db, dc = alpha.d(), beta.d(), gamma.d()
    cand = (da ^ da) + (db ^ db) + (dc ^ dc)
    discrepancies = {}
    for c in (1.0, -1.0, 0.5, -0.5):
        discrepancies[str(c)] = float(np.abs(p1.data - c * cand.data).max())
    blk = conn.blocks[0]
    ww = _matrix_wedge(blk, blk, grid.m, 1, 1)
    ww_sup = float(np.abs(ww).max())
    scale = max(conn.sup_norm() ** 2, 1e-300)
    best = min(discrepancies, key=discrepancies.get)
    return Sp1FormulaReport(p1.sup_norm(), cand.sup_norm(), discrepancies, ww_sup,
                            ww_sup <= tol * scale, float(best))


def connection_from_descriptor(desc: dict, grid: TorusGrid) -> MatrixOneForm:
    """Build a connection from a block-structure descriptor over TrigSpec scalars.

    ``{"type": "diag", "entries": [spec, ...]}``,
    ``{"type": "sp1", "alpha": spec, "beta": spec, "gamma": spec}``,
    ``{"type": "direct_sum", "parts": [desc, ...]}`` or a raw dense connection dict.
    """
    from .torusforms import TrigSpec

    kind = desc.get("type")
    if kind == "diag":
        return diag_connection([TrigSpec.from_dict(s).evaluate(grid) for s in desc["entries"]])
    if kind == "sp1":
        a, b, c = (TrigSpec.from_dict(desc[key]).evaluate(grid) for key in ("alpha", "beta", "gamma"))
        return sp1_connection(a, b, c)
    if kind == "direct_sum":
        parts = [connection_from_descriptor(p, grid) for p in desc["parts"]]
        out = parts[0]
        for p in parts[1:]:
            out = direct_sum(out, p)
        return out
    if "components" in desc:
        return MatrixOneForm.from_dict(desc)
    raise ValueError(f"unknown connection descriptor type {kind!r}")


def random_connection(grid: TorusGrid, k: int, h: int, seed, amplitude: float = 1.0) -> MatrixOneForm:
    """Dense sp(k)-valued 1-form whose real parameters are band-limited trig forms.

    A (skew-Hermitian) takes k^2 real 1-forms and B (complex symmetric) k(k+1)
    real 1-forms; the matrix is [[A, B], [-conj(B), -A^T]].
    """
    from .torusforms import random_trig_spec

    rng = np.random.default_rng(seed)

    def draw() -> np.ndarray:
        return random_trig_spec(grid.m, 1, h, int(rng.integers(2 ** 32)), amplitude).evaluate(grid).data

    lead = (grid.m,) + grid.shape
    A = np.zeros(lead + (k, k), dtype=complex)
    B = np.zeros(lead + (k, k), dtype=complex)
    for a in range(k):
        A[..., a, a] = 1j * draw()
        for b in range(a + 1, k):
            z = draw() + 1j * draw()
            A[..., a, b] = z
            A[..., b, a] = -np.conj(z)
    for a in range(k):
        for b in range(a, k):
            z = draw() + 1j * draw()
            B[..., a, b] = z
            B[..., b, a] = z
    X = np.zeros(lead + (2 * k, 2 * k), dtype=complex)
    X[..., :k, :k] = A
    X[..., :k, k:] = B
    X[..., k:, :k] = -np.conj(B)
    X[..., k:, k:] = -np.swapaxes(A, -1, -2)
    return MatrixOneForm(grid, [X], check=False)
