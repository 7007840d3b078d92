"""Regular q-tuples of 1-forms: null-tuple generation and pointwise certificates.

A tuple (w_1, ..., w_q) is certified regular when the 2-forms d w_i(x) span
Lambda^2 at every grid point.  Null tuples are pullbacks w_i = u_i dv_i of the
primitive x dy along random trig-polynomial maps (u_i, v_i): T^m -> R^2, so
that every summand of sum w_i ^ d w_i vanishes pointwise.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from ._combinatorics import wedge_table
from .errors import AlgebraCheckFailed, DegreeError, GridMismatch, QTooSmall, RegularityNotAchieved
from .torusforms import DiffForm, TorusGrid, TrigPoly, TrigSpec, random_trig_poly, scalar_spec
from .torusforms.forms import d_arrays, wedge_arrays

RANK_RTOL = 1e-8
MIN_SIGMA_FLOOR = 1e-6
MAX_RETRIES = 20


def q_min(m: int) -> int:
    if m < 1:
        raise ValueError("m must be positive")
    return m * (m + 1) // 2


@dataclass(frozen=True)
class Pullback:
    """Provenance of w = u dv."""

    u: TrigPoly
    v: TrigPoly

    def trig_spec(self) -> TrigSpec:
        return scalar_spec(self.v).d().times_scalar(self.u)

    def to_dict(self) -> dict:
        return {"u": self.u.to_json(), "v": self.v.to_json()}


class OneFormTuple:
    """A q-tuple of 1-forms on a common grid with optional provenance."""

    def __init__(self, entries: Sequence[DiffForm], provenance: Sequence | None = None):
        entries = list(entries)
        if not entries:
            raise ValueError("a tuple needs q >= 1 entries")
        grid = entries[0].grid
        for w in entries:
            if w.grid != grid:
                raise GridMismatch("tuple entries must share one grid")
            if w.degree != 1:
                raise DegreeError("tuple entries must be 1-forms")
        self.grid = grid
        self.entries = tuple(entries)
        self.provenance = tuple(provenance) if provenance is not None else None

    @classmethod
    def from_array(cls, grid: TorusGrid, arr: np.ndarray) -> "OneFormTuple":
        return cls([DiffForm(grid, 1, a) for a in arr])

    @property
    def q(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def array(self) -> np.ndarray:
        """Stacked components, shape (q, m, *grid)."""
        return np.stack([w.data for w in self.entries])

    def d_array(self) -> np.ndarray:
        return d_arrays(self.array, self.grid, 1)

    def append(self, w: DiffForm) -> "OneFormTuple":
        return OneFormTuple(self.entries + (w,))

    def to_dict(self) -> dict:
        if self.provenance is not None and all(p is not None for p in self.provenance):
            entries = []
            for p in self.provenance:
                spec = p.trig_spec() if isinstance(p, Pullback) else p
                entries.append(spec.to_dict())
            return {"grid": {"m": self.grid.m, "n": self.grid.n}, "q": self.q, "trig_specs": entries}
        return {"grid": {"m": self.grid.m, "n": self.grid.n}, "q": self.q,
                "samples": self.array.tolist()}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "OneFormTuple":
        grid = TorusGrid(int(data["grid"]["m"]), int(data["grid"]["n"]))
        if "trig_specs" in data:
            specs = [TrigSpec.from_dict(s) for s in data["trig_specs"]]
            return cls([s.evaluate(grid) for s in specs], provenance=specs)
        return cls.from_array(grid, np.asarray(data["samples"], dtype=float))


def null_sum(t: OneFormTuple) -> DiffForm:
    """sum_i w_i ^ d w_i."""
    m = t.grid.m
    W = t.array
    dW = d_arrays(W, t.grid, 1)
    return DiffForm(t.grid, 3, wedge_arrays(W, dW, m, 1, 2).sum(axis=0))


def null_sum_scale(t: OneFormTuple) -> float:
    W = t.array
    return float(np.abs(W).max() * np.abs(t.d_array()).max())


@dataclass
class RegularityCertificate:
    rank_map: np.ndarray
    min_rank: int
    target_rank: int
    min_sigma: float
    sigma_floor: float
    passed: bool
    sigma_histogram: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        return {"min_rank": self.min_rank, "target_rank": self.target_rank,
                "min_sigma": self.min_sigma, "sigma_floor": self.sigma_floor,
                "pass": self.passed, "histogram": self.sigma_histogram}


def _pointwise_singular_values(mats: np.ndarray) -> np.ndarray:
    return np.linalg.svd(mats, compute_uv=False)


def _log_histogram(values: np.ndarray) -> dict:
    safe = np.log10(np.maximum(values, 1e-300))
    lo, hi = np.floor(safe.min()), np.ceil(safe.max())
    if hi <= lo:
        hi = lo + 1
    counts, edges = np.histogram(safe, bins=np.arange(lo, hi + 1))
    return {"log10_edges": edges.tolist(), "counts": counts.tolist()}


def regularity_check(t: OneFormTuple, sigma_floor: float = MIN_SIGMA_FLOOR,
                     rank_rtol: float = RANK_RTOL) -> RegularityCertificate:
    """Pointwise rank of the C(m,2) x q matrix whose columns are the d w_i(x)."""
    grid = t.grid
    target = comb(grid.m, 2)
    dW = t.d_array()  # (q, C2, *grid)
    mats = np.moveaxis(dW.reshape(t.q, target, -1), -1, 0)  # (npts, C2, q)
    sv = _pointwise_singular_values(mats)
    top = sv[:, :1]
    ranks = (sv > rank_rtol * top).sum(axis=1) * (top[:, 0] > 0)
    min_sv = sv[:, target - 1] if sv.shape[1] >= target else np.zeros(len(sv))
    min_rank = int(ranks.min())
    min_sigma = float(min_sv.min())
    passed = min_rank == target and min_sigma > sigma_floor
    return RegularityCertificate(
        rank_map=ranks.reshape(grid.shape),
        min_rank=min_rank,
        target_rank=target,
        min_sigma=min_sigma,
        sigma_floor=sigma_floor,
        passed=bool(passed),
        sigma_histogram=_log_histogram(min_sv),
    )


def pointwise_L_matrices(dW: np.ndarray, m: int) -> np.ndarray:
    """Matrices of v (x) e_i -> v ^ d w_i(x), shape (*grid, C(m,3), q*m).

    ``dW`` has shape (q, C(m,2), *grid); column index is i*m + a.
    """
    q = dW.shape[0]
    grid_shape = dW.shape[2:]
    out = np.zeros(grid_shape + (comb(m, 3), q * m))
    for k, a, j, sign in wedge_table(m, 1, 2):
        for i in range(q):
            out[..., k, i * m + a] += sign * dW[i, j]
    return out


@dataclass
class SurjectivityReport:
    min_sigma: float
    target_rank: int
    min_rank: int
    surjective: bool
    regular: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def surjectivity_check_L(t: OneFormTuple, rank_rtol: float = RANK_RTOL) -> SurjectivityReport:
    grid = t.grid
    m = grid.m
    if m < 3:
        raise DegreeError("L maps into 3-forms; need m >= 3")
    dW = t.d_array()
    A = pointwise_L_matrices(dW, m).reshape(-1, comb(m, 3), t.q * m)
    sv = _pointwise_singular_values(A)
    target = comb(m, 3)
    top = sv[:, :1]
    ranks = (sv > rank_rtol * top).sum(axis=1) * (top[:, 0] > 0)
    min_rank = int(ranks.min())
    surjective = min_rank == target
    cert = regularity_check(t, rank_rtol=rank_rtol)
    if cert.min_rank == cert.target_rank and not surjective:
        raise AlgebraCheckFailed("d w_i span Lambda^2 but L is not onto Lambda^3")
    min_sv = sv[:, target - 1] if sv.shape[1] >= target else np.zeros(len(sv))
    return SurjectivityReport(float(min_sv.min()), target, min_rank, bool(surjective),
                              bool(cert.passed))


def _pullback_sample(u: TrigPoly, v: TrigPoly, grid: TorusGrid) -> DiffForm:
    uu = u.evaluate(grid)
    data = np.stack([uu * v.derivative(a).evaluate(grid) for a in range(grid.m)])
    return DiffForm(grid, 1, data)


def generate_null_tuple(grid: TorusGrid, q: int, h: int, seed, *, max_retries: int = MAX_RETRIES,
                        sigma_floor: float = MIN_SIGMA_FLOOR, amplitude: float = 1.0) -> OneFormTuple:
    """Seeded regular tuple with sum w_i ^ d w_i = 0, retrying until certified.

    The grid must resolve the 4h-band products appearing in w_i ^ d w_i
    loosely: n > 2 * (2h) is required so that u dv is sampled exactly.
    """
    m = grid.m
    if q < q_min(m):
        raise QTooSmall(f"q={q} < q_min({m}) = {q_min(m)}")
    if not grid.resolves(2 * h):
        raise ValueError(f"grid n={grid.n} does not resolve u dv at band {2 * h}")
    for attempt in range(max_retries):
        rng = np.random.default_rng([int(seed), attempt])
        entries, prov = [], []
        for _ in range(q):
            u = random_trig_poly(m, h, rng, amplitude, zero_mean=False)
            v = random_trig_poly(m, h, rng, amplitude)
            entries.append(_pullback_sample(u, v, grid))
            prov.append(Pullback(u, v))
        t = OneFormTuple(entries, prov)
        if regularity_check(t, sigma_floor=sigma_floor).passed:
            return t
    raise RegularityNotAchieved(f"no regular null tuple after {max_retries} attempts (seed={seed})")


def random_tuple(grid: TorusGrid, q: int, h: int, seed, amplitude: float = 1.0) -> OneFormTuple:
    """Independent zero-mean band-limited 1-forms (used for planted problems)."""
    from .torusforms import random_trig_spec

    rng = np.random.default_rng(seed)
    specs = [random_trig_spec(grid.m, 1, h, int(rng.integers(2 ** 32)), amplitude) for _ in range(q)]
    return OneFormTuple([s.evaluate(grid) for s in specs], provenance=specs)
