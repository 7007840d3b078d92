"""Irreducibility of determinants of Plücker-minor matrices, checked over Z_p.

Column j of the matrix holds the C(n,2) minors of an n x 2 block of
indeterminates (x^j_k, xbar^j_k).  An N x N determinant (N = C(n,2)) taken over
N distinct columns is multilinear, and a multilinear polynomial without
monomial factors is irreducible exactly when its variables cannot be split
into two groups with P = P_1(group 1) P_2(group 2).  Variables x, y lie in
different factors iff P * P_xy - P_x * P_y vanishes identically, which is
tested by random evaluation.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import BudgetExceeded
from . import _backend
from .fppoly import PRIME, FpPoly, Ring

MAX_SYMBOLIC_N = 6
MAX_SYMBOLIC_Q = 8
MAX_LEMMA_DIM = 4


def _var_names(n: int, q: int) -> list[str]:
    names = []
    for j in range(1, q + 1):
        names += [f"x{j}_{k}" for k in range(1, n + 1)]
        names += [f"xbar{j}_{k}" for k in range(1, n + 1)]
    return names


@dataclass(frozen=True)
class PluckerMatrix:
    n: int
    q: int
    ring: Ring
    entries: tuple  # entries[i][j], i over minors (k1 < k2), j over columns

    @property
    def N(self) -> int:
        return comb(self.n, 2)

    @property
    def minors(self) -> list[tuple[int, int]]:
        return list(combinations(range(1, self.n + 1), 2))

    def column_variables(self, j: int) -> set[str]:
        """Variable names of column j (0-based)."""
        return {f"x{j + 1}_{k}" for k in range(1, self.n + 1)} | \
            {f"xbar{j + 1}_{k}" for k in range(1, self.n + 1)}

    def entry(self, i: int, j: int) -> FpPoly:
        return self.entries[i][j]


def plucker_matrix(n: int, q: int) -> PluckerMatrix:
    """Entries x^j_{k1} xbar^j_{k2} - x^j_{k2} xbar^j_{k1}, one row per k1 < k2."""
    if n < 2 or q < 1:
        raise ValueError("need n >= 2 and q >= 1")
    N = comb(n, 2)
    if N > MAX_SYMBOLIC_N or q > MAX_SYMBOLIC_Q:
        raise BudgetExceeded(f"symbolic Plücker matrix limited to N <= {MAX_SYMBOLIC_N} and "
                             f"q <= {MAX_SYMBOLIC_Q} (got N={N}, q={q}); use codim_monte_carlo")
    ring = Ring(_var_names(n, q))
    rows = []
    for k1, k2 in combinations(range(1, n + 1), 2):
        row = []
        for j in range(1, q + 1):
            x1, x2 = ring.var(f"x{j}_{k1}"), ring.var(f"x{j}_{k2}")
            y1, y2 = ring.var(f"xbar{j}_{k1}"), ring.var(f"xbar{j}_{k2}")
            row.append(x1 * y2 - x2 * y1)
        rows.append(tuple(row))
    return PluckerMatrix(n, q, ring, tuple(rows))


def symbolic_det(M: PluckerMatrix, columns: Sequence[int]) -> FpPoly:
    """Exact determinant of the N x N submatrix on ``columns`` (0-based, in the given order).

    Cofactor expansion along the columns, memoized on the set of rows still
    available.
    """
    columns = list(columns)
    N = M.N
    if len(columns) != N:
        raise ValueError(f"need exactly N={N} columns")
    if any(not 0 <= c < M.q for c in columns):
        raise ValueError("column index out of range")
    if N > MAX_SYMBOLIC_N:
        raise BudgetExceeded(f"symbolic determinant limited to N <= {MAX_SYMBOLIC_N}")
    ring = M.ring
    memo: dict[int, FpPoly] = {}

    def det(rows_mask: int, depth: int) -> FpPoly:
        if depth == N:
            return ring.const(1)
        if rows_mask in memo:
            return memo[rows_mask]
        col = columns[depth]
        total = ring.zero()
        sign_pos = 0
        for r in range(N):
            if rows_mask >> r & 1:
                entry = M.entries[r][col]
                if entry:
                    minor = det(rows_mask & ~(1 << r), depth + 1)
                    if minor:
                        term = entry * minor
                        total = total - term if sign_pos & 1 else total + term
                sign_pos += 1
        memo[rows_mask] = total
        return total

    return det((1 << N) - 1, 0)


def multilinearity_check(P: FpPoly) -> bool:
    """True iff every variable occurs with exponent at most 1 in every monomial."""
    return P.is_multilinear()


@dataclass
class FactorReport:
    verdict: str
    components: list
    monomial_factor: dict
    error_bound: float
    trials: int
    edges: int
    variables: int

    def __bool__(self) -> bool:
        return self.verdict == "irreducible"

    def as_dict(self) -> dict:
        return asdict(self)


def _pair_graph(P: FpPoly, names: list[str], trials: int, rng) -> np.ndarray:
    """Boolean adjacency: edge iff P P_xy - P_x P_y was seen nonzero."""
    idx = {v: i for i, v in enumerate(names)}
    ring_to_local = {P.ring.index[v]: i for v, i in idx.items()}
    supports, coeffs = P.monomial_supports()
    offsets = np.zeros(len(supports) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(s) for s in supports])
    var_idx = np.array([ring_to_local[v] for s in supports for v in s], dtype=np.int64)
    nv = len(names)
    adj = np.zeros((nv, nv), dtype=bool)
    iu = np.triu_indices(nv, 1)
    for _ in range(trials):
        point = [int(x) for x in rng.integers(0, PRIME, size=nv, dtype=np.int64)]
        val, grad, hess = _backend.eval_multilinear_derivs(offsets, var_idx, coeffs, point)
        g = [int(x) for x in grad]
        H = hess.tolist()
        for a, b in zip(*iu):
            if not adj[a, b] and (val * int(H[a][b]) - g[a] * g[b]) % PRIME:
                adj[a, b] = adj[b, a] = True
    return adj


def factor_components(P: FpPoly, trials: int = 2, seed=0) -> FactorReport:
    """Variable partition of a multilinear P into its irreducible factors.

    A common monomial factor is divided out first and reported; each of its
    variables forms its own factor.
    """
    if P.is_zero():
        raise ValueError("the zero polynomial has no factorization")
    if not P.is_multilinear():
        raise ValueError("factor_components requires a multilinear polynomial")
    if trials < 1:
        raise ValueError("trials must be positive")
    mono = P.common_monomial()
    Q = P.divide_monomial(mono) if mono else P
    names = Q.variables()
    rng = np.random.default_rng(seed)
    components: list[list[str]] = []
    edges = 0
    bound = 0.0
    if names:
        adj = _pair_graph(Q, names, trials, rng)
        edges = int(adj.sum() // 2)
        ncomp, labels = connected_components(coo_matrix(adj), directed=False)
        for c in range(ncomp):
            components.append([v for v, lab in zip(names, labels) if lab == c])
        npairs = comb(len(names), 2)
        bound = float(npairs * (2.0 * Q.degree() / PRIME) ** trials)
    mono_vars = [v for v, e in mono.items() for _ in range(e)]
    components += [[v] for v in mono_vars]
    if not components:
        raise ValueError("a nonzero constant is a unit, not an irreducible polynomial")
    verdict = "irreducible" if len(components) == 1 else "splits"
    return FactorReport(verdict, components, dict(mono), bound, trials, edges,
                        len(names) + len(mono_vars))


@dataclass
class SubsetResult:
    n: int
    q: int
    subset: list
    multilinear: bool
    nonzero: bool
    verdict: str
    components: list
    error_bound: float
    terms: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class LemmaReport:
    n: int
    q: int
    N: int
    results: list = field(default_factory=list)
    family_supports_disjoint: bool | None = None
    family_note: str = ""
    total_error_bound: float = 0.0
    passed: bool = False
    backend: str = _backend.BACKEND

    def as_dict(self) -> dict:
        d = asdict(self)
        d["results"] = [r.as_dict() if hasattr(r, "as_dict") else r for r in self.results]
        return d


def _family_disjointness(M: PluckerMatrix) -> bool | None:
    """Columns {1..N-1, k}, k = N..q: the non-shared column supports are pairwise disjoint."""
    N = M.N
    if M.q < N:
        return None
    own = [M.column_variables(k) for k in range(N - 1, M.q)]
    return all(not (a & b) for a, b in combinations(own, 2))


def lemma_suite(n: int, q: int, trials: int = 2, seed=0, subsets: Sequence[Sequence[int]] | None = None,
                max_subsets: int | None = None) -> LemmaReport:
    """Multilinearity, nonvanishing and irreducibility for N-column determinants.

    ``subsets`` are 1-based column lists; by default every N-subset is checked,
    or a seeded sample of ``max_subsets`` of them.
    """
    if n > MAX_LEMMA_DIM:
        raise BudgetExceeded(f"symbolic lemma checks limited to n <= {MAX_LEMMA_DIM}; "
                             "use codim_monte_carlo for larger n")
    M = plucker_matrix(n, q)
    N = M.N
    if q < N:
        raise ValueError(f"need q >= N = {N} columns")
    rng = np.random.default_rng(seed)
    if subsets is None:
        every = list(combinations(range(1, q + 1), N))
        if max_subsets is not None and len(every) > max_subsets:
            pick = rng.choice(len(every), size=max_subsets, replace=False)
            every = [every[i] for i in sorted(pick)]
        subsets = every
    report = LemmaReport(n, q, N)
    ok = True
    for sub in subsets:
        sub = [int(c) for c in sub]
        P = symbolic_det(M, [c - 1 for c in sub])
        multi = multilinearity_check(P)
        nonzero = not P.is_zero()
        if nonzero and multi:
            fr = factor_components(P, trials, int(rng.integers(2 ** 32)))
            verdict, comps, bound = fr.verdict, fr.components, fr.error_bound
        else:
            verdict, comps, bound = "splits" if nonzero else "zero", [], 0.0
        report.results.append(SubsetResult(n, q, sub, multi, nonzero, verdict, comps, bound, len(P)))
        report.total_error_bound += bound
        ok &= multi and nonzero and verdict == "irreducible"
    report.family_supports_disjoint = _family_disjointness(M)
    report.family_note = ("support disjointness of the non-shared columns is checked; "
                          "algebraic independence is not asserted")
    report.passed = bool(ok)
    return report


@dataclass
class CodimReport:
    m: int
    q: int
    trials: int
    target_rank: int
    full_rank: int
    fraction: float
    expected_codimension: int
    rank_histogram: dict
    witness: list | None
    entry_range: list
    seed: int
    backend: str = _backend.BACKEND

    def as_dict(self) -> dict:
        return asdict(self)


def cofactor_columns(x: Sequence[int], xbar: Sequence[int]) -> list[int]:
    """The C(m,2) 2x2 minors of the m x 2 matrix [x | xbar], mod p."""
    m = len(x)
    return [(x[a] * xbar[b] - x[b] * xbar[a]) % PRIME for a, b in combinations(range(m), 2)]


def codim_monte_carlo(m: int, q: int, trials: int = 1000, seed=0,
                      entry_range: tuple[int, int] | None = None) -> CodimReport:
    """Fraction of random (L_1..L_q), L_j in Z^{m x 2}, whose minor matrix has rank C(m,2) over Z_p.

    Entries are uniform in [lo, hi) with default [0, p).
    """
    if m < 2 or q < 1 or trials < 1:
        raise ValueError("need m >= 2, q >= 1, trials >= 1")
    lo, hi = entry_range if entry_range is not None else (0, PRIME)
    if hi <= lo:
        raise ValueError("empty entry range")
    target = comb(m, 2)
    rng = np.random.default_rng(seed)
    full = 0
    hist: dict[int, int] = {}
    witness = None
    for _ in range(trials):
        L = rng.integers(lo, hi, size=(q, m, 2), dtype=np.int64)
        cols = [cofactor_columns([int(v) for v in Lj[:, 0]], [int(v) for v in Lj[:, 1]]) for Lj in L]
        mat = np.array(cols, dtype=object).T  # (C(m,2), q)
        r = _backend.rank_mod_p(mat)
        hist[r] = hist.get(r, 0) + 1
        if r == target:
            full += 1
            if witness is None:
                witness = L.tolist()
    return CodimReport(m, q, trials, target, full, full / trials, q - target + 1,
                       {str(k): v for k, v in sorted(hist.items())}, witness, [int(lo), int(hi)],
                       int(seed) if np.isscalar(seed) else 0)
