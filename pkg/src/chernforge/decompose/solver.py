"""Gauss-Newton continuation for sum (d w_i)^2 = sigma and sum w_i ^ d w_i + d phi = beta.

Each Gauss-Newton step solves the Tikhonov normal equations
(L^T L + mu I) delta = -L^T r matrix-free.  Because L is wide (q m n^m
unknowns against C(m,4) n^m residuals) the solve runs in the residual space:
(L L^T + mu I) y = -r, delta = L^T y, which has the same solution by the
push-through identity.  Conjugate gradients are preconditioned with the
pointwise algebraic right inverse of L: the residual's coexact primitive is
split over the tuple by the pointwise pseudo-inverse of
v (x) e_i -> 2 v ^ d w_i(x), which is onto exactly when the tuple is regular.
"""
from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from ..errors import DegreeError, NotExact, QTooSmall, Stalled
from ..regtuples import OneFormTuple, generate_null_tuple, pointwise_L_matrices, q_min, regularity_check
from ..torusforms import DiffForm, TorusGrid, hodge_primitive, is_exact
from ..torusforms.forms import codiff_hat, d_arrays, d_hat, wedge_arrays
from .operators import D_arrays, L_arrays, LT_arrays, wedge_transpose

log = logging.getLogger(__name__)


@dataclass
class SolverOptions:
    homotopy_steps: int = 10
    max_gn_iterations: int = 30
    cg_max_iterations: int = 500
    tikhonov: float = 1e-8
    residual_target: float = 1e-6
    intermediate_tol: float = 1e-2
    cg_rtol: float = 1e-1
    line_search_halvings: int = 8
    max_backoffs: int = 6
    start_scale: float | None = None
    start_h: int = 2
    start_seed_offset: int = 0

    def __post_init__(self):
        for name in ("homotopy_steps", "max_gn_iterations", "cg_max_iterations", "max_backoffs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("tikhonov", "residual_target", "intermediate_tol", "cg_rtol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.residual_target <= 10 * np.finfo(float).eps:
            raise ValueError("residual_target is below machine precision slack")

    @classmethod
    def from_dict(cls, data: dict | None) -> "SolverOptions":
        data = dict(data or {})
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown solver options: {sorted(unknown)}")
        return cls(**data)


@dataclass
class SolveReport:
    kind: str
    history: list = field(default_factory=list)
    final_residual_sup: float = 0.0
    final_residual_l2: float = 0.0
    relative_residual_sup: float = 0.0
    target_sup: float = 0.0
    independent_residual_sup: float | None = None
    end_to_end_residual_sup: float | None = None
    certificate: dict | None = None
    gn_iterations: int = 0
    cg_iterations: int = 0
    homotopy_steps: int = 0
    backoffs: int = 0
    start_scale: float = 1.0
    converged: bool = False
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)

    def history_csv(self) -> str:
        cols = ["step", "s", "gn_iter", "residual_sup", "residual_l2", "cg_iters", "step_length", "accepted"]
        lines = [",".join(cols)]
        for row in self.history:
            lines.append(",".join(str(row.get(c, "")) for c in cols))
        return "\n".join(lines) + "\n"


def _sup(a: np.ndarray) -> float:
    return float(np.abs(a).max()) if a.size else 0.0


def _l2(a: np.ndarray) -> float:
    return float(np.sqrt((a ** 2).sum(axis=0).mean()))


class _Problem:
    """Residual map, linearization and preconditioner for one equation type."""

    residual_degree: int

    def __init__(self, grid: TorusGrid, opts: SolverOptions):
        self.grid = grid
        self.m = grid.m
        self.opts = opts
        self.sp = grid.spectral

    # pointwise pseudo-inverse pieces for the regular tuple at hand
    def _pointwise_gram_inverse(self, F: np.ndarray) -> np.ndarray:
        A = pointwise_L_matrices(F, self.m)  # (*grid, C3, q m)
        G = np.einsum("...ij,...kj->...ik", A, A)
        return np.linalg.inv(G)


class _FourForm(_Problem):
    """sum_i d w_i ^ d w_i - target."""

    residual_degree = 4

    def residual(self, W: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        F = d_arrays(W, self.grid, 1)
        return F, D_arrays(F, self.m) - target

    def step(self, W: np.ndarray, F: np.ndarray, r: np.ndarray, rtol: float) -> tuple[np.ndarray, int]:
        grid, m, sp = self.grid, self.m, self.sp
        shape = r.shape
        mu = self.opts.tikhonov
        Ginv = self._pointwise_gram_inverse(F)
        blind = sp.blind
        nyq = float(np.pi * grid.n) ** 2
        eta = 0.25 * float(np.trace(Ginv, axis1=-2, axis2=-1).mean()) / comb(m, 3) / nyq

        def matvec(v):
            # L L^T y = 4 sum_i F_i ^ d codiff (T_i y); d codiff applied without leaving spectral space
            y = v.reshape(shape)
            Z = sp.forward(wedge_transpose(y, F, m, 2, 2))
            dz = sp.inverse(d_hat(codiff_hat(Z, grid, 2), grid, 1))
            out = 4.0 * wedge_arrays(dz, F, m, 2, 2).sum(axis=0) + mu * y
            return out.ravel()

        def precond(v):
            y = v.reshape(shape)
            Y = sp.forward(y)
            beta = sp.inverse(codiff_hat(Y * sp.inv_laplacian, grid, 4))  # (C3, *grid)
            beta = np.moveaxis(beta, 0, -1)
            beta = np.einsum("...ij,...j->...i", Ginv, beta)
            beta = np.moveaxis(beta, -1, 0)
            back = sp.inverse(d_hat(sp.forward(beta), grid, 3) * sp.inv_laplacian)
            out = 0.25 * back + eta * sp.inverse(Y * blind)
            return out.ravel()

        n = r.size
        A = LinearOperator((n, n), matvec=matvec, dtype=float)
        M = LinearOperator((n, n), matvec=precond, dtype=float)
        count = [0]

        def cb(_):
            count[0] += 1

        y, _info = cg(A, -r.ravel(), rtol=rtol, atol=0.0,
                      maxiter=self.opts.cg_max_iterations, M=M, callback=cb)
        delta = LT_arrays(F, y.reshape(shape), grid)
        return delta, count[0]


class _ThreeForm(_Problem):
    """sum_i w_i ^ d w_i + d phi - target, with phi eliminated in closed form.

    Only the non-exact part of the residual is driven by the tuple; the
    exact part is absorbed by phi after every update.
    """

    residual_degree = 3

    def _split(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (non-exact part, exact part) of a 3-form residual, spectrally."""
        grid, sp = self.grid, self.sp
        R = sp.forward(r)
        # exact part = d (codiff (inv_lap R)); remainder is harmonic + coexact
        exact_hat = d_hat(codiff_hat(R * sp.inv_laplacian, grid, 3), grid, 2)
        exact = sp.inverse(exact_hat)
        return r - exact, exact

    def project(self, r: np.ndarray) -> np.ndarray:
        return self._split(r)[0]

    def residual(self, W: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        F = d_arrays(W, self.grid, 1)
        raw = wedge_arrays(W, F, self.m, 1, 2).sum(axis=0) - target
        return F, self.project(raw)

    def phi_for(self, W: np.ndarray, target: np.ndarray) -> np.ndarray:
        """phi absorbing the exact part of target - sum w ^ dw (minimal norm)."""
        grid, sp = self.grid, self.sp
        F = d_arrays(W, grid, 1)
        gap = target - wedge_arrays(W, F, self.m, 1, 2).sum(axis=0)
        G = sp.forward(gap)
        # coexact primitive of the exact part: codiff(inv_lap(gap)) then keep its d-image's preimage
        phi_hat = codiff_hat(G * sp.inv_laplacian, grid, 3)
        return sp.inverse(phi_hat)

    def step(self, W: np.ndarray, F: np.ndarray, r: np.ndarray, rtol: float) -> tuple[np.ndarray, int]:
        grid, m = self.grid, self.m
        shape = r.shape
        mu = self.opts.tikhonov
        Ginv = self._pointwise_gram_inverse(F)

        def J(A):
            dA = d_arrays(A, grid, 1)
            return self.project((wedge_arrays(A, F, m, 1, 2) + wedge_arrays(W, dA, m, 1, 2)).sum(axis=0))

        def JT(y):
            y = self.project(y)
            first = wedge_transpose(y, F, m, 1, 2)
            # <W ^ dA, y> = <dA, T_W(y)>  ->  codiff
            tw = _wedge_left_transpose(y, W, m, 1, 2)
            sp = self.sp
            second = sp.inverse(codiff_hat(sp.forward(tw), grid, 2))
            return first + second

        def matvec(v):
            y = v.reshape(shape)
            return (J(JT(y)) + mu * y).ravel()

        def precond(v):
            y = self.project(v.reshape(shape))
            b = np.moveaxis(y, 0, -1)
            b = np.einsum("...ij,...j->...i", Ginv, b)
            return self.project(0.25 * np.moveaxis(b, -1, 0)).ravel()

        n = r.size
        A = LinearOperator((n, n), matvec=matvec, dtype=float)
        M = LinearOperator((n, n), matvec=precond, dtype=float)
        count = [0]

        def cb(_):
            count[0] += 1

        y, _info = cg(A, -r.ravel(), rtol=rtol, atol=0.0,
                      maxiter=self.opts.cg_max_iterations, M=M, callback=cb)
        return JT(y.reshape(shape)), count[0]


def _wedge_left_transpose(y: np.ndarray, W: np.ndarray, m: int, p: int, q: int) -> np.ndarray:
    """z of degree q with <z, beta> = <y, W ^ beta> pointwise, W of degree p (batched)."""
    lead = W.shape[:-m - 1]
    out = np.zeros(lead + (comb(m, q),) + W.shape[-m:])
    from .._combinatorics import wedge_table

    for k, i, j, sign in wedge_table(m, p, q):
        out[(Ellipsis, j) + (slice(None),) * m] += sign * W[(Ellipsis, i) + (slice(None),) * m] * y[k]
    return out


def _auto_scale(F0: np.ndarray, target_sup: float, m: int) -> float:
    """Scale factor making the start tuple's D-linearization dominate the target.

    Quadratic effects of a correction of size |sigma| / |L| shrink like
    1 / scale^2, so the start tuple is inflated until |dw|^2 is a comfortable
    multiple of |sigma|.
    """
    typical = float(np.sqrt((F0 ** 2).sum(axis=(0, 1)).mean()))
    if typical == 0 or target_sup == 0:
        return 1.0
    return max(1.0, float(np.sqrt(4.0 * target_sup) / typical))


def _continuation(problem: _Problem, W0: np.ndarray, target: np.ndarray, opts: SolverOptions,
                  report: SolveReport) -> np.ndarray:
    target_sup = _sup(target)
    report.target_sup = target_sup
    W = W0.copy()
    if target_sup == 0.0:
        F, r = problem.residual(W, target)
        report.final_residual_sup = _sup(r)
        report.final_residual_l2 = _l2(r)
        report.converged = True
        return W

    s = 0.0
    ds = 1.0 / opts.homotopy_steps
    step_no = 0
    backoffs = 0
    W_prev, s_prev = None, 0.0
    while s < 1.0 - 1e-15:
        s_try = min(1.0, s + ds)
        final = s_try >= 1.0 - 1e-15
        tol = opts.residual_target if final else max(opts.intermediate_tol, opts.residual_target)
        goal = tol * target_sup
        tgt = s_try * target
        Wt = W.copy()
        F, r = problem.residual(Wt, tgt)
        res_l2, res_sup = _l2(r), _sup(r)
        if W_prev is not None:
            # secant predictor along the solution path
            Wp = W + ((s_try - s) / (s - s_prev)) * (W - W_prev)
            Fp, rp = problem.residual(Wp, tgt)
            if _l2(rp) < res_l2:
                Wt, F, r = Wp, Fp, rp
                res_l2, res_sup = _l2(r), _sup(r)
        start_sup = res_sup
        ok = res_sup <= goal
        for it in range(opts.max_gn_iterations):
            if ok:
                break
            # inexact Newton: ask the linear solve only for the reduction still needed
            rtol = float(np.clip(0.1 * goal / res_sup, 1e-10, opts.cg_rtol))
            delta, ncg = problem.step(Wt, F, r, rtol)
            report.cg_iterations += ncg
            report.gn_iterations += 1
            lam = 1.0
            accepted = False
            for _ in range(opts.line_search_halvings + 1):
                Wn = Wt + lam * delta
                Fn, rn = problem.residual(Wn, tgt)
                if _l2(rn) < res_l2:
                    accepted = True
                    break
                lam *= 0.5
            report.history.append({
                "step": step_no, "s": s_try, "gn_iter": it, "residual_sup": _sup(rn) if accepted else res_sup,
                "residual_l2": _l2(rn) if accepted else res_l2, "cg_iters": ncg,
                "step_length": lam if accepted else 0.0, "accepted": accepted,
            })
            if not accepted:
                break
            Wt, F, r = Wn, Fn, rn
            res_l2, res_sup = _l2(r), _sup(r)
            log.debug("s=%.3f it=%d |r|_sup/|sigma|=%.3e cg=%d", s_try, it, res_sup / target_sup, ncg)
            ok = res_sup <= goal
        if ok:
            W_prev, s_prev = W, s
            W = Wt
            s = s_try
            step_no += 1
            report.homotopy_steps = step_no
            continue
        backoffs += 1
        report.backoffs = backoffs
        if backoffs > opts.max_backoffs or res_sup > 0.99 * start_sup and ds < 1.0 / (opts.homotopy_steps * 2 ** opts.max_backoffs):
            raise Stalled(f"continuation stalled at s={s:.4f} (tried {s_try:.4f}, "
                          f"residual {res_sup / target_sup:.3e})", report)
        ds *= 0.5
    return W


def _finish(problem: _Problem, W: np.ndarray, target: np.ndarray, report: SolveReport, t0: float) -> None:
    _, r = problem.residual(W, target)
    report.final_residual_sup = _sup(r)
    report.final_residual_l2 = _l2(r)
    report.relative_residual_sup = report.final_residual_sup / report.target_sup if report.target_sup else 0.0
    report.wall_time = time.perf_counter() - t0


def _start_tuple(grid: TorusGrid, q: int, seed, opts: SolverOptions) -> OneFormTuple:
    return generate_null_tuple(grid, q, opts.start_h, int(seed) + opts.start_seed_offset)


def independent_residual(t: OneFormTuple, sigma: DiffForm) -> float:
    """Sup norm of sum (d w_i)^2 - sigma through a separate code path.

    Derivatives come from full complex FFTs per component and the 4-form
    is assembled from its Pfaffian-type component formula, not the wedge tables.
    """
    from itertools import combinations

    grid = t.grid
    m, n = grid.m, grid.n
    freqs = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        freqs[n // 2] = 0.0
    total = np.zeros((comb(m, 4),) + grid.shape)
    for w in t.entries:
        # F[a][b] = d_a w_b - d_b w_a
        hat = [np.fft.fftn(w.data[b]) for b in range(m)]
        deriv = {}
        for a in range(m):
            shape = [1] * m
            shape[a] = n
            ka = (2j * np.pi * freqs).reshape(shape)
            for b in range(m):
                if a != b:
                    deriv[a, b] = np.fft.ifftn(ka * hat[b]).real
        F = {(a, b): deriv[a, b] - deriv[b, a] for a, b in combinations(range(m), 2)}
        for idx, (a, b, c, e) in enumerate(combinations(range(m), 4)):
            total[idx] += 2.0 * (F[a, b] * F[c, e] - F[a, c] * F[b, e] + F[a, e] * F[b, c])
    return float(np.abs(total - sigma.data).max())


def decompose_exact_4form(sigma: DiffForm, q: int, opts: SolverOptions | None = None, seed=0,
                          start: OneFormTuple | None = None) -> tuple[OneFormTuple, SolveReport]:
    """Find w_1..w_q with sum (d w_i)^2 = sigma, continuing from a regular null tuple."""
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    grid = sigma.grid
    m = grid.m
    if sigma.degree != 4:
        raise DegreeError("sigma must be a 4-form")
    if m < 4:
        raise DegreeError("need m >= 4")
    if q < q_min(m):
        raise QTooSmall(f"q={q} < q_min({m}) = {q_min(m)}")
    rep = is_exact(sigma)
    if not rep:
        raise NotExact(f"sigma is not exact: {rep.as_dict()}")
    if start is None:
        start = _start_tuple(grid, q, seed, opts)
    W0 = start.array
    F0 = d_arrays(W0, grid, 1)
    scale = opts.start_scale if opts.start_scale is not None else _auto_scale(F0, sigma.sup_norm(), m)
    report = SolveReport(kind="decompose", start_scale=scale)
    problem = _FourForm(grid, opts)
    W = _continuation(problem, scale * W0, sigma.data, opts, report)
    _finish(problem, W, sigma.data, report, t0)
    result = OneFormTuple.from_array(grid, W)
    report.independent_residual_sup = independent_residual(result, sigma)
    report.certificate = regularity_check(result).as_dict()
    report.converged = report.relative_residual_sup <= opts.residual_target or report.target_sup == 0.0
    report.wall_time = time.perf_counter() - t0
    return result, report


def solve_dbar(beta: DiffForm, q: int, opts: SolverOptions | None = None, seed=0,
               start: OneFormTuple | None = None) -> tuple[OneFormTuple, DiffForm, SolveReport]:
    """Find (w, phi) with sum w_i ^ d w_i + d phi = beta."""
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    grid = beta.grid
    m = grid.m
    if beta.degree != 3:
        raise DegreeError("beta must be a 3-form")
    if m < 3:
        raise DegreeError("need m >= 3")
    if q < q_min(m):
        raise QTooSmall(f"q={q} < q_min({m}) = {q_min(m)}")
    if start is None:
        start = _start_tuple(grid, q, seed, opts)
    problem = _ThreeForm(grid, opts)
    report = SolveReport(kind="dbar")
    W0 = start.array
    nonexact = problem.project(beta.data)
    beta_sup = beta.sup_norm()
    if _sup(nonexact) <= 1e-12 * max(beta_sup, 1e-300):
        # exact input: the start tuple is null, so phi alone carries beta
        phi = hodge_primitive(beta, tol=1e-9)
        report.target_sup = beta_sup
        W = W0
    else:
        F0 = d_arrays(W0, grid, 1)
        scale = opts.start_scale if opts.start_scale is not None else _auto_scale(F0, _sup(nonexact), m)
        report.start_scale = scale
        W = _continuation(problem, scale * W0, beta.data, opts, report)
        phi = DiffForm(grid, 2, problem.phi_for(W, beta.data))
    from .operators import apply_Dbar

    result = OneFormTuple.from_array(grid, W)
    full = apply_Dbar(result, phi).data - beta.data
    report.target_sup = beta_sup
    report.final_residual_sup = _sup(full)
    report.final_residual_l2 = _l2(full)
    report.relative_residual_sup = report.final_residual_sup / beta_sup if beta_sup else 0.0
    report.independent_residual_sup = report.final_residual_sup
    report.certificate = regularity_check(result).as_dict()
    report.converged = report.relative_residual_sup <= opts.residual_target or beta_sup == 0.0
    report.wall_time = time.perf_counter() - t0
    return result, phi, report


def realize_pontryagin(sigma: DiffForm, q: int, opts: SolverOptions | None = None, seed=0):
    """Connection on a trivial Sp(q) bundle whose first Pontrjagin form is sigma.

    Solves sum (d w_i)^2 = sigma and returns diag(i w, -i w); the end-to-end
    residual is recomputed from the connection's curvature.
    """
    from ..chernweil import diag_connection, pontryagin1

    opts = opts or SolverOptions()
    t, report = decompose_exact_4form(sigma, q, opts, seed)
    report.kind = "realize"
    conn = diag_connection(t)
    p1 = pontryagin1(conn)
    end_to_end = float(np.abs(p1.data - sigma.data).max())
    report.end_to_end_residual_sup = end_to_end
    scale = report.target_sup
    if scale and end_to_end > 2 * opts.residual_target * scale:
        report.converged = False
    return conn, t, report
