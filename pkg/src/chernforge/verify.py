"""Seeded property suites over every layer, shared by the CLI and the acceptance tests.

Each suite returns a :class:`SuiteResult` of named checks with the measured
worst-case value and its tolerance.  ``fault`` is a test hook that deliberately
breaks a constant so that negative controls can confirm a suite can fail.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import chernweil as cw
from .decompose import apply_D, linearized_apply
from .quatlin import char_poly_coeffs, f1_closed_form, odd_coefficient_residual, random_sp_algebra
from .regtuples import (
    OneFormTuple,
    generate_null_tuple,
    null_sum,
    null_sum_scale,
    random_tuple,
    regularity_check,
)
from .errors import RegularityNotAchieved
from .torusforms import TorusGrid, TrigSpec, exterior_d, harmonic_part, hodge_primitive, random_form, wedge
from .torusforms.trig import TrigPoly


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tol": self.tol, "pass": self.passed,
                **({"detail": self.detail} if self.detail else {})}


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, name: str, value: float, tol: float, detail: dict | None = None) -> Check:
        c = Check(name, float(value), float(tol), bool(value < tol), detail or {})
        self.checks.append(c)
        return c

    def as_dict(self) -> dict:
        return {"suite": self.name, "pass": self.passed, "runtime": self.runtime,
                "checks": [c.as_dict() for c in self.checks]}


def _rel(err: float, scale: float) -> float:
    return err / max(scale, 1.0)


def quatlin_suite(count: int = 100, ks=(1, 2, 3), seed: int = 0, fault: dict | None = None) -> SuiteResult:
    t0 = time.perf_counter()
    res = SuiteResult("quatlin")
    worst_trace = worst_odd = worst_f1 = 0.0
    for k in ks:
        for i in range(count):
            X = random_sp_algebra(k, [seed, k, i])
            scale = max(1.0, float(np.abs(X.X).max()))
            worst_trace = max(worst_trace, abs(np.trace(X.X)) / scale)
            worst_odd = max(worst_odd, odd_coefficient_residual(X))
            f1 = f1_closed_form(X)
            ref = char_poly_coeffs(X)[0]
            worst_f1 = max(worst_f1, abs(f1 - ref) / max(abs(ref), 1e-300))
    res.add("trace_zero", worst_trace, 1e-12)
    res.add("odd_coefficients", worst_odd, 1e-9)
    res.add("f1_vs_expansion", worst_f1, 1e-9)
    res.runtime = time.perf_counter() - t0
    return res


def dec_suite(count: int = 50, n: int = 16, dims=(3, 4), h: int = 2, seed: int = 0,
              fault: dict | None = None) -> SuiteResult:
    t0 = time.perf_counter()
    res = SuiteResult("dec")
    dd = leib = stokes = prim = 0.0
    for m in dims:
        grid = TorusGrid(m, n)
        for p in range(m):
            for i in range(count):
                a, _ = random_form(grid, p, h, [seed, m, p, i])
                da = exterior_d(a)
                if p + 1 < m:
                    dd = max(dd, _rel(exterior_d(da).sup_norm(), a.sup_norm()))
                # Stokes on a closed manifold: every component of da integrates to zero
                stokes = max(stokes, _rel(harmonic_part(da).sup_norm(), da.sup_norm()))
                prim = max(prim, _rel((exterior_d(hodge_primitive(da)) - da).sup_norm(), da.sup_norm()))
                q = (i % (m - p)) if p < m - 1 else 0
                b, _ = random_form(grid, q, h, [seed, m, p, i, 1])
                if p + q < m:
                    lhs = exterior_d(wedge(a, b))
                    rhs = wedge(da, b) + ((-1) ** p) * wedge(a, exterior_d(b))
                    leib = max(leib, _rel((lhs - rhs).sup_norm(), lhs.sup_norm()))
    res.add("d_squared", dd, 1e-10)
    res.add("leibniz", leib, 1e-8)
    res.add("stokes", stokes, 1e-10)
    res.add("primitive_roundtrip", prim, 1e-8)
    res.runtime = time.perf_counter() - t0
    return res


def _random_sp1(grid: TorusGrid, h: int, seed) -> cw.MatrixOneForm:
    forms = [random_form(grid, 1, h, [*np.atleast_1d(seed).tolist(), j])[0] for j in range(3)]
    return cw.sp1_connection(*forms)


def chernweil_suite(count: int = 20, n: int = 16, h: int = 1, seed: int = 0, closed_count: int = 3,
                    fault: dict | None = None) -> SuiteResult:
    """Additivity and transgression on T^4; closedness on T^5 where it is not automatic."""
    t0 = time.perf_counter()
    res = SuiteResult("chernweil")
    norm = (fault or {}).get("secondary_normalization", cw.SECONDARY_NORMALIZATION)
    grid = TorusGrid(4, n)
    add = trans = 0.0
    for i in range(count):
        w1 = _random_sp1(grid, h, [seed, i, 0])
        w2 = _random_sp1(grid, h, [seed, i, 1])
        omega = cw.direct_sum(w1, w2)
        # densified, so the interleaved rank-2 matrix algebra is exercised
        p1_omega = cw.pontryagin1(omega.densify())
        parts = cw.pontryagin1(w1) + cw.pontryagin1(w2)
        add = max(add, _rel((p1_omega - parts).sup_norm(), p1_omega.sup_norm()))
        alpha = cw.random_connection(grid, 2, h, [seed, i, 2], amplitude=0.5)
        sec = cw.secondary_form(omega, alpha, normalization=norm)
        diff = cw.pontryagin1(omega + alpha) - p1_omega
        trans = max(trans, _rel((exterior_d(sec) - diff).sup_norm(), diff.sup_norm()))
    res.add("additivity", add, 1e-9)
    res.add("transgression", trans, 1e-8)
    closed = 0.0
    g5 = TorusGrid(5, 8)
    for i in range(closed_count):
        w = cw.direct_sum(_random_sp1(g5, 1, [seed, i, 5]), _random_sp1(g5, 1, [seed, i, 6]))
        p1 = cw.pontryagin1(w, check_closed=False)
        closed = max(closed, _rel(exterior_d(p1).sup_norm(), p1.sup_norm()))
    res.add("closedness_T5", closed, 1e-8)
    res.runtime = time.perf_counter() - t0
    return res


def witness_form(grid: TorusGrid) -> TrigSpec:
    """sin(2 pi x1) dx2 + sin(2 pi x3) dx4 as an analytic spec."""
    m = grid.m
    spec = TrigSpec.zero(m, 1)
    for axis, comp in ((0, 1), (2, 3)):
        k = [0] * m
        k[axis] = 1
        poly = TrigPoly(m)
        poly.add_term(tuple(k), 0.0, 1.0)
        spec.add_component((comp,), poly)
    return spec


def diag_suite(count: int = 10, n: int = 16, q: int = 3, h: int = 2, seed: int = 0,
               fault: dict | None = None) -> SuiteResult:
    t0 = time.perf_counter()
    res = SuiteResult("diag")
    grid = TorusGrid(4, n)
    worst = 0.0
    for i in range(count):
        t = random_tuple(grid, q, h, [seed, i])
        p1 = cw.pontryagin1(cw.diag_connection(t))
        ref = apply_D(t)
        worst = max(worst, _rel((p1 - ref).sup_norm(), ref.sup_norm()))
    res.add("p1_equals_sum_of_squares", worst, 1e-9)
    spec = witness_form(grid)
    w = spec.evaluate(grid)
    dspec = spec.d()
    oracle = dspec.wedge(dspec).evaluate(grid, method="direct")
    x = grid.coords()
    closed_form = 8 * np.pi ** 2 * np.cos(2 * np.pi * x[0]) * np.cos(2 * np.pi * x[2])
    p1 = cw.pontryagin1(cw.diag_connection([w]))
    err = max((p1 - oracle).sup_norm(), float(np.abs(p1.data[0] - closed_form).max()))
    res.add("analytic_witness", _rel(err, 8 * np.pi ** 2), 1e-9)
    res.runtime = time.perf_counter() - t0
    return res


def nulltuple_suite(seeds: int = 10, n: int = 16, h: int = 2, dims=(3, 4), min_pass: int = 9,
                    seed: int = 0, fault: dict | None = None) -> SuiteResult:
    """First-draw success rate: each seed gets exactly one attempt."""
    t0 = time.perf_counter()
    res = SuiteResult("nulltuple")
    for m in dims:
        grid = TorusGrid(m, n)
        q = m * (m + 1) // 2
        ok, worst, sigmas = 0, 0.0, []
        for s in range(seeds):
            try:
                t = generate_null_tuple(grid, q, h, seed * 1000 + s, max_retries=1)
            except RegularityNotAchieved:
                continue
            cert = regularity_check(t)
            rel = null_sum(t).sup_norm() / null_sum_scale(t)
            worst = max(worst, rel)
            sigmas.append(cert.min_sigma)
            ok += bool(cert) and rel < 1e-10
        res.add(f"T{m}_null_sum", worst, 1e-10)
        res.add(f"T{m}_regular_failures", seeds - ok, seeds - min_pass + 1,
                {"passed": ok, "seeds": seeds, "min_sigma": sigmas})
    res.runtime = time.perf_counter() - t0
    return res


def jacobian_suite(count: int = 20, n: int = 12, q: int = 10, h: int = 2, step: float = 1e-4,
                   seed: int = 0, fault: dict | None = None) -> SuiteResult:
    t0 = time.perf_counter()
    res = SuiteResult("jacobian")
    grid = TorusGrid(4, n)
    worst = 0.0
    for i in range(count):
        t = random_tuple(grid, q, h, [seed, i, 0])
        a = random_tuple(grid, q, h, [seed, i, 1])
        A = a.array
        plus = apply_D(OneFormTuple.from_array(grid, t.array + step * A))
        minus = apply_D(OneFormTuple.from_array(grid, t.array - step * A))
        fd = (plus - minus) * (1.0 / (2 * step))
        lin = linearized_apply(t, a)
        worst = max(worst, (fd - lin).sup_norm() / max(lin.sup_norm(), 1e-300))
    res.add("linearization_vs_central_difference", worst, 1e-6)
    res.runtime = time.perf_counter() - t0
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "quatlin": quatlin_suite,
    "dec": dec_suite,
    "chernweil": chernweil_suite,
    "diag": diag_suite,
    "nulltuple": nulltuple_suite,
    "jacobian": jacobian_suite,
}


def run_suites(only=None, seed: int = 0, fault: dict | None = None, overrides: dict | None = None) -> list:
    names = list(SUITES) if not only else list(only)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; choose from {sorted(SUITES)}")
    overrides = overrides or {}
    return [SUITES[s](seed=seed, fault=fault, **overrides.get(s, {})) for s in names]
