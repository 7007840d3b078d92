"""The eleven acceptance criteria at their stated sizes and tolerances.

Each test records a one-line verdict that the terminal summary prints.
"""
import time

import numpy as np
import pytest

from chernforge import verify
from chernforge.cli import bounds
from chernforge.chernweil import pontryagin1
from chernforge.decompose import SolverOptions, apply_D, decompose_exact_4form, independent_residual, realize_pontryagin
from chernforge.errors import Stalled
from chernforge.minorlemma import FpPoly, Ring, codim_monte_carlo, factor_components, lemma_suite
from chernforge.regtuples import random_tuple
from chernforge.torusforms import TorusGrid, random_form

pytestmark = pytest.mark.slow


def _summary(suite):
    return ", ".join(f"{c.name}={c.value:.2e}/{c.tol:.0e}" for c in suite.checks) + f", {suite.runtime:.1f}s"


def _suite_criterion(acceptance, number, title, suite, time_limit=None):
    ok = suite.passed and (time_limit is None or suite.runtime < time_limit)
    acceptance(number, title, ok, _summary(suite))
    assert suite.passed, suite.as_dict()
    if time_limit is not None:
        assert suite.runtime < time_limit


def test_c01_algebra_suite(acceptance):
    _suite_criterion(acceptance, 1, "sp(k) algebra suite", verify.quatlin_suite(), 5.0)


def test_c02_dec_suite(acceptance):
    _suite_criterion(acceptance, 2, "DEC identities on T^3, T^4", verify.dec_suite(), 30.0)


def test_c03_chern_weil_suite(acceptance):
    _suite_criterion(acceptance, 3, "additivity, transgression, closedness", verify.chernweil_suite(), 120.0)


def test_c04_diagonal_identity(acceptance):
    _suite_criterion(acceptance, 4, "diagonal connection and analytic witness", verify.diag_suite())


def test_c05_null_tuples(acceptance):
    suite = verify.nulltuple_suite()
    sig = {c.name: c.detail.get("min_sigma") for c in suite.checks if c.detail}
    floor = min(min(v) for v in sig.values() if v)
    acceptance(5, "regular null tuples, first draw", suite.passed, _summary(suite) + f", min sigma {floor:.2e}")
    assert suite.passed, suite.as_dict()


def test_c06_jacobian(acceptance):
    _suite_criterion(acceptance, 6, "linearization vs central differences", verify.jacobian_suite())


def test_c07_plant_and_recover(acceptance):
    grid = TorusGrid(4, 16)
    opts = SolverOptions()
    rows, good = [], 0
    for seed in range(5):
        sigma = apply_D(random_tuple(grid, 10, 2, seed))
        scale = sigma.sup_norm()
        t0 = time.perf_counter()
        try:
            t, rep = decompose_exact_4form(sigma, 10, opts, seed=seed)
        except Stalled as exc:
            rows.append(f"seed {seed}: stalled ({exc})")
            continue
        wall = time.perf_counter() - t0
        direct = float(np.abs(apply_D(t).data - sigma.data).max())
        indep = independent_residual(t, sigma)
        agree = max(abs(indep - direct), abs(rep.final_residual_sup - direct)) / scale
        ok = (direct / scale < 1e-6 and rep.homotopy_steps <= 10 and wall < 300 and agree <= 1e-12)
        good += ok
        rows.append(f"seed {seed}: rel {direct / scale:.1e}, steps {rep.homotopy_steps}, "
                    f"{wall:.0f}s, agree {agree:.0e}")
    acceptance(7, "plant-and-recover on T^4 16^4, q=10", good >= 4, f"{good}/5 pass; " + "; ".join(rows))
    assert good >= 4, rows


def test_c08_end_to_end_realization(acceptance):
    grid = TorusGrid(4, 16)
    sigma, _ = random_form(grid, 4, 2, 0)
    conn, t, rep = realize_pontryagin(sigma, 10, SolverOptions(), seed=0)
    e2e = float(np.abs(pontryagin1(conn).data - sigma.data).max()) / sigma.sup_norm()
    ok = e2e < 2e-6
    acceptance(8, "p_1(connection) = sigma, random band-limited sigma", ok,
               f"end-to-end {e2e:.2e}, solver {rep.relative_residual_sup:.2e}, "
               f"{rep.gn_iterations} GN / {rep.cg_iterations} CG, {rep.wall_time:.0f}s")
    assert ok


def test_c09_lemma(acceptance):
    small = lemma_suite(3, 4, trials=2, seed=0)
    small_ok = small.passed and len(small.results) == 4 and small.total_error_bound < 1e-12
    t0 = time.perf_counter()
    big = lemma_suite(4, 6, trials=2, seed=0, subsets=[list(range(1, 7))])
    big_time = time.perf_counter() - t0
    big_ok = big.passed and big.results[0].verdict == "irreducible" and big_time < 600
    names = ["x1", "y1", "x2", "y2", "z1", "w1", "z2", "w2"]
    R = Ring(names)
    v = {n: R.var(n) for n in names}
    witness: FpPoly = (v["x1"] * v["y1"] + v["x2"] * v["y2"]) * (v["z1"] * v["w1"] + v["z2"] * v["w2"])
    split = factor_components(witness, trials=2, seed=0)
    witness_ok = split.verdict == "splits" and sorted(map(sorted, split.components)) == sorted(
        [sorted(names[:4]), sorted(names[4:])])
    ok = small_ok and big_ok and witness_ok
    acceptance(9, "Plücker determinants irreducible, witness splits", ok,
               f"n=3: {len(small.results)} subsets, bound {small.total_error_bound:.1e}; "
               f"n=4: {big.results[0].terms} terms, {big_time:.1f}s, bound {big.total_error_bound:.1e}; "
               f"witness {split.verdict}")
    assert ok


def test_c10_codimension(acceptance):
    a = codim_monte_carlo(3, 6, trials=1000, seed=0)
    b = codim_monte_carlo(4, 10, trials=1000, seed=0)
    ok = a.fraction == 1.0 and b.fraction == 1.0
    acceptance(10, "full-rank fraction of random minor matrices", ok,
               f"m=3,q=6: {a.fraction}; m=4,q=10: {b.fraction}")
    assert ok


def test_c11_bounds(acceptance):
    rep = bounds(4, 1)
    ok = (rep.m0, rep.q_min, rep.schlafly_n_min) == (0, 10, 125)
    acceptance(11, "bounds calculator at m=4", ok,
               f"m0={rep.m0}, q_min={rep.q_min}, Schlafly(k=1)={rep.schlafly_n_min}")
    assert ok
