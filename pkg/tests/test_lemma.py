from itertools import combinations

import numpy as np
import pytest

from chernforge.errors import BudgetExceeded
from chernforge.minorlemma import (
    PRIME,
    Ring,
    codim_monte_carlo,
    cofactor_columns,
    det_mod_p,
    factor_components,
    lemma_suite,
    multilinearity_check,
    plucker_matrix,
    symbolic_det,
)


def random_point(ring, seed):
    rng = np.random.default_rng(seed)
    return {v: int(x) for v, x in zip(ring.names, rng.integers(0, PRIME, len(ring.names), dtype=np.int64))}


def numeric_minor_matrix(n, q, point, columns):
    """Evaluate the Plücker matrix directly from the definition, mod p."""
    rows = []
    for k1, k2 in combinations(range(1, n + 1), 2):
        row = []
        for j in columns:
            x = lambda k: point[f"x{j + 1}_{k}"]
            y = lambda k: point[f"xbar{j + 1}_{k}"]
            row.append((x(k1) * y(k2) - x(k2) * y(k1)) % PRIME)
        rows.append(row)
    return np.array(rows, dtype=object)


def test_plucker_matrix_structure():
    M = plucker_matrix(2, 1)
    (entry,), = M.entries
    assert len(entry) == 2 and entry.degree() == 2
    assert sorted(entry.variables()) == ["x1_1", "x1_2", "xbar1_1", "xbar1_2"]
    M = plucker_matrix(3, 3)
    assert M.N == 3 and len(M.entries) == 3 and all(len(r) == 3 for r in M.entries)
    for i in range(3):
        for j in range(3):
            e = M.entry(i, j)
            assert e.degree() == 2 and len(e.variables()) == 4
            assert set(e.variables()) <= M.column_variables(j)
    assert not (M.column_variables(0) & M.column_variables(1))


def test_budget_guards():
    with pytest.raises(BudgetExceeded):
        plucker_matrix(5, 10)
    with pytest.raises(BudgetExceeded):
        plucker_matrix(3, 9)
    with pytest.raises(BudgetExceeded):
        lemma_suite(5, 10)


def test_one_by_one_determinant_is_the_minor():
    M = plucker_matrix(2, 2)
    P = symbolic_det(M, [0])
    assert P == M.entry(0, 0)
    assert factor_components(P).verdict == "irreducible"


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_symbolic_det_matches_numeric_oracle(seed):
    M = plucker_matrix(3, 4)
    cols = [0, 2, 3]
    P = symbolic_det(M, cols)
    pt = random_point(M.ring, seed)
    assert P.evaluate(pt) == det_mod_p(numeric_minor_matrix(3, 4, pt, cols))


def test_symbolic_det_properties():
    M = plucker_matrix(3, 3)
    P = symbolic_det(M, [0, 1, 2])
    assert multilinearity_check(P) and not P.is_zero()
    assert symbolic_det(M, [0, 0, 1]).is_zero()
    assert symbolic_det(M, [1, 0, 2]) == -P
    with pytest.raises(ValueError):
        symbolic_det(M, [0, 1])


def test_multilinearity_examples():
    R = Ring(["x"])
    assert not multilinearity_check(R.var("x") * R.var("x"))
    assert multilinearity_check(R.const(5))


def test_ad_minus_bc_pair_identities():
    R = Ring(list("abcd"))
    a, b, c, d = (R.var(v) for v in "abcd")
    P = a * d - b * c
    # every pair fails P P_xy = P_x P_y, so the variable graph is complete
    for x, y in combinations("abcd", 2):
        assert not (P * P.diff(x).diff(y) - P.diff(x) * P.diff(y)).is_zero()
    rep = factor_components(P, trials=2, seed=0)
    assert rep.verdict == "irreducible" and rep.edges == 6
    assert sorted(rep.components[0]) == list("abcd")


def test_reducible_witness_splits():
    names = ["x1", "y1", "x2", "y2", "z1", "w1", "z2", "w2"]
    R = Ring(names)
    v = {n: R.var(n) for n in names}
    P = (v["x1"] * v["y1"] + v["x2"] * v["y2"]) * (v["z1"] * v["w1"] + v["z2"] * v["w2"])
    rep = factor_components(P, trials=2, seed=1)
    assert rep.verdict == "splits"
    assert sorted(map(sorted, rep.components)) == sorted([sorted(["x1", "y1", "x2", "y2"]),
                                                          sorted(["z1", "w1", "z2", "w2"])])


def test_monomial_factors_are_split_off():
    R = Ring(["x", "y"])
    x, y = R.var("x"), R.var("y")
    rep = factor_components(x * (y + 1))
    assert rep.verdict == "splits" and rep.monomial_factor == {"x": 1}
    assert sorted(rep.components) == [["x"], ["y"]]
    assert factor_components(x).verdict == "irreducible"


def test_factor_preconditions():
    R = Ring(["x"])
    with pytest.raises(ValueError):
        factor_components(R.zero())
    with pytest.raises(ValueError):
        factor_components(R.var("x") * R.var("x"))
    with pytest.raises(ValueError):
        factor_components(R.const(3))


def test_lemma_suite_small_cases():
    rep = lemma_suite(2, 2)
    assert rep.passed and len(rep.results) == 2
    rep = lemma_suite(3, 4, trials=2, seed=0)
    assert rep.passed and len(rep.results) == 4
    assert all(r.verdict == "irreducible" and r.multilinear and r.nonzero for r in rep.results)
    assert rep.total_error_bound < 1e-12
    assert rep.family_supports_disjoint is True
    d = rep.as_dict()
    assert {"n", "q", "results", "total_error_bound"} <= set(d)
    assert {"subset", "multilinear", "nonzero", "verdict", "components", "error_bound"} <= set(d["results"][0])


def test_lemma_suite_sampling_is_seeded():
    a = lemma_suite(3, 5, max_subsets=3, seed=4)
    b = lemma_suite(3, 5, max_subsets=3, seed=4)
    assert [r.subset for r in a.results] == [r.subset for r in b.results]
    assert len(a.results) == 3


def test_cofactor_columns():
    assert cofactor_columns([1, 2, 3], [4, 5, 6]) == [(1 * 5 - 2 * 4) % PRIME, (1 * 6 - 3 * 4) % PRIME,
                                                     (2 * 6 - 3 * 5) % PRIME]


def test_codim_monte_carlo():
    rep = codim_monte_carlo(3, 6, trials=200, seed=0)
    assert rep.fraction == 1.0 and rep.target_rank == 3 and rep.witness is not None
    assert rep.expected_codimension == 6 - 3 + 1
    low = codim_monte_carlo(3, 2, trials=50, seed=0)
    assert low.fraction == 0.0 and low.witness is None
    again = codim_monte_carlo(3, 6, trials=200, seed=0)
    assert again.as_dict() == rep.as_dict()


def test_codim_small_range_shows_degeneracy():
    rep = codim_monte_carlo(3, 3, trials=300, seed=1, entry_range=(0, 2))
    assert rep.fraction < 1.0
