import pytest
from hypothesis import given
from hypothesis import strategies as st

from chernforge.minorlemma import PRIME, FpPoly, Ring

R = Ring(["a", "b", "c", "d"])
a, b, c, d = (R.var(v) for v in "abcd")


def poly_strategy():
    mono = st.dictionaries(st.sampled_from("abcd"), st.integers(0, 3), max_size=4)
    return st.lists(st.tuples(mono, st.integers(-5, 5)), max_size=6).map(
        lambda terms: sum((R.const(k) * FpPoly(R, {R.pack(m): 1}) for m, k in terms), R.zero()))


points = st.fixed_dictionaries({v: st.integers(0, PRIME - 1) for v in "abcd"})


def test_basic_arithmetic():
    det = a * d - b * c
    assert len(det) == 2 and det.degree() == 2
    assert det.variables() == ["a", "b", "c", "d"]
    assert det.evaluate({"a": 1, "b": 2, "c": 3, "d": 4}) == (4 - 6) % PRIME
    assert (det - det).is_zero()
    assert R.const(PRIME) == R.zero()
    assert (2 * a).terms == {R.pack({"a": 1}): 2}
    assert (-a + a).is_zero()


def test_multilinearity_and_monomials():
    assert (a * d - b * c).is_multilinear()
    assert not (a * a).is_multilinear()
    assert R.const(3).is_multilinear()
    P = a * b * c + a * b * d
    assert P.common_monomial() == {"a": 1, "b": 1}
    assert P.divide_monomial({"a": 1, "b": 1}) == c + d
    with pytest.raises(ValueError):
        P.divide_monomial({"c": 1})


def test_diff():
    P = a * a * b + 3 * c
    assert P.diff("a") == 2 * a * b
    assert P.diff("c") == R.const(3)
    assert P.diff("d").is_zero()


def test_packing():
    key = R.pack({"b": 2, "d": 1})
    assert R.unpack(key) == {"b": 2, "d": 1}
    assert R.support_indices(key) == [1, 3]
    with pytest.raises(ValueError):
        R.pack({"a": 1 << 16})
    with pytest.raises(ValueError):
        Ring(["x", "x"])


def test_ring_mismatch():
    other = Ring(["a"]).var("a")
    with pytest.raises(ValueError):
        a + other


def test_serialization():
    data = (a * d - b * c).to_dict()
    assert data["p"] == PRIME and data["vars"] == ["a", "b", "c", "d"]
    assert sorted(c for _, c in data["terms"]) == [1, PRIME - 1]


@given(poly_strategy(), poly_strategy(), poly_strategy(), points)
def test_ring_axioms_by_evaluation(P, Q, S, pt):
    ev = lambda X: X.evaluate(pt)
    assert ev(P * (Q + S)) == ev(P * Q + P * S)
    assert ev(P * Q) == ev(P) * ev(Q) % PRIME
    assert ev(P - Q) == (ev(P) - ev(Q)) % PRIME
    assert (P * Q) == (Q * P)
    assert (P * Q) * S == P * (Q * S)
