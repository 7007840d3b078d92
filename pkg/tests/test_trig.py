import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chernforge.torusforms import TorusGrid, TrigPoly, random_trig_poly, random_trig_spec, wedge

G = TorusGrid(3, 12)
seeds = st.integers(0, 2 ** 32 - 1)


def poly(seed, h=2):
    return random_trig_poly(3, h, np.random.default_rng(seed), zero_mean=False)


def test_negative_wavevectors_are_canonicalized():
    p = TrigPoly(2)
    p.add_term((-1, 0), 1.0, 1.0)
    assert p.terms == {(1, 0): [1.0, -1.0]}
    p.add_term((1, 0), -1.0, 1.0)
    assert p.is_zero()
    with pytest.raises(ValueError):
        p.add_term((1, 0, 0), 1.0, 0.0)


def test_constant_and_mean():
    assert TrigPoly.constant(3, 2.5).mean() == 2.5
    assert TrigPoly.constant(3, 0.0).is_zero()


@settings(max_examples=15)
@given(seeds, seeds)
def test_product_matches_pointwise(s1, s2):
    a, b = poly(s1), poly(s2)
    prod = (a * b).evaluate_direct(G)
    assert np.abs(prod - a.evaluate_direct(G) * b.evaluate_direct(G)).max() < 1e-12


@settings(max_examples=15)
@given(seeds)
def test_fft_sampling_matches_direct(s):
    p = poly(s, 3)
    assert np.abs(p.evaluate(TorusGrid(3, 8)) - p.evaluate_direct(TorusGrid(3, 8))).max() < 1e-12
    x = np.random.default_rng(s).random((5, 3))
    ref = np.array([sum(c * np.cos(2 * np.pi * np.dot(k, xi)) + s_ * np.sin(2 * np.pi * np.dot(k, xi))
                        for k, (c, s_) in p.terms.items()) for xi in x])
    assert np.allclose(p.evaluate_points(x), ref, atol=1e-12)


@settings(max_examples=15)
@given(seeds)
def test_derivative_by_finite_difference(s):
    p = poly(s, 1)
    x = np.random.default_rng(s).random((4, 3))
    e = np.zeros(3)
    e[1] = 1e-6
    fd = (p.evaluate_points(x + e) - p.evaluate_points(x - e)) / 2e-6
    assert np.allclose(p.derivative(1).evaluate_points(x), fd, atol=1e-6 * (1 + np.abs(fd).max()))


@settings(max_examples=10)
@given(seeds, seeds)
def test_spec_wedge_and_d_match_numeric(s1, s2):
    a = random_trig_spec(3, 1, 1, s1)
    b = random_trig_spec(3, 1, 1, s2)
    num = wedge(a.evaluate(G), b.evaluate(G))
    sym = a.wedge(b).evaluate(G, method="direct")
    assert (num - sym).sup_norm() < 1e-12
    assert (a.evaluate(G).d() - a.d().evaluate(G, method="direct")).sup_norm() < 1e-11
