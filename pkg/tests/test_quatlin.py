import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chernforge.errors import AlgebraCheckFailed
from chernforge.quatlin import (
    I,
    J,
    K,
    ONE,
    Quaternion,
    SpAlgebraElement,
    SpGroupElement,
    char_poly_coeffs,
    f1_closed_form,
    hn_inner,
    hn_inner_split,
    matrix_from_json,
    matrix_to_json,
    odd_coefficient_residual,
    quat_conj_transpose,
    quat_matmul,
    quat_mul,
    quat_to_complex,
    random_sp_algebra,
    sp_algebra_check,
    sp_direct_sum,
    sp_group_check,
    symplectic_j,
)

reals = st.floats(-10, 10, allow_nan=False)
quats = st.builds(Quaternion, reals, reals, reals, reals)


def test_basis_relations():
    assert quat_mul(I, J).isclose(K)
    assert quat_mul(J, I).isclose(-K)
    assert quat_mul(J, K).isclose(I)
    assert quat_mul(K, J).isclose(-I)
    assert quat_mul(K, I).isclose(J)
    assert quat_mul(I, K).isclose(-J)
    for e in (I, J, K):
        assert quat_mul(e, e).isclose(-ONE)


def test_one_plus_i_times_one_minus_i():
    assert quat_mul(Quaternion(1, 1), Quaternion(1, -1)).isclose(Quaternion(2))


@given(quats)
def test_unit_is_identity(w):
    assert quat_mul(ONE, w).isclose(w) and quat_mul(w, ONE).isclose(w)


@given(quats, quats, quats)
def test_associative_and_distributive(a, b, c):
    tol = 1e-9 * (1 + a.norm2() * b.norm2() * c.norm2())
    assert quat_mul(quat_mul(a, b), c).isclose(quat_mul(a, quat_mul(b, c)), tol)
    assert quat_mul(a, b + c).isclose(quat_mul(a, b) + quat_mul(a, c), tol)


@given(quats)
def test_norm_is_conj_product(w):
    p = quat_mul(w.conj(), w)
    assert abs(p.u - w.norm2()) <= 1e-9 * (1 + w.norm2())
    assert max(abs(p.x), abs(p.y), abs(p.z)) <= 1e-9 * (1 + w.norm2())


def test_inner_product_examples():
    e1 = [ONE, Quaternion()]
    e2 = [Quaternion(), ONE]
    assert hn_inner(e1, e1).isclose(ONE)
    assert hn_inner(e1, e2).isclose(Quaternion())
    # j * conj(k) = -jk = -i
    assert hn_inner([J], [K]).isclose(-I)
    with pytest.raises(ValueError):
        hn_inner(e1, [ONE])


@given(st.lists(st.tuples(quats, quats), min_size=1, max_size=4))
def test_inner_product_split(pairs):
    v = [a for a, _ in pairs]
    w = [b for _, b in pairs]
    vv = hn_inner(v, v)
    assert vv.u >= 0 and max(abs(vv.x), abs(vv.y), abs(vv.z)) <= 1e-9 * (1 + vv.u)
    h, _ = hn_inner_split(v, w)
    # the complex part is the Hermitian product of the identified C^2n vectors
    cv = np.array([c for q in v for c in q.complex_pair()])
    cw = np.array([c for q in w for c in q.complex_pair()])
    a_v, b_v = cv[0::2], cv[1::2]
    a_w, b_w = cw[0::2], cw[1::2]
    herm = np.sum(a_v * np.conj(a_w) + b_v * np.conj(b_w))
    assert abs(h - herm) <= 1e-9 * (1 + abs(herm))


def test_complex_image_examples():
    assert np.allclose(quat_to_complex([[ONE]]), np.eye(2))
    assert np.array_equal(quat_to_complex([[J]]), np.array([[0, 1], [-1, 0]], dtype=complex))


def _random_quat_matrix(rng, k):
    return rng.standard_normal((k, k, 4))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_complex_image_is_unital_homomorphism(k):
    rng = np.random.default_rng(k)
    for _ in range(10):
        M, N = _random_quat_matrix(rng, k), _random_quat_matrix(rng, k)
        lhs = quat_to_complex(quat_matmul(M, N))
        rhs = quat_to_complex(M) @ quat_to_complex(N)
        assert np.abs(lhs - rhs).max() < 1e-12 * max(1.0, np.abs(rhs).max())
        adj = quat_to_complex(quat_conj_transpose(M))
        assert np.abs(adj - quat_to_complex(M).conj().T).max() < 1e-12
    eye = np.zeros((k, k, 4))
    eye[np.arange(k), np.arange(k), 0] = 1
    assert np.allclose(quat_to_complex(eye), np.eye(2 * k))


def test_algebra_check_examples():
    assert sp_algebra_check(np.diag([1j, -1j]))
    assert not sp_algebra_check(np.eye(2))
    assert sp_algebra_check(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        sp_algebra_check(np.zeros((3, 3)))


def test_group_check():
    k = 2
    assert sp_group_check(np.eye(2 * k))
    assert sp_group_check(symplectic_j(k))
    # exp of an algebra element lies in the group
    X = random_sp_algebra(k, 3).X
    w, V = np.linalg.eigh(1j * X)
    U = V @ np.diag(np.exp(-1j * w)) @ V.conj().T
    assert SpGroupElement.from_matrix(U, tol=1e-10).k == k
    with pytest.raises(AlgebraCheckFailed):
        SpGroupElement.from_matrix(2 * np.eye(2))


@pytest.mark.parametrize("k,seed", [(1, 0), (2, 5), (3, 7)])
def test_random_element(k, seed):
    X = random_sp_algebra(k, seed)
    assert sp_algebra_check(X)
    assert np.trace(X.X) == 0
    assert np.array_equal(X.X, random_sp_algebra(k, seed).X)
    assert np.array_equal(X.X[k:, k:], -X.A.T)
    assert np.array_equal(X.X[k:, :k], -X.B.conj())


def test_from_matrix_rejects_non_members():
    with pytest.raises(AlgebraCheckFailed):
        SpAlgebraElement.from_matrix(np.eye(2))


def test_f1_on_diagonal_element():
    X = SpAlgebraElement.from_matrix(np.diag([1j, -1j]))
    assert char_poly_coeffs(X) == pytest.approx([1.0], abs=1e-15)
    assert f1_closed_form(X) == pytest.approx(1.0, abs=1e-15)


def test_zero_element():
    X = SpAlgebraElement.from_matrix(np.zeros((4, 4)))
    assert char_poly_coeffs(X) == [0.0, 0.0]
    assert f1_closed_form(X) == 0.0


@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_charpoly_properties(k, seed):
    X = random_sp_algebra(k, seed)
    assert odd_coefficient_residual(X) < 1e-9
    f = char_poly_coeffs(X)
    assert len(f) == k
    assert abs(f1_closed_form(X) - f[0]) <= 1e-9 * max(abs(f[0]), 1e-12)
    # f_1 is minus the sum of principal 2-minors of iX
    A = 1j * X.X
    minors = sum(A[a, a] * A[b, b] - A[a, b] * A[b, a] for a in range(2 * k) for b in range(a + 1, 2 * k))
    assert abs(f[0] + minors.real) <= 1e-9 * max(1.0, abs(f[0]))


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_f1_additive_on_direct_sums(k1, k2, seed):
    X, Y = random_sp_algebra(k1, seed), random_sp_algebra(k2, seed + 1)
    S = sp_direct_sum(X, Y)
    assert sp_algebra_check(S)
    assert f1_closed_form(S) == pytest.approx(f1_closed_form(X) + f1_closed_form(Y), rel=1e-9)


def test_odd_coefficients_detect_broken_input():
    with pytest.raises(AlgebraCheckFailed):
        char_poly_coeffs(np.eye(2))


def test_matrix_json_roundtrip():
    X = random_sp_algebra(2, 1).X
    data = json.loads(json.dumps(matrix_to_json(X)))
    assert np.array_equal(matrix_from_json(data), X)
