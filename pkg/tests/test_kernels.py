import importlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chernforge.minorlemma import PRIME, Ring, _backend, _kernels_py

try:
    from chernforge.minorlemma import _fpkernels
except ImportError:  # extension not built
    _fpkernels = None

IMPLS = [_kernels_py] + ([_fpkernels] if _fpkernels is not None else [])


def rank_oracle(rows):
    """Plain Gaussian elimination over Z_p with Python ints."""
    M = [list(map(int, r)) for r in rows]
    rank, col = 0, 0
    nrows, ncols = len(M), len(M[0]) if M else 0
    while rank < nrows and col < ncols:
        piv = next((i for i in range(rank, nrows) if M[i][col] % PRIME), None)
        if piv is None:
            col += 1
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], PRIME - 2, PRIME)
        for i in range(nrows):
            if i != rank and M[i][col] % PRIME:
                f = M[i][col] * inv % PRIME
                M[i] = [(x - f * y) % PRIME for x, y in zip(M[i], M[rank])]
        rank += 1
        col += 1
    return rank


def det_oracle(rows):
    n = len(rows)
    if n == 1:
        return int(rows[0][0]) % PRIME
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * int(rows[0][j]) * det_oracle(minor)
    return total % PRIME


matrices = st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: st.lists(
    st.lists(st.one_of(st.integers(0, 3), st.integers(0, PRIME - 1)), min_size=c, max_size=c),
    min_size=r, max_size=r)))


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@given(rows=matrices)
def test_rank_matches_oracle(impl, rows):
    assert impl.rank_mod_p(np.array(rows, dtype=object)) == rank_oracle(rows)


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.lists(st.integers(0, PRIME - 1), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_oracle(impl, rows):
    assert impl.det_mod_p(np.array(rows, dtype=object)) == det_oracle(rows)


def random_multilinear(seed, nvars=6, nterms=12):
    rng = np.random.default_rng(seed)
    R = Ring([f"v{i}" for i in range(nvars)])
    P = R.zero()
    for _ in range(nterms):
        support = rng.choice(nvars, size=rng.integers(0, 4), replace=False)
        mono = R.const(int(rng.integers(1, PRIME)))
        for i in support:
            mono = mono * R.var(f"v{i}")
        P = P + mono
    return R, P


def kernel_inputs(P):
    supports, coeffs = P.monomial_supports()
    offsets = np.zeros(len(supports) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(s) for s in supports])
    var_idx = np.array([v for s in supports for v in s], dtype=np.int64)
    return offsets, var_idx, coeffs


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_derivatives_match_symbolic(impl, seed):
    R, P = random_multilinear(seed)
    rng = np.random.default_rng(seed + 1)
    point = [int(x) for x in rng.integers(0, PRIME, R.nvars, dtype=np.int64)]
    pt = dict(zip(R.names, point))
    val, grad, hess = impl.eval_multilinear_derivs(*kernel_inputs(P), point)
    assert int(val) == P.evaluate(pt)
    for i, a in enumerate(R.names):
        assert int(grad[i]) == P.diff(a).evaluate(pt)
        for j, b in enumerate(R.names):
            expect = P.diff(a).diff(b).evaluate(pt) if i != j else 0
            assert int(hess[i][j]) == expect


def test_backend_selection(monkeypatch):
    monkeypatch.setenv("CHERNFORGE_PURE_PYTHON", "1")
    forced = importlib.reload(_backend)
    try:
        assert forced.BACKEND == "python"
        assert forced.rank_mod_p is _kernels_py.rank_mod_p
    finally:
        monkeypatch.delenv("CHERNFORGE_PURE_PYTHON")
        restored = importlib.reload(_backend)
    assert restored.BACKEND == ("cython" if _fpkernels is not None else "python")
