"""Pure-Python mod-p kernels; same interface as the compiled ``_fpkernels``."""
from __future__ import annotations

import numpy as np

PRIME = (1 << 61) - 1


def eval_multilinear_derivs(offsets, var_idx, coeffs, point):
    """Value, gradient and Hessian mod p of a multilinear polynomial at ``point``.

    Term t has coefficient coeffs[t] and variables var_idx[offsets[t]:offsets[t+1]].
    Products that omit one or two factors use prefix/suffix products, so no
    modular inverses are needed and zero coordinates are handled.
    """
    p = PRIME
    r = [int(v) % p for v in point]
    nv = len(r)
    grad = [0] * nv
    hess = [[0] * nv for _ in range(nv)]
    value = 0
    offsets = [int(o) for o in offsets]
    var_idx = [int(v) for v in var_idx]
    for t in range(len(offsets) - 1):
        vs = var_idx[offsets[t]:offsets[t + 1]]
        c = int(coeffs[t]) % p
        d = len(vs)
        xs = [r[v] for v in vs]
        suffix = [1] * (d + 1)
        for i in range(d - 1, -1, -1):
            suffix[i] = suffix[i + 1] * xs[i] % p
        value = (value + c * suffix[0]) % p
        prefix = c
        for i in range(d):
            vi = vs[i]
            grad[vi] = (grad[vi] + prefix * suffix[i + 1]) % p
            run = prefix
            for j in range(i + 1, d):
                h = run * suffix[j + 1] % p
                vj = vs[j]
                hess[vi][vj] = (hess[vi][vj] + h) % p
                run = run * xs[j] % p
            prefix = prefix * xs[i] % p
    H = np.array(hess, dtype=np.uint64)
    H = (H + H.T) % np.uint64(PRIME)  # filled on the upper triangle only
    return value, np.array(grad, dtype=np.uint64), H


def _rows(mat):
    return [[int(x) % PRIME for x in row] for row in np.asarray(mat, dtype=object).tolist()]


def rank_mod_p(mat) -> int:
    p = PRIME
    a = _rows(mat)
    if not a:
        return 0
    nr, nc = len(a), len(a[0])
    rank = 0
    for col in range(nc):
        piv = next((i for i in range(rank, nr) if a[i][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][col], p - 2, p)
        for i in range(rank + 1, nr):
            f = a[i][col] * inv % p
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
        if rank == nr:
            break
    return rank


def det_mod_p(mat) -> int:
    p = PRIME
    a = _rows(mat)
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("det_mod_p needs a square matrix")
    det = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = p - det if det else 0
        det = det * a[col][col] % p
        inv = pow(a[col][col], p - 2, p)
        for i in range(col + 1, n):
            f = a[i][col] * inv % p
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[col])]
    return det
