# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled mod-p kernels for p = 2^61 - 1 using 128-bit products."""
import numpy as np
cimport numpy as cnp

ctypedef unsigned long long u64
ctypedef long long i64

cdef extern from *:
    """
    typedef unsigned __int128 u128;
    #define P61 2305843009213693951ULL
    static inline unsigned long long mulmod61(unsigned long long a, unsigned long long b) {
        const unsigned long long P = (1ULL << 61) - 1;
        u128 z = (u128)a * b;
        unsigned long long lo = (unsigned long long)(z & P);
        unsigned long long hi = (unsigned long long)(z >> 61);
        unsigned long long s = lo + hi;
        s = (s & P) + (s >> 61);
        return s >= P ? s - P : s;
    }
    """
    u64 mulmod61(u64 a, u64 b) nogil
    u64 P61

P = 2305843009213693951

cdef inline u64 addmod(u64 a, u64 b) nogil:
    cdef u64 s = a + b
    return s - P61 if s >= P61 else s

cdef inline u64 submod(u64 a, u64 b) nogil:
    return a - b if a >= b else a + P61 - b

cdef u64 powmod(u64 a, u64 e) nogil:
    cdef u64 r = 1
    while e:
        if e & 1:
            r = mulmod61(r, a)
        a = mulmod61(a, a)
        e >>= 1
    return r


def eval_multilinear_derivs(offsets, var_idx, coeffs, point):
    cdef cnp.int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef cnp.int64_t[::1] vs = np.ascontiguousarray(var_idx, dtype=np.int64)
    cdef cnp.uint64_t[::1] cf = np.ascontiguousarray(np.asarray(coeffs, dtype=object) % P, dtype=np.uint64)
    cdef cnp.uint64_t[::1] r = np.ascontiguousarray(np.asarray(point, dtype=object) % P, dtype=np.uint64)
    cdef Py_ssize_t nv = r.shape[0]
    cdef Py_ssize_t nt = off.shape[0] - 1
    grad_np = np.zeros(nv, dtype=np.uint64)
    hess_np = np.zeros((nv, nv), dtype=np.uint64)
    cdef cnp.uint64_t[::1] grad = grad_np
    cdef cnp.uint64_t[:, ::1] hess = hess_np
    cdef u64 suffix[64]
    cdef u64 value = 0, prefix, run, h
    cdef Py_ssize_t t, i, j, d, base, vi, vj
    for t in range(nt):
        base = off[t]
        d = off[t + 1] - base
        if d > 63:
            raise ValueError("term degree exceeds kernel limit")
        suffix[d] = 1
        for i in range(d - 1, -1, -1):
            suffix[i] = mulmod61(suffix[i + 1], r[vs[base + i]])
        value = addmod(value, mulmod61(cf[t], suffix[0]))
        prefix = cf[t]
        for i in range(d):
            vi = vs[base + i]
            grad[vi] = addmod(grad[vi], mulmod61(prefix, suffix[i + 1]))
            run = prefix
            for j in range(i + 1, d):
                vj = vs[base + j]
                h = mulmod61(run, suffix[j + 1])
                hess[vi, vj] = addmod(hess[vi, vj], h)
                run = mulmod61(run, r[vj])
            prefix = mulmod61(prefix, r[vi])
    for i in range(nv):
        for j in range(i + 1, nv):
            h = addmod(hess[i, j], hess[j, i])
            hess[i, j] = h
            hess[j, i] = h
    return int(value), grad_np, hess_np


cdef object _reduce(mat):
    a = np.array(np.asarray(mat, dtype=object) % P, dtype=np.uint64)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return np.ascontiguousarray(a)


def rank_mod_p(mat):
    a_np = _reduce(mat)
    cdef cnp.uint64_t[:, ::1] a = a_np
    cdef Py_ssize_t nr = a.shape[0], nc = a.shape[1]
    cdef Py_ssize_t rank = 0, col, i, j, piv
    cdef u64 inv, f, tmp
    for col in range(nc):
        if rank == nr:
            break
        piv = -1
        for i in range(rank, nr):
            if a[i, col]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(nc):
                tmp = a[rank, j]; a[rank, j] = a[piv, j]; a[piv, j] = tmp
        inv = powmod(a[rank, col], P61 - 2)
        for i in range(rank + 1, nr):
            if a[i, col]:
                f = mulmod61(a[i, col], inv)
                for j in range(col, nc):
                    a[i, j] = submod(a[i, j], mulmod61(f, a[rank, j]))
        rank += 1
    return int(rank)


def det_mod_p(mat):
    a_np = _reduce(mat)
    cdef cnp.uint64_t[:, ::1] a = a_np
    cdef Py_ssize_t n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("det_mod_p needs a square matrix")
    cdef Py_ssize_t col, i, j, piv
    cdef u64 det = 1, inv, f, tmp
    for col in range(n):
        piv = -1
        for i in range(col, n):
            if a[i, col]:
                piv = i
                break
        if piv < 0:
            return 0
        if piv != col:
            for j in range(n):
                tmp = a[col, j]; a[col, j] = a[piv, j]; a[piv, j] = tmp
            det = submod(0, det)
        det = mulmod61(det, a[col, col])
        inv = powmod(a[col, col], P61 - 2)
        for i in range(col + 1, n):
            if a[i, col]:
                f = mulmod61(a[i, col], inv)
                for j in range(col, n):
                    a[i, j] = submod(a[i, j], mulmod61(f, a[col, j]))
    return int(det)
