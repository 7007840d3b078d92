"""Index bookkeeping for alternating forms: basis ordering, wedge and d tables."""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations


@lru_cache(maxsize=None)
def basis(m: int, p: int) -> tuple[tuple[int, ...], ...]:
    """Strictly increasing index tuples of length p in range(m), lexicographic."""
    return tuple(combinations(range(m), p))


@lru_cache(maxsize=None)
def position(m: int, p: int) -> dict[tuple[int, ...], int]:
    return {I: n for n, I in enumerate(basis(m, p))}


def merge_sign(I, J) -> int:
    """Sign of the permutation sorting the concatenation I + J (disjoint, each sorted)."""
    inversions = sum(1 for i in I for j in J if i > j)
    return -1 if inversions % 2 else 1


@lru_cache(maxsize=None)
def wedge_table(m: int, p: int, q: int) -> tuple[tuple[int, int, int, int], ...]:
    """Entries (k, i, j, sign) with dx_I ^ dx_J = sign * dx_K."""
    pos = position(m, p + q)
    out = []
    for i, I in enumerate(basis(m, p)):
        for j, J in enumerate(basis(m, q)):
            if set(I) & set(J):
                continue
            K = tuple(sorted(I + J))
            out.append((pos[K], i, j, merge_sign(I, J)))
    return tuple(out)


@lru_cache(maxsize=None)
def d_table(m: int, p: int) -> tuple[tuple[int, int, int, int], ...]:
    """Entries (k, axis, i, sign) with dx_axis ^ dx_I = sign * dx_K."""
    pos = position(m, p + 1)
    out = []
    for i, I in enumerate(basis(m, p)):
        for a in range(m):
            if a in I:
                continue
            K = tuple(sorted(I + (a,)))
            sign = -1 if sum(1 for b in I if b < a) % 2 else 1
            out.append((pos[K], a, i, sign))
    return tuple(out)
