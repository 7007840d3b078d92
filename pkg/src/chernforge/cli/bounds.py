"""Dimension bounds for quaternionic realizations, with explicit rounding conventions."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from math import ceil, floor


@dataclass(frozen=True)
class BoundsReport:
    m: int
    k: int | None
    q_min: int
    secondary_k_min: int
    secondary_k_bound: str
    exact_char_n_min: int
    exact_char_n_bound: str
    m0: int
    m0_effective: int
    theorem_n_min: int
    theorem_n_bound: str
    schlafly_n_min: int | None
    conventions: dict
    unspecified: list

    def as_dict(self) -> dict:
        return asdict(self)


def q_min(m: int) -> int:
    return m * (m + 1) // 2


def schlafly_bound(m: int, k: int) -> int:
    """n >= k (m + 1)(4 m k^2 + 2 m k + 1)."""
    return k * (m + 1) * (4 * m * k * k + 2 * m * k + 1)


def bounds(m: int, k: int | None = None) -> BoundsReport:
    if m < 1:
        raise ValueError("m must be >= 1")
    if k is not None and k < 1:
        raise ValueError("k must be >= 1")
    tri = Fraction(m * (m + 1))
    sec = tri / 4
    exact = tri / 6
    m0 = floor(Fraction(m + 1, 4)) - 1
    m0_eff = max(m0, 0)
    # strict inequality n > m0 + m(m+1)/6: smallest integer strictly above
    theorem_n = floor(m0_eff + exact) + 1
    return BoundsReport(
        m=m,
        k=k,
        q_min=q_min(m),
        secondary_k_min=ceil(sec),
        secondary_k_bound=f"k >= m(m+1)/4 = {sec}",
        exact_char_n_min=ceil(exact),
        exact_char_n_bound=f"n >= m(m+1)/6 = {exact} (from 3n >= m(m+1)/2)",
        m0=m0,
        m0_effective=m0_eff,
        theorem_n_min=theorem_n,
        theorem_n_bound=f"n > m0 + m(m+1)/6 = {m0_eff + exact}",
        schlafly_n_min=schlafly_bound(m, k) if k is not None else None,
        conventions={
            "bracket": "[x] in m0 = [(m+1)/4] - 1 is read as floor",
            "ceil": "non-strict real bounds are rounded up to the least admissible integer",
            "strict": "the theorem bound is strict; theorem_n_min is the least integer above it",
            "m0_effective": "m0 is negative for m <= 2; the reduction step uses max(m0, 0)",
        },
        unspecified=["the headline theorem's own bounds on k and n are left blank in the source "
                     "statement; only the bounds above are computed"],
    )
