"""Sparse multivariate polynomials over Z_p, p = 2^61 - 1.

Monomials are packed into one Python int with 16 bits per variable, so that
multiplying monomials is integer addition and degree tests are bit masks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

PRIME = (1 << 61) - 1
EXP_BITS = 16
_SLOT = (1 << EXP_BITS) - 1


class Ring:
    """Variable universe shared by a family of polynomials."""

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        self.names = names
        self.index = {v: i for i, v in enumerate(names)}
        # every slot bit except the lowest: nonzero iff some exponent >= 2
        self._high_mask = sum((_SLOT ^ 1) << (EXP_BITS * i) for i in range(len(names)))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Ring({len(self.names)} vars)"

    def var(self, name: str) -> "FpPoly":
        return FpPoly(self, {1 << (EXP_BITS * self.index[name]): 1})

    def const(self, c: int) -> "FpPoly":
        return FpPoly(self, {0: c})

    def zero(self) -> "FpPoly":
        return FpPoly(self, {})

    def pack(self, exps: Mapping[str, int]) -> int:
        key = 0
        for name, e in exps.items():
            if not 0 <= e <= _SLOT:
                raise ValueError(f"exponent {e} out of range")
            key += e << (EXP_BITS * self.index[name])
        return key

    def unpack(self, key: int) -> dict[str, int]:
        out = {}
        i = 0
        while key:
            e = key & _SLOT
            if e:
                out[self.names[i]] = e
            key >>= EXP_BITS
            i += 1
        return out

    def support_indices(self, key: int) -> list[int]:
        out, i = [], 0
        while key:
            if key & _SLOT:
                out.append(i)
            key >>= EXP_BITS
            i += 1
        return out


@dataclass(frozen=True, eq=False)
class FpPoly:
    """Immutable polynomial; ``terms`` maps packed monomial -> coefficient in [1, p)."""

    ring: Ring
    terms: Mapping[int, int]

    def __post_init__(self):
        clean = {}
        for k, c in self.terms.items():
            if k < 0:
                raise ValueError("negative exponent")
            c %= PRIME
            if c:
                clean[k] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> "FpPoly":
        p = object.__new__(cls)
        object.__setattr__(p, "ring", ring)
        object.__setattr__(p, "terms", terms)
        return p

    def _coerce(self, other) -> "FpPoly":
        if isinstance(other, FpPoly):
            if other.ring != self.ring:
                raise ValueError("polynomials live in different rings")
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> "FpPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = (out.get(k, 0) + c) % PRIME
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return FpPoly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> "FpPoly":
        return FpPoly._raw(self.ring, {k: PRIME - c for k, c in self.terms.items()})

    def __sub__(self, other) -> "FpPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "FpPoly":
        return (-self) + other

    def __mul__(self, other) -> "FpPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, int] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = k1 + k2
                out[k] = (out.get(k, 0) + c1 * c2) % PRIME
        return FpPoly._raw(self.ring, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c: int) -> "FpPoly":
        c %= PRIME
        if not c:
            return self.ring.zero()
        return FpPoly._raw(self.ring, {k: v * c % PRIME for k, v in self.terms.items()})

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(self.ring.unpack(k).values()) for k in self.terms)

    def variables(self) -> list[str]:
        """Names of variables that occur, in ring order."""
        acc = 0
        for k in self.terms:
            acc |= k
        return [self.ring.names[i] for i in self.ring.support_indices(acc)]

    def is_multilinear(self) -> bool:
        mask = self.ring._high_mask
        return all(not (k & mask) for k in self.terms)

    def evaluate(self, point: Mapping[str, int]) -> int:
        vals = [int(point.get(v, 0)) % PRIME for v in self.ring.names]
        total = 0
        for k, c in self.terms.items():
            term = c
            i = 0
            while k:
                e = k & _SLOT
                if e:
                    term = term * pow(vals[i], e, PRIME) % PRIME
                k >>= EXP_BITS
                i += 1
            total = (total + term) % PRIME
        return total

    def diff(self, name: str) -> "FpPoly":
        shift = EXP_BITS * self.ring.index[name]
        unit = 1 << shift
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & _SLOT
            if e:
                out[k - unit] = c * e % PRIME
        return FpPoly(self.ring, out)

    def common_monomial(self) -> dict[str, int]:
        """Largest monomial dividing every term."""
        if not self.terms:
            return {}
        common = None
        for k in self.terms:
            e = self.ring.unpack(k)
            common = e if common is None else {v: min(x, e[v]) for v, x in common.items() if v in e}
            if not common:
                break
        return common or {}

    def divide_monomial(self, mono: Mapping[str, int]) -> "FpPoly":
        key = self.ring.pack(mono)
        out = {}
        for k, c in self.terms.items():
            e = self.ring.unpack(k)
            if any(e.get(v, 0) < x for v, x in mono.items()):
                raise ValueError("monomial does not divide the polynomial")
            r = k - key
            out[r] = c
        return FpPoly._raw(self.ring, out)

    def monomial_supports(self) -> tuple[list[list[int]], list[int]]:
        """(variable indices per term, coefficients) for multilinear evaluation kernels."""
        supports, coeffs = [], []
        for k, c in self.terms.items():
            supports.append(self.ring.support_indices(k))
            coeffs.append(c)
        return supports, coeffs

    def to_dict(self) -> dict:
        return {"p": PRIME, "vars": list(self.ring.names),
                "terms": [[self.ring.unpack(k), c] for k, c in sorted(self.terms.items())]}

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in sorted(self.terms.items(), reverse=True)[:6]:
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in self.ring.unpack(k).items())
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        more = f" + ... ({len(self.terms)} terms)" if len(self.terms) > 6 else ""
        return " + ".join(parts) + more


def product(polys: Iterable[FpPoly], ring: Ring) -> FpPoly:
    out = ring.const(1)
    for p in polys:
        out = out * p
    return out
