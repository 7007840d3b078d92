"""Exact trigonometric-polynomial forms: JSON I/O and an analytic oracle.

A scalar trig polynomial is a finite sum of c cos(2 pi k.x) + s sin(2 pi k.x).
Wavevectors are stored canonically (first nonzero entry positive) so equal
functions have equal term maps.  Products use the product-to-sum identities,
derivatives are taken termwise, so d and wedge on TrigSpecs never touch a grid.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np

from .._combinatorics import basis, d_table, position, wedge_table
from ..errors import DegreeError, ResolutionError
from .forms import DiffForm
from .grid import TorusGrid

TWO_PI = 2 * np.pi


def _canonical(k: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Return (k', s) with cos(k.x) = cos(k'.x) and sin(k.x) = s * sin(k'.x)."""
    for v in k:
        if v > 0:
            return k, 1
        if v < 0:
            return tuple(-x for x in k), -1
    return k, 0


@dataclass
class TrigPoly:
    m: int
    terms: dict = field(default_factory=dict)  # k -> [cos, sin]

    def add_term(self, k, c: float, s: float) -> None:
        k, flip = _canonical(tuple(int(v) for v in k))
        if len(k) != self.m:
            raise ValueError(f"wavevector {k} has wrong dimension (m={self.m})")
        s = s * flip
        cur = self.terms.get(k, [0.0, 0.0])
        cur = [cur[0] + c, cur[1] + s]
        if cur[0] == 0.0 and cur[1] == 0.0:
            self.terms.pop(k, None)
        else:
            self.terms[k] = cur

    @classmethod
    def constant(cls, m: int, c: float) -> "TrigPoly":
        p = cls(m)
        if c:
            p.add_term((0,) * m, c, 0.0)
        return p

    def copy(self) -> "TrigPoly":
        return TrigPoly(self.m, {k: list(v) for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def max_harmonic(self) -> int:
        return max((max(abs(v) for v in k) for k in self.terms), default=0)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        out = self.copy()
        for k, (c, s) in other.terms.items():
            out.add_term(k, c, s)
        return out

    def scale(self, a: float) -> "TrigPoly":
        out = TrigPoly(self.m)
        for k, (c, s) in self.terms.items():
            out.add_term(k, a * c, a * s)
        return out

    def __neg__(self) -> "TrigPoly":
        return self.scale(-1.0)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        out = TrigPoly(self.m)
        for ka, (ca, sa) in self.terms.items():
            for kb, (cb, sb) in other.terms.items():
                plus = tuple(x + y for x, y in zip(ka, kb))
                minus = tuple(x - y for x, y in zip(ka, kb))
                # cosA cosB, sinA sinB, sinA cosB, cosA sinB
                out.add_term(plus, 0.5 * (ca * cb - sa * sb), 0.5 * (sa * cb + ca * sb))
                out.add_term(minus, 0.5 * (ca * cb + sa * sb), 0.5 * (sa * cb - ca * sb))
        return out

    def derivative(self, axis: int) -> "TrigPoly":
        out = TrigPoly(self.m)
        for k, (c, s) in self.terms.items():
            w = TWO_PI * k[axis]
            if w:
                out.add_term(k, w * s, -w * c)
        return out

    def mean(self) -> float:
        return self.terms.get((0,) * self.m, [0.0, 0.0])[0]

    def evaluate_points(self, x: np.ndarray) -> np.ndarray:
        """Direct evaluation at points x of shape (npts, m); the oracle path."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.zeros(x.shape[0])
        for k, (c, s) in self.terms.items():
            phase = TWO_PI * (x @ np.asarray(k, dtype=float))
            out += c * np.cos(phase) + s * np.sin(phase)
        return out

    def evaluate_direct(self, grid: TorusGrid) -> np.ndarray:
        xs = grid.coords()
        out = np.zeros(grid.shape)
        for k, (c, s) in self.terms.items():
            phase = TWO_PI * sum(kk * xa for kk, xa in zip(k, xs))
            out += c * np.cos(phase) + s * np.sin(phase)
        return out

    def evaluate(self, grid: TorusGrid) -> np.ndarray:
        """Sample on the grid by inverse FFT (identical to direct evaluation up to roundoff)."""
        h = self.max_harmonic()
        if not grid.resolves(h):
            raise ResolutionError(f"grid n={grid.n} does not resolve harmonic {h} (need n > {2 * h})")
        spec = np.zeros(grid.shape, dtype=complex)
        N = grid.size
        for k, (c, s) in self.terms.items():
            idx = tuple(v % grid.n for v in k)
            neg = tuple((-v) % grid.n for v in k)
            if idx == neg:
                spec[idx] += c * N
            else:
                spec[idx] += 0.5 * (c - 1j * s) * N
                spec[neg] += 0.5 * (c + 1j * s) * N
        return np.fft.ifftn(spec).real

    def to_json(self) -> list:
        return [{"k": list(k), "cos": float(c), "sin": float(s)} for k, (c, s) in sorted(self.terms.items())]


@dataclass
class TrigSpec:
    """A degree-p form whose components are trig polynomials."""

    m: int
    degree: int
    components: dict = field(default_factory=dict)  # sorted index tuple -> TrigPoly

    def __post_init__(self):
        if not 0 <= self.degree <= self.m:
            raise DegreeError(f"degree {self.degree} out of range for m={self.m}")
        pos = position(self.m, self.degree)
        for I in self.components:
            if tuple(I) not in pos:
                raise KeyError(f"component {I} is not a sorted {self.degree}-subset of range({self.m})")

    @classmethod
    def zero(cls, m: int, degree: int) -> "TrigSpec":
        return cls(m, degree, {})

    def component(self, I) -> TrigPoly:
        return self.components.get(tuple(I), TrigPoly(self.m))

    def add_component(self, I, poly: TrigPoly) -> None:
        I = tuple(I)
        cur = self.components.get(I, TrigPoly(self.m)) + poly
        if cur.is_zero():
            self.components.pop(I, None)
        else:
            self.components[I] = cur

    def max_harmonic(self) -> int:
        return max((p.max_harmonic() for p in self.components.values()), default=0)

    def evaluate(self, grid: TorusGrid, method: str = "fft") -> DiffForm:
        if grid.m != self.m:
            raise ValueError(f"spec is for m={self.m}, grid has m={grid.m}")
        h = self.max_harmonic()
        if not grid.resolves(h):
            raise ResolutionError(f"grid n={grid.n} does not resolve harmonic {h} (need n > {2 * h})")
        data = np.zeros((comb(self.m, self.degree),) + grid.shape)
        pos = position(self.m, self.degree)
        for I, poly in self.components.items():
            if method == "fft":
                data[pos[I]] = poly.evaluate(grid)
            elif method == "direct":
                data[pos[I]] = poly.evaluate_direct(grid)
            else:
                raise ValueError(f"unknown evaluation method {method!r}")
        return DiffForm(grid, self.degree, data)

    def __add__(self, other: "TrigSpec") -> "TrigSpec":
        self._check(other)
        out = TrigSpec(self.m, self.degree, {I: p.copy() for I, p in self.components.items()})
        for I, p in other.components.items():
            out.add_component(I, p)
        return out

    def scale(self, a: float) -> "TrigSpec":
        return TrigSpec(self.m, self.degree, {I: p.scale(a) for I, p in self.components.items()})

    def __sub__(self, other: "TrigSpec") -> "TrigSpec":
        return self + other.scale(-1.0)

    def _check(self, other: "TrigSpec") -> None:
        if (self.m, self.degree) != (other.m, other.degree):
            raise DegreeError("mismatched TrigSpecs")

    def d(self) -> "TrigSpec":
        """Analytic exterior derivative."""
        if self.degree >= self.m:
            raise DegreeError("exterior derivative of a top-degree form")
        out = TrigSpec.zero(self.m, self.degree + 1)
        keys = basis(self.m, self.degree + 1)
        src = basis(self.m, self.degree)
        for k, a, i, sign in d_table(self.m, self.degree):
            poly = self.components.get(src[i])
            if poly is not None:
                out.add_component(keys[k], poly.derivative(a).scale(sign))
        return out

    def wedge(self, other: "TrigSpec") -> "TrigSpec":
        if self.m != other.m:
            raise ValueError("dimension mismatch")
        if self.degree + other.degree > self.m:
            raise DegreeError("degree overflow")
        out = TrigSpec.zero(self.m, self.degree + other.degree)
        keys = basis(self.m, out.degree)
        ka, kb = basis(self.m, self.degree), basis(self.m, other.degree)
        for k, i, j, sign in wedge_table(self.m, self.degree, other.degree):
            pa, pb = self.components.get(ka[i]), other.components.get(kb[j])
            if pa is not None and pb is not None:
                out.add_component(keys[k], (pa * pb).scale(sign))
        return out

    def times_scalar(self, f: TrigPoly) -> "TrigSpec":
        return TrigSpec(self.m, self.degree, {I: p * f for I, p in self.components.items()})

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "degree": self.degree,
            "terms": [{"component": list(I), "harmonics": p.to_json()}
                      for I, p in sorted(self.components.items())],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "TrigSpec":
        unknown = set(data) - {"m", "degree", "terms"}
        if unknown:
            raise ValueError(f"unknown TrigSpec keys: {sorted(unknown)}")
        m, degree = int(data["m"]), int(data["degree"])
        spec = cls.zero(m, degree)
        for term in data.get("terms", []):
            I = tuple(int(v) for v in term["component"])
            if len(I) != degree or list(I) != sorted(set(I)) or any(not 0 <= v < m for v in I):
                raise ValueError(f"bad component {I} for a {degree}-form on T^{m}")
            poly = TrigPoly(m)
            for hm in term.get("harmonics", []):
                poly.add_term(hm["k"], float(hm.get("cos", 0.0)), float(hm.get("sin", 0.0)))
            spec.add_component(I, poly)
        return spec

    @classmethod
    def from_json(cls, text: str) -> "TrigSpec":
        return cls.from_dict(json.loads(text))


def scalar_spec(poly: TrigPoly) -> TrigSpec:
    return TrigSpec(poly.m, 0, {(): poly} if not poly.is_zero() else {})


def random_trig_poly(m: int, h: int, rng: np.random.Generator, amplitude: float = 1.0,
                     zero_mean: bool = True) -> TrigPoly:
    ks = [k for k in product(range(-h, h + 1), repeat=m) if _canonical(k) == (k, 1)]
    poly = TrigPoly(m)
    if not ks and zero_mean:
        return poly
    scale = amplitude / np.sqrt(max(len(ks), 1))
    coeffs = rng.standard_normal((len(ks), 2)) * scale
    for k, (c, s) in zip(ks, coeffs):
        poly.add_term(k, float(c), float(s))
    if not zero_mean:
        poly.add_term((0,) * m, float(rng.standard_normal() * amplitude), 0.0)
    return poly


def random_trig_spec(m: int, degree: int, h: int, seed, amplitude: float = 1.0) -> TrigSpec:
    rng = np.random.default_rng(seed)
    spec = TrigSpec.zero(m, degree)
    for I in basis(m, degree):
        spec.add_component(I, random_trig_poly(m, h, rng, amplitude))
    return spec
