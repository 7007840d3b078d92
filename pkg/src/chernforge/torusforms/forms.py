"""Differential forms on flat tori with spectral exterior derivative.

Forms are stored in physical space as arrays of shape ``(C(m, p), n, ..., n)``
with components in lexicographic order of their index tuples.  The
array-level helpers accept extra leading batch dimensions so that the solver
can push whole tuples of forms through one FFT.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Mapping

import numpy as np

from .._combinatorics import basis, d_table, position, wedge_table
from ..errors import DegreeError, GridMismatch, HarmonicObstruction, NotClosed
from .grid import TorusGrid


def component_slice(i: int, m: int):
    return (Ellipsis, i) + (slice(None),) * m


def wedge_arrays(a: np.ndarray, b: np.ndarray, m: int, p: int, q: int) -> np.ndarray:
    if p + q > m:
        raise DegreeError(f"degree overflow: {p} + {q} > {m}")
    grid_shape = a.shape[-m:]
    lead = np.broadcast_shapes(a.shape[:-m - 1], b.shape[:-m - 1])
    out = np.zeros(lead + (comb(m, p + q),) + grid_shape, dtype=np.result_type(a, b))
    for k, i, j, sign in wedge_table(m, p, q):
        prod = a[component_slice(i, m)] * b[component_slice(j, m)]
        if sign > 0:
            out[component_slice(k, m)] += prod
        else:
            out[component_slice(k, m)] -= prod
    return out


def d_hat(A: np.ndarray, grid: TorusGrid, p: int) -> np.ndarray:
    """Exterior derivative acting on rfft spectra of degree-p component arrays."""
    m = grid.m
    if p >= m:
        raise DegreeError(f"cannot differentiate a top-degree ({p}) form")
    kappa = grid.spectral.kappa
    out = np.zeros(A.shape[:-m - 1] + (comb(m, p + 1),) + A.shape[-m:], dtype=complex)
    for k, a, i, sign in d_table(m, p):
        out[component_slice(k, m)] += (sign * 1j) * kappa[a] * A[component_slice(i, m)]
    return out


def codiff_hat(B: np.ndarray, grid: TorusGrid, p: int) -> np.ndarray:
    """Grid adjoint of :func:`d_hat`, taking degree p to degree p - 1."""
    m = grid.m
    if p < 1:
        raise DegreeError("codifferential of a 0-form")
    kappa = grid.spectral.kappa
    out = np.zeros(B.shape[:-m - 1] + (comb(m, p - 1),) + B.shape[-m:], dtype=complex)
    for k, a, i, sign in d_table(m, p - 1):
        out[component_slice(i, m)] += (-sign * 1j) * kappa[a] * B[component_slice(k, m)]
    return out


def d_arrays(a: np.ndarray, grid: TorusGrid, p: int) -> np.ndarray:
    sp = grid.spectral
    return sp.inverse(d_hat(sp.forward(a), grid, p))


def codiff_arrays(b: np.ndarray, grid: TorusGrid, p: int) -> np.ndarray:
    sp = grid.spectral
    return sp.inverse(codiff_hat(sp.forward(b), grid, p))


class DiffForm:
    """Real degree-p form on a :class:`TorusGrid`; immutable once built."""

    def __init__(self, grid: TorusGrid, degree: int, data: np.ndarray):
        if not 0 <= degree <= grid.m:
            raise DegreeError(f"degree {degree} out of range for m={grid.m}")
        data = np.array(data, dtype=float)
        expected = (comb(grid.m, degree),) + grid.shape
        if data.shape != expected:
            raise ValueError(f"data shape {data.shape} != {expected}")
        if not np.all(np.isfinite(data)):
            raise ValueError("non-finite values in form")
        data.setflags(write=False)
        self.grid = grid
        self.degree = degree
        self.data = data
        self._spectrum = None

    @classmethod
    def zeros(cls, grid: TorusGrid, degree: int) -> "DiffForm":
        return cls(grid, degree, np.zeros((comb(grid.m, degree),) + grid.shape))

    @classmethod
    def from_components(cls, grid: TorusGrid, degree: int,
                        components: Mapping[tuple[int, ...], np.ndarray | float]) -> "DiffForm":
        data = np.zeros((comb(grid.m, degree),) + grid.shape)
        pos = position(grid.m, degree)
        for I, vals in components.items():
            I = tuple(I)
            if I not in pos:
                raise KeyError(f"component {I} is not a sorted {degree}-subset of range({grid.m})")
            data[pos[I]] = vals
        return cls(grid, degree, data)

    @classmethod
    def constant(cls, grid: TorusGrid, degree: int,
                 coeffs: Mapping[tuple[int, ...], float]) -> "DiffForm":
        return cls.from_components(grid, degree, coeffs)

    @classmethod
    def volume(cls, grid: TorusGrid) -> "DiffForm":
        return cls(grid, grid.m, np.ones((1,) + grid.shape))

    @property
    def m(self) -> int:
        return self.grid.m

    @property
    def keys(self) -> tuple[tuple[int, ...], ...]:
        return basis(self.grid.m, self.degree)

    @property
    def components(self) -> dict[tuple[int, ...], np.ndarray]:
        return {I: self.data[n] for n, I in enumerate(self.keys)}

    def component(self, I) -> np.ndarray:
        return self.data[position(self.grid.m, self.degree)[tuple(I)]]

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            self._spectrum = self.grid.spectral.forward(self.data)
        return self._spectrum

    def sup_norm(self) -> float:
        return float(np.abs(self.data).max()) if self.data.size else 0.0

    def l2_norm(self) -> float:
        """Root of the grid-mean of the pointwise squared component norm."""
        return float(np.sqrt((self.data ** 2).sum(axis=0).mean()))

    def _check(self, other: "DiffForm") -> None:
        self.grid.check_same(other.grid)
        if self.degree != other.degree:
            raise DegreeError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "DiffForm") -> "DiffForm":
        self._check(other)
        return DiffForm(self.grid, self.degree, self.data + other.data)

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        self._check(other)
        return DiffForm(self.grid, self.degree, self.data - other.data)

    def __neg__(self) -> "DiffForm":
        return DiffForm(self.grid, self.degree, -self.data)

    def __mul__(self, s) -> "DiffForm":
        if isinstance(s, DiffForm):
            return wedge(self, s)
        return DiffForm(self.grid, self.degree, np.asarray(s) * self.data)

    def __rmul__(self, s) -> "DiffForm":
        return DiffForm(self.grid, self.degree, np.asarray(s) * self.data)

    def __xor__(self, other: "DiffForm") -> "DiffForm":
        return wedge(self, other)

    def d(self) -> "DiffForm":
        return exterior_d(self)

    def __repr__(self) -> str:
        return f"DiffForm(m={self.grid.m}, n={self.grid.n}, degree={self.degree}, sup={self.sup_norm():.3g})"


def wedge(a: DiffForm, b: DiffForm) -> DiffForm:
    if a.grid != b.grid:
        raise GridMismatch(f"grid mismatch: {a.grid} vs {b.grid}")
    m = a.grid.m
    if a.degree + b.degree > m:
        raise DegreeError(f"degree overflow: {a.degree} + {b.degree} > {m}")
    return DiffForm(a.grid, a.degree + b.degree, wedge_arrays(a.data, b.data, m, a.degree, b.degree))


def exterior_d(a: DiffForm) -> DiffForm:
    if a.degree >= a.grid.m:
        raise DegreeError(f"exterior derivative of a top-degree form (degree {a.degree})")
    sp = a.grid.spectral
    return DiffForm(a.grid, a.degree + 1, sp.inverse(d_hat(a.spectrum, a.grid, a.degree)))


def codifferential(a: DiffForm) -> DiffForm:
    sp = a.grid.spectral
    return DiffForm(a.grid, a.degree - 1, sp.inverse(codiff_hat(a.spectrum, a.grid, a.degree)))


def integrate(a: DiffForm) -> float:
    """Integral of a top-degree form over the unit-volume torus."""
    if a.degree != a.grid.m:
        raise DegreeError(f"can only integrate top-degree forms, got degree {a.degree}")
    return float(a.data[0].mean())


def harmonic_part(a: DiffForm) -> DiffForm:
    """Constant-coefficient part: the componentwise means."""
    means = a.data.reshape(a.data.shape[0], -1).mean(axis=1)
    data = np.broadcast_to(means.reshape((-1,) + (1,) * a.grid.m), a.data.shape)
    return DiffForm(a.grid, a.degree, data)


@dataclass(frozen=True)
class ExactnessReport:
    exact: bool
    scale: float
    d_sup: float
    harmonic_sup: float
    tol: float

    def __bool__(self) -> bool:
        return self.exact

    def as_dict(self) -> dict:
        return {"exact": self.exact, "scale": self.scale, "d_sup": self.d_sup,
                "harmonic_sup": self.harmonic_sup, "tol": self.tol}


DEFAULT_EXACT_TOL = 1e-9


def is_exact(a: DiffForm, tol: float = DEFAULT_EXACT_TOL) -> ExactnessReport:
    """Closed with vanishing harmonic part, both measured relative to sup|a|.

    A zero form is exact.  Top-degree forms are closed trivially.
    """
    if a.degree < 1:
        raise DegreeError("exactness is defined for degree >= 1")
    scale = a.sup_norm()
    d_sup = exterior_d(a).sup_norm() if a.degree < a.grid.m else 0.0
    harm = harmonic_part(a).sup_norm()
    thresh = tol * scale
    exact = scale == 0.0 or (d_sup <= thresh and harm <= thresh)
    return ExactnessReport(bool(exact), scale, d_sup, harm, tol)


def hodge_primitive(sigma: DiffForm, tol: float = DEFAULT_EXACT_TOL) -> DiffForm:
    """Minimal-norm (coexact) beta with d beta = sigma.

    Computed mode by mode as beta = codifferential(inverse Laplacian(sigma)).
    """
    if sigma.degree < 1:
        raise DegreeError("a 0-form has no primitive")
    rep = is_exact(sigma, tol)
    thresh = tol * rep.scale
    if rep.harmonic_sup > thresh:
        raise HarmonicObstruction(
            f"harmonic part {rep.harmonic_sup:.3e} exceeds tolerance {thresh:.3e}")
    if rep.d_sup > thresh:
        raise NotClosed(f"|d sigma| = {rep.d_sup:.3e} exceeds tolerance {thresh:.3e}")
    grid = sigma.grid
    sp = grid.spectral
    S = sigma.spectrum
    blind = S * sp.blind
    if rep.scale > 0:
        blind_sup = float(np.abs(sp.inverse(blind)).max())
        if blind_sup > thresh:
            raise HarmonicObstruction(
                f"Nyquist-mode content {blind_sup:.3e} is invisible to the grid derivative")
    beta = sp.inverse(codiff_hat(S * sp.inv_laplacian, grid, sigma.degree))
    return DiffForm(grid, sigma.degree - 1, beta)


def primitive_arrays(s: np.ndarray, grid: TorusGrid, p: int) -> np.ndarray:
    """Unchecked coexact primitive of a batch of degree-p component arrays."""
    sp = grid.spectral
    return sp.inverse(codiff_hat(sp.forward(s) * sp.inv_laplacian, grid, p))


def random_form(grid: TorusGrid, degree: int, h: int, seed, amplitude: float = 1.0):
    """Zero-mean band-limited random form and its exact TrigSpec.

    Every component gets independent normal cosine/sine amplitudes on all
    wavevectors with 0 < max|k_a| <= h, scaled so the sup norm stays O(amplitude).
    """
    from .trig import random_trig_spec

    spec = random_trig_spec(grid.m, degree, h, seed, amplitude=amplitude)
    return spec.evaluate(grid), spec
