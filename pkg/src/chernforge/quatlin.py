"""Quaternions, the complex 2k x 2k model of Sp(k), and its invariant polynomials.

A quaternion u + xi + yj + zk is identified with the pair (u + xi, y + zi),
i.e. with a + b j for complex a, b.  Left multiplication by a + b j then acts
on C^2 as the matrix [[a, b], [-conj(b), conj(a)]], and a k x k quaternion
matrix A + B j becomes the 2k x 2k block matrix [[A, B], [-conj(B), conj(A)]].
All symplectic conditions are taken relative to J = [[0, I_k], [-I_k, 0]].
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AlgebraCheckFailed

TOL = 1e-12
ODD_COEFF_TOL = 1e-9


@dataclass(frozen=True)
class Quaternion:
    u: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.u + other.u, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.u - other.u, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.u, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        return Quaternion(self.u * other, self.x * other, self.y * other, self.z * other)

    def __rmul__(self, s) -> "Quaternion":
        return Quaternion(self.u * s, self.x * s, self.y * s, self.z * s)

    def conj(self) -> "Quaternion":
        return Quaternion(self.u, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.u * self.u + self.x * self.x + self.y * self.y + self.z * self.z

    def as_tuple(self):
        return (self.u, self.x, self.y, self.z)

    def complex_pair(self) -> tuple[complex, complex]:
        """Return (a, b) with self = a + b j."""
        return complex(self.u, self.x), complex(self.y, self.z)

    @classmethod
    def from_complex_pair(cls, a: complex, b: complex) -> "Quaternion":
        return cls(a.real, a.imag, b.real, b.imag)

    def isclose(self, other: "Quaternion", tol: float = TOL) -> bool:
        return max(abs(s - o) for s, o in zip(self.as_tuple(), other.as_tuple())) <= tol


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def quat_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    # Hamilton product: i^2 = j^2 = k^2 = -1, ij = k, jk = i, ki = j
    return Quaternion(
        a.u * b.u - a.x * b.x - a.y * b.y - a.z * b.z,
        a.u * b.x + a.x * b.u + a.y * b.z - a.z * b.y,
        a.u * b.y - a.x * b.z + a.y * b.u + a.z * b.x,
        a.u * b.z + a.x * b.y - a.y * b.x + a.z * b.u,
    )


def hn_inner(v: Sequence[Quaternion], w: Sequence[Quaternion]) -> Quaternion:
    """Canonical inner product sum_i v_i * conj(w_i) on H^n."""
    if len(v) != len(w):
        raise ValueError(f"length mismatch: {len(v)} != {len(w)}")
    acc = Quaternion()
    for a, b in zip(v, w):
        acc = acc + quat_mul(a, b.conj())
    return acc


def hn_inner_split(v: Sequence[Quaternion], w: Sequence[Quaternion]) -> tuple[complex, complex]:
    """Split <v, w> = h + s j into its complex parts (h, s).

    ``h`` is the Hermitian product of the identified vectors in C^2n; ``s`` is
    the complex-bilinear symplectic pairing sum(b_i c_i - a_i d_i).
    """
    q = hn_inner(v, w)
    return q.complex_pair()


def as_quat_array(M) -> np.ndarray:
    """Coerce a nested sequence of Quaternions (or an (..., 4) real array) to (..., 4)."""
    if isinstance(M, np.ndarray) and M.dtype != object:
        return np.asarray(M, dtype=float)
    if isinstance(M[0], Quaternion):
        return np.array([q.as_tuple() for q in M], dtype=float)
    return np.array([[q.as_tuple() for q in row] for row in M], dtype=float)


def quat_to_complex(M) -> np.ndarray:
    """Map a k x k quaternion matrix to its 2k x 2k complex image.

    ``M`` is a nested list of :class:`Quaternion` or a real array of shape
    (k, k, 4) holding (u, x, y, z) per entry.
    """
    arr = as_quat_array(M)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 4:
        raise ValueError(f"expected a square quaternion matrix, got shape {arr.shape}")
    A = arr[..., 0] + 1j * arr[..., 1]
    B = arr[..., 2] + 1j * arr[..., 3]
    return np.block([[A, B], [-B.conj(), A.conj()]])


def complex_to_quat(X: np.ndarray) -> np.ndarray:
    """Inverse of :func:`quat_to_complex` on its image; returns a (k, k, 4) array."""
    k = X.shape[0] // 2
    A, B = X[:k, :k], X[:k, k:]
    return np.stack([A.real, A.imag, B.real, B.imag], axis=-1)


def quat_conj_transpose(M) -> np.ndarray:
    arr = as_quat_array(M)
    out = arr.transpose(1, 0, 2).copy()
    out[..., 1:] *= -1
    return out


def quat_matmul(M, N) -> np.ndarray:
    """Quaternion matrix product computed entrywise with the Hamilton product."""
    a, b = as_quat_array(M), as_quat_array(N)
    u1, x1, y1, z1 = (a[..., i][:, :, None] for i in range(4))
    u2, x2, y2, z2 = (b[..., i][None, :, :] for i in range(4))
    out = np.stack([
        u1 * u2 - x1 * x2 - y1 * y2 - z1 * z2,
        u1 * x2 + x1 * u2 + y1 * z2 - z1 * y2,
        u1 * y2 - x1 * z2 + y1 * u2 + z1 * x2,
        u1 * z2 + x1 * y2 - y1 * x2 + z1 * u2,
    ], axis=-1)
    return out.sum(axis=1)


def symplectic_j(k: int) -> np.ndarray:
    eye = np.eye(k)
    zero = np.zeros((k, k))
    return np.block([[zero, eye], [-eye, zero]]).astype(complex)


@dataclass(frozen=True)
class SpCheck:
    ok: bool
    skew_hermitian_residual: float
    symplectic_residual: float

    def __bool__(self) -> bool:
        return self.ok


def _sp_residuals(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Max-norm residuals of X* + X and X^t J + J X over trailing 2k x 2k dims."""
    n = X.shape[-1]
    k = n // 2
    Jm = symplectic_j(k)
    skew = np.abs(np.conj(np.swapaxes(X, -1, -2)) + X).max(axis=(-1, -2))
    sym = np.abs(np.swapaxes(X, -1, -2) @ Jm + Jm @ X).max(axis=(-1, -2))
    return skew, sym


def sp_algebra_check(X, tol: float = TOL) -> SpCheck:
    X = np.asarray(getattr(X, "X", X), dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {X.shape}")
    if X.shape[0] % 2:
        raise ValueError(f"sp(k) elements have even dimension, got {X.shape[0]}")
    skew, sym = _sp_residuals(X)
    skew, sym = float(skew), float(sym)
    return SpCheck(skew < tol and sym < tol, skew, sym)


def sp_group_check(U, tol: float = TOL) -> SpCheck:
    """Membership test for Sp(k): U U* = I = U* U and U^t J U = J."""
    U = np.asarray(getattr(U, "U", U), dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] % 2:
        raise ValueError(f"expected an even square matrix, got shape {U.shape}")
    n = U.shape[0]
    eye = np.eye(n)
    Jm = symplectic_j(n // 2)
    unitary = max(np.abs(U @ U.conj().T - eye).max(), np.abs(U.conj().T @ U - eye).max())
    sym = np.abs(U.T @ Jm @ U - Jm).max()
    return SpCheck(bool(unitary < tol and sym < tol), float(unitary), float(sym))


@dataclass(frozen=True)
class SpAlgebraElement:
    """X = [[A, B], [-conj(B), -A^t]] with A skew-Hermitian and B symmetric."""

    k: int
    X: np.ndarray

    @classmethod
    def from_blocks(cls, A: np.ndarray, B: np.ndarray) -> "SpAlgebraElement":
        A = np.asarray(A, dtype=complex)
        B = np.asarray(B, dtype=complex)
        X = np.block([[A, B], [-B.conj(), -A.T]])
        X.setflags(write=False)
        return cls(A.shape[0], X)

    @classmethod
    def from_matrix(cls, X, tol: float = TOL) -> "SpAlgebraElement":
        X = np.array(X, dtype=complex)
        chk = sp_algebra_check(X, tol)
        if not chk:
            raise AlgebraCheckFailed(f"not in sp(k): {chk}")
        X.setflags(write=False)
        return cls(X.shape[0] // 2, X)

    @property
    def A(self) -> np.ndarray:
        return self.X[: self.k, : self.k]

    @property
    def B(self) -> np.ndarray:
        return self.X[: self.k, self.k:]

    def to_json(self) -> str:
        return json.dumps(matrix_to_json(self.X))


@dataclass(frozen=True)
class SpGroupElement:
    k: int
    U: np.ndarray

    @classmethod
    def from_matrix(cls, U, tol: float = TOL) -> "SpGroupElement":
        U = np.array(U, dtype=complex)
        chk = sp_group_check(U, tol)
        if not chk:
            raise AlgebraCheckFailed(f"not in Sp(k): {chk}")
        U.setflags(write=False)
        return cls(U.shape[0] // 2, U)


def random_sp_algebra(k: int, seed) -> SpAlgebraElement:
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    H = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    A = (G - G.conj().T) / 2
    B = (H + H.T) / 2
    return SpAlgebraElement.from_blocks(A, B)


def sp_direct_sum(X: SpAlgebraElement, Y: SpAlgebraElement) -> SpAlgebraElement:
    """Block sum re-interleaved so that the result is in sp(k + k') for the standard J."""
    A = np.block([[X.A, np.zeros((X.k, Y.k))], [np.zeros((Y.k, X.k)), Y.A]])
    B = np.block([[X.B, np.zeros((X.k, Y.k))], [np.zeros((Y.k, X.k)), Y.B]])
    return SpAlgebraElement.from_blocks(A, B)


def _elementary_symmetric(values: np.ndarray) -> np.ndarray:
    """e_0..e_n of the given numbers (coefficients of prod(lambda + mu_i))."""
    e = np.zeros(len(values) + 1, dtype=values.dtype)
    e[0] = 1
    for mu in values:
        e[1:] = e[1:] + mu * e[:-1]
    return e


def char_poly_expansion(X) -> np.ndarray:
    """All coefficients c_r of det(lambda I + iX) = sum_r c_r lambda^(2k - r)."""
    X = np.asarray(getattr(X, "X", X), dtype=complex)
    chk = sp_algebra_check(X, tol=1e-10)
    if not chk:
        raise AlgebraCheckFailed(f"input is not in sp(k): {chk}")
    H = 1j * X
    mu = np.linalg.eigvalsh((H + H.conj().T) / 2)
    return _elementary_symmetric(mu)


def char_poly_coeffs(X) -> list[float]:
    """Return [f_1, ..., f_k] where det(lambda I + iX) = lambda^2k - f_1 lambda^(2k-2) + f_2 ...

    Odd-power coefficients must vanish for sp(k) elements; a residual above
    ``ODD_COEFF_TOL`` relative to the coefficient scale raises.
    """
    e = char_poly_expansion(X)
    n = len(e) - 1
    mu_scale = max(1.0, float(np.abs(np.linalg.eigvalsh(
        1j * np.asarray(getattr(X, "X", X), dtype=complex))).max()))
    for r in range(1, n + 1, 2):
        scale = math.comb(n, r) * mu_scale ** r
        if abs(e[r]) > ODD_COEFF_TOL * scale:
            raise AlgebraCheckFailed(f"odd coefficient e_{r} = {e[r]:.3e} does not vanish")
    return [float((-1) ** i * e[2 * i]) for i in range(1, n // 2 + 1)]


def odd_coefficient_residual(X) -> float:
    """Largest |odd coefficient| divided by its natural scale C(2k, r) * |mu|_max^r."""
    e = char_poly_expansion(X)
    n = len(e) - 1
    mu_scale = max(1.0, float(np.abs(np.linalg.eigvalsh(
        1j * np.asarray(getattr(X, "X", X), dtype=complex))).max()))
    return max(abs(e[r]) / (math.comb(n, r) * mu_scale ** r) for r in range(1, n + 1, 2))


def f1_closed_form(X) -> float:
    """f_1(X) = (trace(A^2) - (trace A)^2) / 2 with A = iX."""
    X = np.asarray(getattr(X, "X", X), dtype=complex)
    chk = sp_algebra_check(X, tol=1e-10)
    if not chk:
        raise AlgebraCheckFailed(f"input is not in sp(k): {chk}")
    A = 1j * X
    val = 0.5 * (np.trace(A @ A) - np.trace(A) ** 2)
    return float(val.real)


def matrix_to_json(X: np.ndarray) -> list:
    """Nested [re, im] pairs, the fixture format for complex matrices."""
    X = np.asarray(X, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in X]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]
