"""Periodic grids on the flat torus T^m = (R/Z)^m and their real-FFT machinery."""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from ..errors import BudgetExceeded, GridMismatch

DEFAULT_POINT_BUDGET = 4 * 16 ** 4


def point_budget() -> int:
    """Maximum n^m honoured by :class:`TorusGrid`; overridable via CHERNFORGE_BUDGET."""
    raw = os.environ.get("CHERNFORGE_BUDGET")
    return int(float(raw)) if raw else DEFAULT_POINT_BUDGET


@dataclass(frozen=True)
class TorusGrid:
    m: int
    n: int

    def __post_init__(self):
        if not 2 <= self.m <= 6:
            raise ValueError(f"dimension m must be in [2, 6], got {self.m}")
        if self.n < 4:
            raise ValueError(f"need at least 4 points per axis, got {self.n}")
        if self.n ** self.m > point_budget():
            raise BudgetExceeded(
                f"grid {self.n}^{self.m} = {self.n ** self.m} points exceeds budget {point_budget()}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.m

    @property
    def size(self) -> int:
        return self.n ** self.m

    @property
    def axes(self) -> tuple[int, ...]:
        """The trailing spatial axes of any field array."""
        return tuple(range(-self.m, 0))

    def coords(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays x_a = j / n."""
        x = np.arange(self.n) / self.n
        out = []
        for a in range(self.m):
            shape = [1] * self.m
            shape[a] = self.n
            out.append(x.reshape(shape))
        return out

    def resolves(self, h: int) -> bool:
        return self.n > 2 * h

    def check_same(self, other: "TorusGrid") -> None:
        if self != other:
            raise GridMismatch(f"grid mismatch: {self} vs {other}")

    @cached_property
    def spectral(self) -> "Spectral":
        return Spectral(self)


class Spectral:
    """Real FFT helpers: wave multipliers kappa_a = 2 pi k_a with Nyquist zeroed.

    Zeroing the Nyquist multiplier keeps derivatives of real fields real and
    makes each derivative exactly skew-adjoint on the grid.
    """

    def __init__(self, grid: TorusGrid):
        self.grid = grid
        n, m = grid.n, grid.m
        full = np.fft.fftfreq(n, d=1.0 / n)
        half = np.fft.rfftfreq(n, d=1.0 / n)
        if n % 2 == 0:
            full = np.where(np.abs(full) == n // 2, 0.0, full)
            half = np.where(half == n // 2, 0.0, half)
        self.spec_shape = (n,) * (m - 1) + (n // 2 + 1,)
        kappa = []
        for a in range(m):
            shape = [1] * m
            shape[a] = self.spec_shape[a]
            freqs = half if a == m - 1 else full
            kappa.append((2 * np.pi * freqs).reshape(shape))
        self.kappa = kappa
        lap = sum(k ** 2 for k in kappa)
        self.laplacian = np.broadcast_to(lap, self.spec_shape)
        # Green's function on modes the derivative can see; zero elsewhere
        with np.errstate(divide="ignore"):
            inv = np.where(self.laplacian > 0, 1.0 / np.where(self.laplacian > 0, self.laplacian, 1.0), 0.0)
        self.inv_laplacian = inv
        # nonconstant modes invisible to the zeroed-Nyquist derivative
        blind = self.laplacian == 0
        blind = blind.copy()
        blind[(0,) * m] = False
        self.blind = blind

    def forward(self, a: np.ndarray) -> np.ndarray:
        return sfft.rfftn(a, axes=self.grid.axes)

    def inverse(self, a: np.ndarray) -> np.ndarray:
        return sfft.irfftn(a, s=self.grid.shape, axes=self.grid.axes)

    def derivative(self, a: np.ndarray, axis: int) -> np.ndarray:
        return self.inverse(1j * self.kappa[axis] * self.forward(a))
