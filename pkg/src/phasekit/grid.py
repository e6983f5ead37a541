"""Centered 1D grids, sampled functions, and the unitary Fourier pipeline.

Every transform in this package runs on grids that are symmetric about the
origin (x_min = -N*dx/2, N even).  The Fourier convention is the symmetric
one: a factor (2*pi)**-0.5 on both directions, e^{-i xi x} forward.  Dual
grids come out in natural ascending order with spacing 2*pi/(N*dx), so the
dual of the dual is the original grid again.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.fft as _sfft

TWO_PI = 2.0 * np.pi
SQRT_TWO_PI = float(np.sqrt(2.0 * np.pi))


class ConfigurationError(ValueError):
    """A grid or parameter violates a structural precondition."""


def fft_workers() -> int:
    """Worker count for scipy.fft, from PHASEKIT_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("PHASEKIT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid x_j = x_min + j*dx, j = 0..n-1, with n even."""

    n: int
    x_min: float
    dx: float

    def __post_init__(self) -> None:
        if self.n <= 0 or self.n % 2 != 0:
            raise ConfigurationError(
                f"grid size must be a positive even integer, got {self.n}"
            )
        if not self.dx > 0:
            raise ConfigurationError(f"grid spacing must be positive, got {self.dx}")

    @classmethod
    def centered(cls, n: int, half_width: float) -> "Grid1D":
        """Grid of n points covering [-half_width, half_width)."""
        if not half_width > 0:
            raise ConfigurationError("half_width must be positive")
        return cls(n, -float(half_width), 2.0 * float(half_width) / n)

    @property
    def length(self) -> float:
        return self.n * self.dx

    @property
    def dual_spacing(self) -> float:
        return TWO_PI / self.length

    def nodes(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    def dual(self) -> "Grid1D":
        """Frequency grid of the centered unitary transform, ascending order."""
        d = self.dual_spacing
        return Grid1D(self.n, -0.5 * self.n * d, d)

    def is_centered(self, tol: float = 1e-9) -> bool:
        return abs(self.x_min + 0.5 * self.length) <= tol * max(1.0, abs(self.length))

    def require_centered(self) -> None:
        if not self.is_centered():
            raise ConfigurationError(
                f"grid must be symmetric about 0 (x_min = -n*dx/2), got "
                f"x_min={self.x_min}, n*dx/2={0.5 * self.length}"
            )

    def matches(self, other: "Grid1D", tol: float = 1e-9) -> bool:
        """Equality up to floating-point noise in the spacings."""
        scale = max(1.0, abs(self.length))
        return (
            self.n == other.n
            and abs(self.x_min - other.x_min) <= tol * scale
            and abs(self.dx - other.dx) <= tol * max(1.0, self.dx)
        )


def _require_matching(g1: Grid1D, g2: Grid1D, what: str) -> None:
    if not g1.matches(g2):
        raise ConfigurationError(f"{what}: grids do not match ({g1} vs {g2})")


@dataclass
class SampledFunction1D:
    """Complex samples of a function on a Grid1D."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n,):
            raise ConfigurationError(
                f"values shape {v.shape} does not match grid size {self.grid.n}"
            )
        self.values = v

    def copy(self) -> "SampledFunction1D":
        return SampledFunction1D(self.grid, self.values.copy())

    def norm(self) -> float:
        """L2 norm with the grid measure, sqrt(dx * sum |f|^2)."""
        return float(np.sqrt(self.grid.dx * np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "SampledFunction1D") -> complex:
        """<f, g> = dx * sum f * conj(g); linear in the first slot."""
        _require_matching(self.grid, other.grid, "inner product")
        return complex(self.grid.dx * np.sum(self.values * np.conj(other.values)))


@dataclass
class PhaseFunction2D:
    """Complex samples on a tensor grid; axis 0 is x, axis 1 is p."""

    grid_x: Grid1D
    grid_p: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid_x.n, self.grid_p.n):
            raise ConfigurationError(
                f"values shape {v.shape} does not match grids "
                f"({self.grid_x.n}, {self.grid_p.n})"
            )
        self.values = v

    @property
    def weight(self) -> float:
        return self.grid_x.dx * self.grid_p.dx

    def copy(self) -> "PhaseFunction2D":
        return PhaseFunction2D(self.grid_x, self.grid_p, self.values.copy())

    def norm(self) -> float:
        return float(np.sqrt(self.weight * np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "PhaseFunction2D") -> complex:
        _require_matching(self.grid_x, other.grid_x, "inner product (x axis)")
        _require_matching(self.grid_p, other.grid_p, "inner product (p axis)")
        return complex(self.weight * np.sum(self.values * np.conj(other.values)))


# --- bare centered DFT helpers -------------------------------------------
#
# _centered_fft computes sum_j e^{-i xi_m x_j} v_j for centered node and
# frequency orderings (no measure factor); _centered_ifft is its exact
# inverse including the 1/N.  Together they form an exactly unitary pair,
# which is what keeps every propagator in this package norm-preserving to
# rounding.


def _centered_fft(values: np.ndarray, axis: int = -1) -> np.ndarray:
    v = np.fft.ifftshift(values, axes=axis)
    v = _sfft.fft(v, axis=axis, workers=fft_workers())
    return np.fft.fftshift(v, axes=axis)


def _centered_ifft(values: np.ndarray, axis: int = -1) -> np.ndarray:
    v = np.fft.ifftshift(values, axes=axis)
    v = _sfft.ifft(v, axis=axis, workers=fft_workers())
    return np.fft.fftshift(v, axes=axis)


def fourier_1d(f: SampledFunction1D, direction: str = "forward") -> SampledFunction1D:
    """Unitary Fourier transform onto the dual grid.

    Forward: (2*pi)**-0.5 * integral e^{-i xi x} f(x) dx, sampled on
    f.grid.dual().  Inverse uses e^{+i x xi} and likewise lands on the dual
    grid, so inverse(forward(f)) recovers f on (a float-identical copy of)
    the original grid.
    """
    f.grid.require_centered()
    if direction == "forward":
        out = (f.grid.dx / SQRT_TWO_PI) * _centered_fft(f.values)
    elif direction == "inverse":
        out = (f.grid.length / SQRT_TWO_PI) * _centered_ifft(f.values)
    else:
        raise ConfigurationError(f"direction must be forward or inverse, got {direction!r}")
    return SampledFunction1D(f.grid.dual(), out)


_AXES = {"x": 0, "p": 1}


def partial_fourier(
    F: PhaseFunction2D, axis: str = "p", direction: str = "forward"
) -> PhaseFunction2D:
    """Unitary Fourier transform along one axis of a PhaseFunction2D."""
    try:
        ax = _AXES[axis]
    except KeyError:
        raise ConfigurationError(f"axis must be 'x' or 'p', got {axis!r}") from None
    grid = F.grid_x if ax == 0 else F.grid_p
    grid.require_centered()
    if direction == "forward":
        out = (grid.dx / SQRT_TWO_PI) * _centered_fft(F.values, axis=ax)
    elif direction == "inverse":
        out = (grid.length / SQRT_TWO_PI) * _centered_ifft(F.values, axis=ax)
    else:
        raise ConfigurationError(f"direction must be forward or inverse, got {direction!r}")
    if ax == 0:
        return PhaseFunction2D(grid.dual(), F.grid_p, out)
    return PhaseFunction2D(F.grid_x, grid.dual(), out)


def tensor_outer(f: SampledFunction1D, g: SampledFunction1D) -> PhaseFunction2D:
    """Product function F(x, p) = f(x) * g(p) on the tensor grid."""
    return PhaseFunction2D(f.grid, g.grid, np.outer(f.values, g.values))


def conjugate(f: SampledFunction1D) -> SampledFunction1D:
    return SampledFunction1D(f.grid, np.conj(f.values))
