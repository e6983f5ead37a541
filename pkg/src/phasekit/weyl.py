"""Operator kernels, phase-space symbols, and star products.

An operator on a periodic position grid is stored as its integral kernel:
(A psi)(x_j) = dx * sum_k K[j, k] psi(x_k), so a discrete delta spike of
height 1/dx plays the role the identity's kernel plays off the grid.  The
symbol of a kernel lives on the grid crossed with its Fourier dual and is
computed separation by separation: each diagonal of the kernel is recentred
onto integer grid points with a half-sample spectral shift and then
transformed in the separation variable.  Every step is a permutation, an
FFT, or a unit-modulus multiply, so kernel_to_symbol and symbol_to_kernel
invert each other to machine precision on arbitrary data.

The star product composes kernels: a * b = kernel_to_symbol of the composed
operator.  A brute-force phase-space quadrature (symplectic Fourier
transform followed by a twisted convolution) exists solely to certify the
kernel route on small grids; it discretizes the continuum integral with no
periodic wrapping, so its agreement with the torus-exact kernel route is a
genuine two-route check.

Symbols of unbounded operators (position, momentum, oscillator energy) wrap
around the box edge when rendered on the grid, so they carry their
polynomial coefficients alongside the rendered values.  Products of two
tagged symbols are computed on the coefficients by the finite derivative
series, which keeps identities like the canonical commutator exact instead
of polluted by the edge wrap.  Tagged symbols quantize through the
symmetric-ordering expansion of x^i into operator words, matching the
kernel route wherever both are valid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .grid import (
    ConfigurationError,
    Grid1D,
    PhaseFunction2D,
    SampledFunction1D,
    SQRT_TWO_PI,
    TWO_PI,
    _centered_fft,
    _centered_ifft,
)
from .metaplectic import propagate
from .symplectic import THETA_WIGNER
from .wigner import Theta, wigner_fractional

__all__ = [
    "OperatorKernel",
    "Symbol2D",
    "ExpectationResult",
    "kernel_to_symbol",
    "symbol_to_kernel",
    "fractional_symbol",
    "theta_symbol",
    "moyal_product",
    "theta_product",
    "expectation",
    "polynomial_symbol",
    "symbol_x",
    "symbol_xi",
    "symbol_oscillator",
    "mccoy_kernel",
]

QUADRATURE_MAX_N = 32
POLY_MAX_DEGREE = 4
SELF_ADJOINT_TOL = 1.0e-8


# --------------------------------------------------------------------------
# containers


@dataclass(frozen=True)
class OperatorKernel:
    """Integral kernel K of an operator acting as (A psi)(x) = dx * K @ psi."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n, self.grid.n):
            raise ConfigurationError(
                f"kernel shape {vals.shape} does not match grid size {self.grid.n}"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def identity(cls, grid: Grid1D) -> "OperatorKernel":
        return cls(grid, np.eye(grid.n, dtype=np.complex128) / grid.dx)

    def apply(self, state: SampledFunction1D) -> SampledFunction1D:
        if not state.grid.matches(self.grid):
            raise ConfigurationError("state grid does not match kernel grid")
        return SampledFunction1D(self.grid, self.grid.dx * (self.values @ state.values))

    def adjoint(self) -> "OperatorKernel":
        return OperatorKernel(self.grid, np.conj(self.values.T))

    def transpose(self) -> "OperatorKernel":
        return OperatorKernel(self.grid, self.values.T.copy())

    def compose(self, other: "OperatorKernel") -> "OperatorKernel":
        if not other.grid.matches(self.grid):
            raise ConfigurationError("cannot compose kernels on different grids")
        return OperatorKernel(self.grid, self.grid.dx * (self.values @ other.values))

    def self_adjoint_defect(self) -> float:
        return float(np.abs(self.values - np.conj(self.values.T)).max())


@dataclass(frozen=True)
class Symbol2D:
    """Phase-space symbol sampled on grid_x x grid_xi.

    poly, when present, holds the coefficient matrix c[i, j] of
    sum c[i, j] x**i xi**j that the values render; it marks symbols of
    polynomial growth whose grid rendering wraps at the box edge.
    """

    grid_x: Grid1D
    grid_xi: Grid1D
    values: np.ndarray
    poly: np.ndarray | None = None

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid_x.n, self.grid_xi.n):
            raise ConfigurationError(
                f"symbol shape {vals.shape} does not match grids "
                f"({self.grid_x.n}, {self.grid_xi.n})"
            )
        object.__setattr__(self, "values", vals)
        if self.poly is not None:
            coeffs = np.ascontiguousarray(self.poly, dtype=np.complex128)
            if coeffs.ndim != 2:
                raise ConfigurationError("polynomial coefficients must be a 2D matrix")
            object.__setattr__(self, "poly", coeffs)

    @property
    def weight(self) -> float:
        return self.grid_x.dx * self.grid_xi.dx

    def as_phase_function(self) -> PhaseFunction2D:
        return PhaseFunction2D(self.grid_x, self.grid_xi, self.values)


@dataclass(frozen=True)
class ExpectationResult:
    """Expectation of an operator in a state, computed along two routes."""

    value: complex
    phase_value: complex
    residual: float
    self_adjoint: bool
    adjoint_value: complex | None = None


# --------------------------------------------------------------------------
# kernel <-> symbol, exact on the discrete torus


def _require_dual_pair(grid_x: Grid1D, grid_xi: Grid1D) -> None:
    expected = grid_x.dual()
    if not grid_xi.matches(expected):
        raise ConfigurationError(
            "symbol frequency grid is not the Fourier dual of its position grid"
        )


def kernel_to_symbol(kernel: OperatorKernel) -> Symbol2D:
    """Symbol a(x, xi) of a kernel; exact inverse of symbol_to_kernel.

    Walks the kernel diagonal by diagonal: the separation-s diagonal holds
    samples at midpoints x_v + s*dx/2, which a half-sample spectral shift
    recentres onto x_v; the transform over separations then lands on the
    dual grid with the dx quadrature weight.
    """
    grid = kernel.grid
    grid.require_centered()
    n = grid.n
    dy = grid.dx
    K = kernel.values
    v = np.arange(n)
    modes = np.fft.fftfreq(n) * n
    gmat = np.empty((n, n), dtype=np.complex128)
    for col, s in enumerate(v - n // 2):
        diag = K[(v + s) % n, v]
        shift = np.exp(-2j * np.pi * modes * (s / 2.0) / n)
        gmat[:, col] = np.fft.ifft(np.fft.fft(diag) * shift)
    values = dy * _centered_fft(gmat, axis=1)
    return Symbol2D(grid, grid.dual(), values)


def symbol_to_kernel(symbol: Symbol2D) -> OperatorKernel:
    """Kernel of a symbol; runs kernel_to_symbol backwards step by step."""
    _require_dual_pair(symbol.grid_x, symbol.grid_xi)
    grid = symbol.grid_x
    grid.require_centered()
    n = grid.n
    dy = grid.dx
    v = np.arange(n)
    modes = np.fft.fftfreq(n) * n
    gmat = _centered_ifft(symbol.values, axis=1) / dy
    K = np.empty((n, n), dtype=np.complex128)
    for col, s in enumerate(v - n // 2):
        shift = np.exp(+2j * np.pi * modes * (s / 2.0) / n)
        K[(v + s) % n, v] = np.fft.ifft(np.fft.fft(gmat[:, col]) * shift)
    return OperatorKernel(grid, K)


def fractional_symbol(kernel: OperatorKernel, theta: Theta | float) -> Symbol2D:
    """Angle-theta symbol straight from the kernel.

    Inverse Fourier transform of the kernel in its second argument, then the
    phase-plane propagator at theta, scaled by sqrt(2*pi).  At the special
    angle this reproduces kernel_to_symbol up to resampling error; at other
    angles it provides an independent route to theta_symbol.
    """
    theta = theta if isinstance(theta, Theta) else Theta(float(theta))
    grid = kernel.grid
    grid.require_centered()
    seed = (grid.length / SQRT_TWO_PI) * _centered_ifft(kernel.values, axis=1)
    field = PhaseFunction2D(grid, grid.dual(), seed)
    out = propagate(field, theta.value)
    return Symbol2D(out.grid_x, out.grid_p, SQRT_TWO_PI * out.values)


def theta_symbol(symbol: Symbol2D, theta: Theta | float) -> Symbol2D:
    """Map a symbol from the standard angle to angle theta.

    At theta equal to the standard angle the input values are returned
    bit for bit.  Polynomial tags do not survive the flow (the propagator
    does not map polynomials to polynomials), so the output carries the
    tag only in the identity case.
    """
    theta = theta if isinstance(theta, Theta) else Theta(float(theta))
    if theta.value == THETA_WIGNER:
        poly = None if symbol.poly is None else symbol.poly.copy()
        return Symbol2D(symbol.grid_x, symbol.grid_xi, symbol.values.copy(), poly)
    _require_decaying(symbol)
    out = propagate(symbol.as_phase_function(), theta.value - THETA_WIGNER)
    return Symbol2D(out.grid_x, out.grid_p, out.values)


def _require_decaying(symbol: Symbol2D) -> None:
    """Refuse to push a polynomial symbol through the propagator.

    Polynomial symbols carry their mass out to the box edge, so the shear
    factorization wraps it around and the transported values are noise.
    Failing here turns that into a visible error instead.
    """
    if symbol.poly is not None:
        raise ConfigurationError(
            "polynomial symbols cannot be transported to another angle "
            "numerically (no decay at the box edge); work at the standard "
            "angle, where the algebraic product is exact"
        )


def _to_standard_angle(symbol: Symbol2D, theta: Theta) -> Symbol2D:
    if theta.value == THETA_WIGNER:
        return symbol
    _require_decaying(symbol)
    out = propagate(symbol.as_phase_function(), THETA_WIGNER - theta.value)
    return Symbol2D(out.grid_x, out.grid_p, out.values)


# --------------------------------------------------------------------------
# polynomial symbols


def _poly_trim(coeffs: np.ndarray) -> np.ndarray:
    rows = np.nonzero(np.abs(coeffs).sum(axis=1))[0]
    cols = np.nonzero(np.abs(coeffs).sum(axis=0))[0]
    if rows.size == 0 or cols.size == 0:
        return np.zeros((1, 1), dtype=np.complex128)
    return coeffs[: rows[-1] + 1, : cols[-1] + 1]


def _poly_deriv(coeffs: np.ndarray, axis: int) -> np.ndarray:
    if coeffs.shape[axis] == 1:
        return np.zeros((1, 1), dtype=np.complex128)
    if axis == 0:
        factors = np.arange(1, coeffs.shape[0], dtype=np.complex128)
        return coeffs[1:, :] * factors[:, None]
    factors = np.arange(1, coeffs.shape[1], dtype=np.complex128)
    return coeffs[:, 1:] * factors[None, :]


def _poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1),
                   dtype=np.complex128)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j] != 0:
                out[i : i + b.shape[0], j : j + b.shape[1]] += a[i, j] * b
    return out


def _poly_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    rows = max(a.shape[0], b.shape[0])
    cols = max(a.shape[1], b.shape[1])
    out = np.zeros((rows, cols), dtype=np.complex128)
    out[: a.shape[0], : a.shape[1]] += a
    out[: b.shape[0], : b.shape[1]] += b
    return out


def _moyal_poly(ca: np.ndarray, cb: np.ndarray) -> np.ndarray:
    """Finite derivative series for the star product of two polynomials."""
    out = np.zeros((1, 1), dtype=np.complex128)
    k = 0
    while True:
        term = np.zeros((1, 1), dtype=np.complex128)
        nonzero = False
        for r in range(k + 1):
            da = ca
            for _ in range(k - r):
                da = _poly_deriv(da, 0)
            for _ in range(r):
                da = _poly_deriv(da, 1)
            db = cb
            for _ in range(r):
                db = _poly_deriv(db, 0)
            for _ in range(k - r):
                db = _poly_deriv(db, 1)
            if not np.any(da) or not np.any(db):
                continue
            nonzero = True
            piece = _poly_mul(da, db) * ((-1.0) ** r * math.comb(k, r))
            term = _poly_add(term, piece)
        if k > 0 and not nonzero:
            break
        out = _poly_add(out, term * ((0.5j) ** k / math.factorial(k)))
        k += 1
    return _poly_trim(out)


def polynomial_symbol(
    coeffs: np.ndarray, grid_x: Grid1D, grid_xi: Grid1D | None = None
) -> Symbol2D:
    """Symbol with declared polynomial growth, rendered on the grid pair."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.complex128))
    if coeffs.shape[0] - 1 > POLY_MAX_DEGREE or coeffs.shape[1] - 1 > POLY_MAX_DEGREE:
        raise ConfigurationError(
            f"polynomial symbol degree exceeds {POLY_MAX_DEGREE} per variable"
        )
    if grid_xi is None:
        grid_xi = grid_x.dual()
    values = npoly.polygrid2d(grid_x.nodes(), grid_xi.nodes(), coeffs)
    return Symbol2D(grid_x, grid_xi, values.astype(np.complex128), coeffs)


def symbol_x(grid: Grid1D) -> Symbol2D:
    return polynomial_symbol(np.array([[0.0], [1.0]]), grid)


def symbol_xi(grid: Grid1D) -> Symbol2D:
    return polynomial_symbol(np.array([[0.0, 1.0]]), grid)


def symbol_oscillator(grid: Grid1D) -> Symbol2D:
    coeffs = np.zeros((3, 3))
    coeffs[2, 0] = 0.5
    coeffs[0, 2] = 0.5
    return polynomial_symbol(coeffs, grid)


def _derivative_matrix(grid: Grid1D) -> np.ndarray:
    eye = np.eye(grid.n, dtype=np.complex128)
    forward = _centered_fft(eye, axis=0)
    return _centered_ifft(grid.dual().nodes()[:, None] * forward, axis=0)


def mccoy_kernel(symbol: Symbol2D) -> OperatorKernel:
    """Quantize a polynomial-tagged symbol by symmetric-ordering expansion.

    Each monomial x^i xi^j becomes 2^{-i} sum_r C(i, r) X^r D^j X^{i-r}
    with X the position multiplier and D the spectral derivative matrix.
    """
    if symbol.poly is None:
        raise ConfigurationError("mccoy_kernel requires a polynomial-tagged symbol")
    _require_dual_pair(symbol.grid_x, symbol.grid_xi)
    grid = symbol.grid_x
    coeffs = symbol.poly
    xpow = [np.eye(grid.n, dtype=np.complex128)]
    for _ in range(coeffs.shape[0] - 1):
        xpow.append(xpow[-1] * grid.nodes()[None, :])  # right-multiply by diag(x)
    dmat = _derivative_matrix(grid)
    dpow = [np.eye(grid.n, dtype=np.complex128)]
    for _ in range(coeffs.shape[1] - 1):
        dpow.append(dpow[-1] @ dmat)
    total = np.zeros((grid.n, grid.n), dtype=np.complex128)
    for i in range(coeffs.shape[0]):
        for j in range(coeffs.shape[1]):
            c = coeffs[i, j]
            if c == 0:
                continue
            word = np.zeros((grid.n, grid.n), dtype=np.complex128)
            for r in range(i + 1):
                word += math.comb(i, r) * (xpow[r] @ dpow[j] @ xpow[i - r])
            total += c * (0.5**i) * word
    return OperatorKernel(grid, total / grid.dx)


# --------------------------------------------------------------------------
# star products


def _require_common_grids(a: Symbol2D, b: Symbol2D) -> None:
    if not (a.grid_x.matches(b.grid_x) and a.grid_xi.matches(b.grid_xi)):
        raise ConfigurationError("star product requires symbols on common grids")


def _symplectic_fourier(values: np.ndarray, grid_x: Grid1D, grid_xi: Grid1D) -> np.ndarray:
    """Self-inverse phase-space transform pairing x with the second frequency axis."""
    n = grid_x.n
    step1 = _centered_fft(values, axis=0)
    step2 = n * _centered_ifft(step1, axis=1)
    return (grid_x.dx * grid_xi.dx / TWO_PI) * step2.T


def _twisted_convolution(
    A: np.ndarray, B: np.ndarray, grid_x: Grid1D, grid_xi: Grid1D
) -> np.ndarray:
    """Half-phase-weighted convolution; no wrapping, zero outside the box."""
    n = grid_x.n
    xn = grid_x.nodes()
    xin = grid_xi.nodes()
    pad = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    half = n // 2
    pad[half : half + n, half : half + n] = B
    left = np.exp(+0.5j * np.outer(xn, xin))
    right = np.exp(-0.5j * np.outer(xn, xin))
    out = np.empty((n, n), dtype=np.complex128)
    for jp in range(n):
        rows = pad[jp + 1 : jp + 1 + n][::-1]
        for mp in range(n):
            window = rows[:, mp + 1 : mp + 1 + n][:, ::-1]
            out[jp, mp] = np.sum(A * np.outer(right[:, mp], left[jp, :]) * window)
    return (grid_x.dx * grid_xi.dx / TWO_PI) * out


def _moyal_quadrature(a: Symbol2D, b: Symbol2D) -> np.ndarray:
    if a.grid_x.n > QUADRATURE_MAX_N or a.grid_xi.n > QUADRATURE_MAX_N:
        raise ConfigurationError(
            f"quadrature star product is limited to grids of at most "
            f"{QUADRATURE_MAX_N} points per axis"
        )
    Fa = _symplectic_fourier(a.values, a.grid_x, a.grid_xi)
    Fb = _symplectic_fourier(b.values, b.grid_x, b.grid_xi)
    C = _twisted_convolution(Fa, Fb, a.grid_x, a.grid_xi)
    return _symplectic_fourier(C, a.grid_x, a.grid_xi)


def moyal_product(a: Symbol2D, b: Symbol2D, method: str | None = None) -> Symbol2D:
    """Star product of two symbols at the standard angle.

    method None picks the coefficient series when both symbols carry
    polynomial tags and the kernel route otherwise.  "kernel" composes the
    operators behind the symbols (exact on the grid).  "quadrature" runs the
    brute-force phase-space integral on small grids to certify the kernel
    route; it ignores polynomial tags.
    """
    _require_common_grids(a, b)
    if method is None:
        method = "algebraic" if (a.poly is not None and b.poly is not None) else "kernel"
    if method == "algebraic":
        if a.poly is None or b.poly is None:
            raise ConfigurationError(
                "algebraic star product requires polynomial tags on both symbols"
            )
        coeffs = _moyal_poly(a.poly, b.poly)
        values = npoly.polygrid2d(a.grid_x.nodes(), a.grid_xi.nodes(), coeffs)
        return Symbol2D(a.grid_x, a.grid_xi, values.astype(np.complex128), coeffs)
    if method == "kernel":
        ka = symbol_to_kernel(a)
        kb = symbol_to_kernel(b)
        return kernel_to_symbol(ka.compose(kb))
    if method == "quadrature":
        return Symbol2D(a.grid_x, a.grid_xi, _moyal_quadrature(a, b))
    raise ConfigurationError(f"unknown star product method {method!r}")


def theta_product(
    a: Symbol2D, b: Symbol2D, theta: Theta | float, method: str | None = None
) -> Symbol2D:
    """Star product of two angle-theta symbols, returned at the same angle.

    Pulls both factors back to the standard angle, multiplies there, and
    pushes the result forward.  At the standard angle itself the pullback
    is skipped entirely, so the result is identical to moyal_product.
    """
    theta = theta if isinstance(theta, Theta) else Theta(float(theta))
    _require_common_grids(a, b)
    if theta.value == THETA_WIGNER:
        return moyal_product(a, b, method=method)
    base = moyal_product(_to_standard_angle(a, theta), _to_standard_angle(b, theta),
                         method=method)
    out = propagate(base.as_phase_function(), theta.value - THETA_WIGNER)
    return Symbol2D(out.grid_x, out.grid_p, out.values)


# --------------------------------------------------------------------------
# expectation values


def _operator_kernel(op: OperatorKernel | Symbol2D) -> OperatorKernel:
    if isinstance(op, OperatorKernel):
        return op
    if isinstance(op, Symbol2D):
        if op.poly is not None:
            return mccoy_kernel(op)
        return symbol_to_kernel(op)
    raise ConfigurationError(f"expected OperatorKernel or Symbol2D, got {type(op)!r}")


def expectation(
    op: OperatorKernel | Symbol2D,
    state: SampledFunction1D,
    theta: Theta | float = THETA_WIGNER,
) -> ExpectationResult:
    """Expectation of an operator in a state, with a phase-space cross-check.

    The reference value is the kernel action (A psi, psi).  The cross-check
    pairs the angle-theta symbol of the adjoint operator, conjugated,
    against the angle-theta phase-space distribution of the state; by
    unitarity of the angle flow the pairing is independent of theta.  A
    kernel that is not conj-symmetric within SELF_ADJOINT_TOL triggers a
    warning and the result also reports (psi, A psi).
    """
    theta = theta if isinstance(theta, Theta) else Theta(float(theta))
    kernel = _operator_kernel(op)
    if not state.grid.matches(kernel.grid):
        raise ConfigurationError("state grid does not match operator grid")
    applied = kernel.apply(state)
    value = applied.inner(state)
    defect = kernel.self_adjoint_defect()
    scale = max(1.0, float(np.abs(kernel.values).max()))
    self_adjoint = defect <= SELF_ADJOINT_TOL * scale
    adjoint_value = None
    if not self_adjoint:
        warnings.warn(
            f"kernel deviates from self-adjointness by {defect:.3e}; "
            "reporting both pairings",
            stacklevel=2,
        )
        adjoint_value = state.inner(kernel.adjoint().apply(state))
    adj_symbol = kernel_to_symbol(kernel.adjoint())
    b_theta = theta_symbol(adj_symbol, theta)
    dist = wigner_fractional(state, state, theta)
    phase_value = complex(
        np.sum(np.conj(b_theta.values) * dist.values) * b_theta.weight
    )
    residual = abs(value - phase_value) / max(1.0, abs(value))
    return ExpectationResult(
        value=complex(value),
        phase_value=phase_value,
        residual=float(residual),
        self_adjoint=bool(self_adjoint),
        adjoint_value=None if adjoint_value is None else complex(adjoint_value),
    )
