"""Phase-space operator representations and the two-picture test harness.

An operator on states extends to phase-space functions by letting its kernel
act along the position axis only, with the momentum coordinate riding along
as a spectator.  Conjugating that extension by the angle-THETA_WIGNER
propagator produces the phase-plane operators generated by x + (i/2) d/dp
and p - (i/2) d/dx; for polynomial symbols that conjugated operator can
also be built directly as a symmetric-ordered word in the two generators,
which gives an independent second route.

The zero-angle analysis transform psi -> psi (x) conj(FT window) carries the
state picture into the extended picture, so the angle-THETA_WIGNER windowed
transform carries it into the conjugated one.  Spectra and dynamics must
therefore agree across pictures, and this module assembles the dense
matrices needed to check that at desk scale: an eigenvalue report with
degeneracy clusters paired against the 1D spectrum, and a side-by-side
evolution of the same initial data in both pictures.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .grid import (
    ConfigurationError,
    Grid1D,
    PhaseFunction2D,
    SampledFunction1D,
    _centered_fft,
    _centered_ifft,
)
from .metaplectic import _propagate_values, propagate
from .symplectic import THETA_WIGNER
from .weyl import (
    OperatorKernel,
    SELF_ADJOINT_TOL,
    Symbol2D,
    _operator_kernel,
    _require_dual_pair,
)
from .wigner import Theta, Window, windowed_adjoint, windowed_transform

__all__ = [
    "PhaseOperator",
    "SpectralReport",
    "EvolutionResult",
    "apply_extended",
    "apply_bopp",
    "intertwiner",
    "intertwiner_adjoint",
    "bopp_intertwining_residual",
    "dense_matrix",
    "bopp_spectrum",
    "evolve_pair",
]

REPRESENTATIONS = ("extended", "bopp_conjugated", "bopp_direct")
DENSE_MAX_N = 64
DENSE_STATE_MAX_N = 256
ZERO_PUSHFORWARD_TOL = 1.0e-10
PAIRING_GAP = 1.0e-4
_RESIDUAL_FLOOR = 1.0e-12
_CN_SOLVE_RTOL = 1.0e-12


# --------------------------------------------------------------------------
# containers


@dataclass(frozen=True)
class PhaseOperator:
    """A 1D symbol together with the phase-plane realization to use for it.

    extended         kernel along x, momentum as spectator
    bopp_conjugated  extended action conjugated by the angle-THETA_WIGNER flow
    bopp_direct      symmetric-ordered word in x + (i/2) d/dp and
                     p - (i/2) d/dx (polynomial-tagged symbols only)
    """

    symbol: Symbol2D
    representation: str = "bopp_conjugated"

    def __post_init__(self) -> None:
        if self.representation not in REPRESENTATIONS:
            raise ConfigurationError(
                f"representation must be one of {REPRESENTATIONS}, "
                f"got {self.representation!r}"
            )
        if self.representation == "bopp_direct" and self.symbol.poly is None:
            raise ConfigurationError(
                "bopp_direct requires a polynomial-tagged symbol"
            )

    def kernel(self) -> OperatorKernel:
        return _operator_kernel(self.symbol)

    def apply(self, phase: PhaseFunction2D) -> PhaseFunction2D:
        if self.representation == "extended":
            return apply_extended(self, phase)
        return apply_bopp(self, phase)


@dataclass(frozen=True)
class SpectralReport:
    """Clustered low spectrum of a phase-plane operator, checked against 1D.

    eigenvalues hold one representative per degeneracy cluster (ascending),
    multiplicities the cluster sizes, residuals the worst member residual
    ||M v - lambda v|| / ||v|| against the assembled matrix.  pairing maps
    cluster index -> index into reference_eigenvalues (the 1D spectrum);
    clusters with no 1D partner within gap are absent from the map.
    pushforward_residuals measure how well the lifted 1D eigenvector is an
    eigenvector of the phase-plane matrix; lifts with norm below
    ZERO_PUSHFORWARD_TOL are listed in pushforward_skipped and get nan.
    """

    eigenvalues: np.ndarray
    multiplicities: np.ndarray
    residuals: np.ndarray
    pairing: dict[int, int]
    reference_eigenvalues: np.ndarray
    pushforward_residuals: np.ndarray
    pushforward_skipped: tuple[int, ...]
    gap: float


@dataclass(frozen=True)
class EvolutionResult:
    """Outcome of evolving the same data in the state and phase pictures.

    divergence is the largest checkpoint value of ||Phi - W psi|| / ||Phi||;
    norm drifts are per unit time, measured against the initial norms.
    """

    state: SampledFunction1D
    phase: PhaseFunction2D
    divergence: float
    state_norm_drift: float
    phase_norm_drift: float
    times: np.ndarray
    divergences: np.ndarray


# --------------------------------------------------------------------------
# applying the three realizations


def apply_extended(op: PhaseOperator, phase: PhaseFunction2D) -> PhaseFunction2D:
    """Kernel action along the position axis, one momentum column at a time."""
    kernel = op.kernel()
    if not phase.grid_x.matches(kernel.grid):
        raise ConfigurationError(
            "phase function's position grid does not match the operator grid"
        )
    values = kernel.grid.dx * (kernel.values @ phase.values)
    return PhaseFunction2D(phase.grid_x, phase.grid_p, values)


def _position_action(values: np.ndarray, grid_x: Grid1D, grid_p: Grid1D) -> np.ndarray:
    """x + (i/2) d/dp on raw value arrays (batchable over leading axes)."""
    out = grid_x.nodes()[:, None] * values
    spec = _centered_fft(values, axis=-1)
    spec *= -0.5 * grid_p.dual().nodes()
    return out + _centered_ifft(spec, axis=-1)


def _momentum_action(values: np.ndarray, grid_x: Grid1D, grid_p: Grid1D) -> np.ndarray:
    """p - (i/2) d/dx on raw value arrays (batchable over leading axes)."""
    out = grid_p.nodes() * values
    spec = _centered_fft(values, axis=-2)
    spec *= 0.5 * grid_x.dual().nodes()[:, None]
    return out + _centered_ifft(spec, axis=-2)


def _direct_action(
    coeffs: np.ndarray, values: np.ndarray, grid_x: Grid1D, grid_p: Grid1D
) -> np.ndarray:
    """Symmetric-ordered polynomial in the two phase-plane generators.

    Mirrors the 1D quantization word for word: x^i xi^j becomes
    2^{-i} sum_r C(i, r) X^r P^j X^{i-r} with X and P the phase-plane
    generators, applied right to left.
    """
    total = np.zeros_like(values, dtype=np.complex128)
    for i in range(coeffs.shape[0]):
        for j in range(coeffs.shape[1]):
            c = coeffs[i, j]
            if c == 0:
                continue
            word = np.zeros_like(total)
            for r in range(i + 1):
                term = np.asarray(values, dtype=np.complex128)
                for _ in range(i - r):
                    term = _position_action(term, grid_x, grid_p)
                for _ in range(j):
                    term = _momentum_action(term, grid_x, grid_p)
                for _ in range(r):
                    term = _position_action(term, grid_x, grid_p)
                word += math.comb(i, r) * term
            total += c * 0.5**i * word
    return total


def apply_bopp(op: PhaseOperator, phase: PhaseFunction2D) -> PhaseFunction2D:
    """Phase-plane action of the operator in its Bopp realization.

    bopp_direct applies the generator word; every other representation goes
    through the conjugation route: flow back by THETA_WIGNER, act along the
    position axis, flow forward again.
    """
    if op.representation == "bopp_direct":
        if not phase.grid_x.matches(op.symbol.grid_x):
            raise ConfigurationError(
                "phase function's position grid does not match the operator grid"
            )
        values = _direct_action(
            op.symbol.poly, phase.values, phase.grid_x, phase.grid_p
        )
        return PhaseFunction2D(phase.grid_x, phase.grid_p, values)
    down = propagate(phase, -THETA_WIGNER)
    return propagate(apply_extended(op, down), THETA_WIGNER)


# --------------------------------------------------------------------------
# intertwiners


def intertwiner(psi: SampledFunction1D, window: Window) -> PhaseFunction2D:
    """Tensor lift psi (x) conj(FT window), the zero-angle analysis map.

    Delegates to the windowed transform at angle zero, which realizes the
    tensor product bitwise; the extended action on a lift is the lift of the
    1D action.
    """
    return windowed_transform(psi, window, Theta(0.0))


def intertwiner_adjoint(phase: PhaseFunction2D, window: Window) -> SampledFunction1D:
    """Adjoint of the tensor lift: contract against the window transform."""
    return windowed_adjoint(phase, window, Theta(0.0))


def _lift_angle(representation: str) -> Theta:
    """Analysis angle whose lift intertwines with the given realization."""
    return Theta(0.0) if representation == "extended" else Theta.wigner()


def bopp_intertwining_residual(
    symbol: Symbol2D,
    psi: SampledFunction1D,
    window: Window,
    representation: str = "bopp_conjugated",
) -> float:
    """Relative defect of carrying the 1D action through the windowed lift.

    Compares the phase-plane action on the lift of psi with the lift of the
    1D kernel action on psi, using the lift that matches the representation
    (zero angle for extended, THETA_WIGNER for the Bopp realizations).  When
    the lifted reference is numerically zero the absolute defect is returned
    instead, with a warning.
    """
    op = PhaseOperator(symbol, representation)
    kernel = op.kernel()
    if not psi.grid.matches(kernel.grid):
        raise ConfigurationError("state grid does not match the operator grid")
    angle = _lift_angle(representation)
    lifted = windowed_transform(kernel.apply(psi), window, angle)
    pushed = op.apply(windowed_transform(psi, window, angle))
    defect = PhaseFunction2D(
        lifted.grid_x, lifted.grid_p, pushed.values - lifted.values
    ).norm()
    scale = lifted.norm()
    if scale <= _RESIDUAL_FLOOR * max(1.0, psi.norm()):
        warnings.warn(
            "lifted reference is numerically zero; returning the absolute "
            "intertwining defect",
            stacklevel=2,
        )
        return float(defect)
    return float(defect / scale)


# --------------------------------------------------------------------------
# dense assembly and spectra


def dense_matrix(op: PhaseOperator, chunk: int = 512) -> np.ndarray:
    """Assemble the phase-plane operator as a dense matrix.

    The phase plane is the symbol's position grid crossed with its dual;
    functions are vectorized row-major (position index major).  Columns are
    images of the standard basis, computed in batches, so the matrix is
    exactly the operator that apply() implements.  Capped at DENSE_MAX_N
    points per axis to keep the n^2 x n^2 result at desk scale.
    """
    grid = op.symbol.grid_x
    _require_dual_pair(grid, op.symbol.grid_xi)
    if grid.n > DENSE_MAX_N:
        raise ConfigurationError(
            f"dense assembly is capped at {DENSE_MAX_N} points per axis, "
            f"got {grid.n}"
        )
    grid_p = grid.dual()
    n = grid.n
    if op.representation != "bopp_direct":
        kernel_values = grid.dx * op.kernel().values
    matrix = np.empty((n * n, n * n), dtype=np.complex128)
    for start in range(0, n * n, chunk):
        stop = min(start + chunk, n * n)
        basis = np.zeros((stop - start, n, n), dtype=np.complex128)
        flat = np.arange(start, stop)
        basis[np.arange(stop - start), flat // n, flat % n] = 1.0
        if op.representation == "extended":
            image = np.matmul(kernel_values, basis)
        elif op.representation == "bopp_conjugated":
            image = _propagate_values(basis, grid, grid_p, -THETA_WIGNER)
            image = np.matmul(kernel_values, image)
            image = _propagate_values(image, grid, grid_p, THETA_WIGNER)
        else:
            image = _direct_action(op.symbol.poly, basis, grid, grid_p)
        matrix[:, start:stop] = image.reshape(stop - start, n * n).T
    return matrix


def _require_self_adjoint(kernel: OperatorKernel, what: str) -> None:
    defect = kernel.self_adjoint_defect()
    scale = max(1.0, float(np.abs(kernel.values).max()))
    if defect > SELF_ADJOINT_TOL * scale:
        raise ConfigurationError(
            f"{what} requires a self-adjoint operator; kernel deviates from "
            f"conj-symmetry by {defect:.3e}"
        )


def _reference_spectrum(
    kernel: OperatorKernel,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and unit-norm eigenstates of the symmetrized 1D operator."""
    h = kernel.grid.dx * kernel.values
    h = (h + h.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(h)
    return vals, vecs / math.sqrt(kernel.grid.dx)


def _cluster(values: np.ndarray, gap: float) -> list[slice]:
    """Split an ascending eigenvalue list into gap-separated clusters."""
    if values.size == 0:
        return []
    breaks = np.nonzero(np.diff(values) > gap)[0]
    starts = np.concatenate(([0], breaks + 1))
    stops = np.concatenate((breaks + 1, [values.size]))
    return [slice(int(a), int(b)) for a, b in zip(starts, stops)]


def bopp_spectrum(
    symbol: Symbol2D,
    count: int,
    window: Window,
    representation: str = "bopp_conjugated",
    gap: float = PAIRING_GAP,
) -> SpectralReport:
    """Low spectrum of the phase-plane operator, verified two ways.

    Assembles the operator densely, takes the lowest eigenvalue clusters of
    its symmetrization, and pairs each cluster with the nearest eigenvalue
    of the 1D operator.  For every paired cluster the lifted 1D eigenstate
    is tested as an eigenvector of the assembled matrix (the zero-lift case
    is detected and skipped rather than failed).  Residuals are measured
    against the unsymmetrized assembly, so they also witness how far the
    realization is from self-adjoint.
    """
    if count < 1:
        raise ConfigurationError(f"count must be at least 1, got {count}")
    op = PhaseOperator(symbol, representation)
    kernel = op.kernel()
    _require_self_adjoint(kernel, "the spectral harness")
    grid = kernel.grid
    if not window.grid.matches(grid):
        raise ConfigurationError("window grid does not match the operator grid")
    ref_vals, ref_vecs = _reference_spectrum(kernel)

    matrix = dense_matrix(op)
    sym = (matrix + matrix.conj().T) / 2.0
    total = grid.n * grid.n
    want = min((count + 1) * grid.n, total)
    vals, vecs = scipy.linalg.eigh(sym, subset_by_index=(0, want - 1))
    clusters = _cluster(vals, gap)
    # The last cluster is complete only if the subset solve saw past its
    # upper edge; otherwise fall back to the full spectrum.
    if want < total and len(clusters) <= count:
        vals, vecs = scipy.linalg.eigh(sym)
        clusters = _cluster(vals, gap)
    if len(clusters) < count:
        raise ConfigurationError(
            f"requested {count} eigenvalue clusters but the spectrum has "
            f"only {len(clusters)} at gap {gap:.1e}"
        )
    clusters = clusters[:count]

    eigenvalues = np.array([float(vals[c].mean()) for c in clusters])
    multiplicities = np.array([c.stop - c.start for c in clusters])
    residuals = np.empty(count)
    block = vecs[:, : clusters[-1].stop]
    applied = matrix @ block
    for k, c in enumerate(clusters):
        defect = applied[:, c] - block[:, c] * vals[c]
        residuals[k] = float(
            np.max(np.linalg.norm(defect, axis=0))
        )

    pairing: dict[int, int] = {}
    pushforward = np.full(count, np.nan)
    skipped: list[int] = []
    for k in range(count):
        nearest = int(np.argmin(np.abs(ref_vals - eigenvalues[k])))
        if abs(ref_vals[nearest] - eigenvalues[k]) > gap:
            warnings.warn(
                f"cluster at {eigenvalues[k]:.6f} has no 1D partner within "
                f"{gap:.1e}",
                stacklevel=2,
            )
            continue
        pairing[k] = nearest
        state = SampledFunction1D(grid, ref_vecs[:, nearest])
        lift = windowed_transform(state, window, _lift_angle(representation))
        if lift.norm() < ZERO_PUSHFORWARD_TOL:
            skipped.append(k)
            continue
        vec = lift.values.reshape(-1)
        pushforward[k] = float(
            np.linalg.norm(matrix @ vec - ref_vals[nearest] * vec)
            / np.linalg.norm(vec)
        )
    return SpectralReport(
        eigenvalues=eigenvalues,
        multiplicities=multiplicities,
        residuals=residuals,
        pairing=pairing,
        reference_eigenvalues=ref_vals,
        pushforward_residuals=pushforward,
        pushforward_skipped=tuple(skipped),
        gap=gap,
    )


# --------------------------------------------------------------------------
# paired evolution


def _eigh_propagator(
    hermitian: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(hermitian)
    return vals, vecs


def _evolve_dense(
    hermitian: np.ndarray, start: np.ndarray, times: np.ndarray
) -> np.ndarray:
    """Exact evolution exp(-i t H) start at each requested time (columns)."""
    vals, vecs = _eigh_propagator(hermitian)
    coeffs = vecs.conj().T @ start
    phases = np.exp(-1j * np.outer(vals, times))
    return vecs @ (phases * coeffs[:, None])


def _evolve_crank_nicolson(
    apply_op, start: np.ndarray, times: np.ndarray
) -> np.ndarray:
    """Crank-Nicolson stepping with a matrix-free GMRES solve per step.

    Used when the phase grid is too large to assemble densely; times must be
    uniformly spaced starting at zero.
    """
    steps = times.size - 1
    dt = times[1] - times[0] if steps else 0.0
    dim = start.size

    def forward(v: np.ndarray) -> np.ndarray:
        return v + 0.5j * dt * apply_op(v)

    def backward(v: np.ndarray) -> np.ndarray:
        return v - 0.5j * dt * apply_op(v)

    operator = scipy.sparse.linalg.LinearOperator(
        (dim, dim), matvec=forward, dtype=np.complex128
    )
    out = np.empty((dim, times.size), dtype=np.complex128)
    out[:, 0] = start
    current = start
    for k in range(steps):
        rhs = backward(current)
        current, info = scipy.sparse.linalg.gmres(
            operator, rhs, x0=current, rtol=_CN_SOLVE_RTOL, atol=0.0
        )
        if info != 0:
            raise ConfigurationError(
                f"implicit step {k + 1} did not converge (gmres info {info}); "
                "reduce the step size"
            )
        out[:, k + 1] = current
    return out


def evolve_pair(
    symbol: Symbol2D,
    psi0: SampledFunction1D,
    window: Window,
    t_final: float,
    steps: int,
    representation: str = "bopp_conjugated",
) -> EvolutionResult:
    """Evolve i d/dt = (operator) in both pictures and compare along the way.

    The state picture evolves under the 1D kernel, the phase picture under
    the Bopp realization, both from the same initial state (the phase side
    starts from the windowed lift).  Grids small enough to assemble densely
    use exact eigendecomposition propagation; larger phase grids fall back
    to Crank-Nicolson with the same checkpoint times.  The divergence is
    the worst checkpoint value of ||Phi - W psi|| / ||Phi||.
    """
    if steps < 1:
        raise ConfigurationError(f"steps must be at least 1, got {steps}")
    if t_final < 0:
        raise ConfigurationError(f"t_final must be nonnegative, got {t_final}")
    op = PhaseOperator(symbol, representation)
    kernel = op.kernel()
    _require_self_adjoint(kernel, "paired evolution")
    grid = kernel.grid
    if not psi0.grid.matches(grid):
        raise ConfigurationError("initial state grid does not match the operator")
    times = np.linspace(0.0, t_final, steps + 1)

    h1 = grid.dx * kernel.values
    h1 = (h1 + h1.conj().T) / 2.0
    if grid.n <= DENSE_STATE_MAX_N:
        states = _evolve_dense(h1, psi0.values.astype(np.complex128), times)
    else:
        states = _evolve_crank_nicolson(
            lambda v: h1 @ v, psi0.values.astype(np.complex128), times
        )

    angle = _lift_angle(representation)
    lift0 = windowed_transform(psi0, window, angle)
    start = lift0.values.reshape(-1).astype(np.complex128)
    if grid.n <= DENSE_MAX_N:
        matrix = dense_matrix(op)
        matrix = (matrix + matrix.conj().T) / 2.0
        phases = _evolve_dense(matrix, start, times)
    else:
        n = grid.n
        grid_p = grid.dual()

        def apply_vec(v: np.ndarray) -> np.ndarray:
            phase = PhaseFunction2D(grid, grid_p, v.reshape(n, n))
            return op.apply(phase).values.reshape(-1)

        phases = _evolve_crank_nicolson(apply_vec, start, times)

    weight = math.sqrt(lift0.weight)
    scale1 = math.sqrt(grid.dx)
    divergences = np.empty(times.size)
    state_drift = 0.0
    phase_drift = 0.0
    norm1_0 = np.linalg.norm(states[:, 0]) * scale1
    norm2_0 = np.linalg.norm(phases[:, 0]) * weight
    for k, t in enumerate(times):
        psi_k = SampledFunction1D(grid, states[:, k])
        lifted = windowed_transform(psi_k, window, angle)
        phase_norm = np.linalg.norm(phases[:, k]) * weight
        defect = np.linalg.norm(phases[:, k] - lifted.values.reshape(-1)) * weight
        divergences[k] = defect / max(phase_norm, _RESIDUAL_FLOOR)
        if t > 0:
            state_drift = max(
                state_drift,
                abs(np.linalg.norm(states[:, k]) * scale1 - norm1_0) / t,
            )
            phase_drift = max(
                phase_drift, abs(phase_norm - norm2_0) / t
            )
    final_state = SampledFunction1D(grid, states[:, -1])
    final_phase = PhaseFunction2D(
        grid, grid.dual(), phases[:, -1].reshape(grid.n, grid.n)
    )
    return EvolutionResult(
        state=final_state,
        phase=final_phase,
        divergence=float(divergences.max()),
        state_norm_drift=float(state_drift),
        phase_norm_drift=float(phase_drift),
        times=times,
        divergences=divergences,
    )
