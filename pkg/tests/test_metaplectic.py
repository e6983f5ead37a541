"""Unitary propagator on the phase plane: group structure and generator."""

import numpy as np
import pytest

from phasekit import states
from phasekit.grid import ConfigurationError, Grid1D, PhaseFunction2D
from phasekit.metaplectic import (
    coordinate_transform,
    generator_apply,
    propagate,
    shear_factorization,
    substitution_matrix,
)
from phasekit.symplectic import PERIOD, THETA_WIGNER, flow_matrix
from phasekit.wigner import wigner_metaplectic


def _test_function(n=128, half_width=10.0, seed=41):
    grid = Grid1D.centered(n, half_width)
    rng = np.random.default_rng(seed)
    psi = states.random_wave(grid, rng)
    phi = states.random_wave(grid, rng)
    return wigner_metaplectic(psi, phi)


def test_identity_flow_is_exact():
    F = _test_function()
    out = propagate(F, 0.0)
    assert np.array_equal(out.values, F.values)


def test_full_period_is_exact_identity_path():
    # the period reduction lands exactly on the identity fast path
    F = _test_function()
    out = propagate(F, PERIOD)
    assert np.max(np.abs(out.values - F.values)) < 1e-9


def test_unitarity():
    F = _test_function()
    n0 = F.norm()
    for theta in (0.1, THETA_WIGNER, 0.9, -1.3, PERIOD / 2):
        assert propagate(F, theta).norm() == pytest.approx(n0, rel=1e-9)


def _smooth_function(n=128, half_width=10.0):
    grid = Grid1D.centered(n, half_width)
    return wigner_metaplectic(states.gaussian(grid), states.hermite(grid, 1))


def test_round_trip():
    F = _smooth_function()
    for theta in (0.3, -0.7, 2.0):
        back = propagate(propagate(F, theta), -theta)
        assert np.max(np.abs(back.values - F.values)) < 1e-6


def test_group_law():
    F = _smooth_function()
    pairs = [(0.2, 0.3), (0.5, -0.9), (THETA_WIGNER, THETA_WIGNER), (1.1, 0.4)]
    for a, b in pairs:
        lhs = propagate(propagate(F, b), a)
        rhs = propagate(F, a + b)
        scale = max(rhs.norm(), 1e-30)
        assert (lhs.values - rhs.values).__abs__().max() / scale < 1e-6


def test_group_law_rough_data():
    # random low-mode waves carry more edge mass than the smooth defaults;
    # the law still holds an order below the smooth tolerance
    F = _test_function()
    for a, b in ((0.2, 0.3), (1.1, 0.4)):
        lhs = propagate(propagate(F, b), a)
        rhs = propagate(F, a + b)
        scale = max(rhs.norm(), 1e-30)
        assert (lhs.values - rhs.values).__abs__().max() / scale < 1e-4


def test_generator_matches_difference_quotient():
    # seam mass at the box edge is amplified by the dual extent, so this
    # check needs the wide box; see the realness test for the same effect
    F = _smooth_function()
    eps = 1e-4
    plus = propagate(F, eps).values
    minus = propagate(F, -eps).values
    fd = (plus - minus) / (2.0 * eps)
    gen = generator_apply(F).values
    resid = np.linalg.norm(fd + 1j * gen) / np.linalg.norm(fd)
    assert resid < 1e-5


def test_propagator_realizes_distribution_covariance():
    # transporting the distinguished-angle distribution by theta must give
    # the fractional distribution; spot-check against the direct integral
    # at theta = -THETA_WIGNER where the flow matrix is rational
    grid = Grid1D.centered(256, 8.0)
    g = states.gaussian(grid)
    W = wigner_metaplectic(g, g)
    out = propagate(W, -THETA_WIGNER)
    # a Gaussian's zero-angle distribution is the tensor product of the
    # state with the conjugate of its transform, all positive here
    from phasekit.wigner import wigner_fractional

    ref = wigner_fractional(g, g, 0.0)
    assert np.max(np.abs(out.values - ref.values)) < 1e-9


def test_substitution_matrix_inverts_plane_block():
    # the mixed plane (rows/cols 0 and 3) is invariant under the flow, so
    # restriction is multiplicative and the substitution matrix is the
    # inverse of the flow's own block
    from phasekit.symplectic import plane_block

    for theta in (0.3, -0.8, THETA_WIGNER):
        A = substitution_matrix(theta)
        prod = A @ plane_block(flow_matrix(theta))
        assert np.max(np.abs(prod - np.eye(2))) < 1e-12


def test_shear_factorization_reconstructs_substitution():
    for theta in (0.25, -0.6, 1.4):
        fac = shear_factorization(theta)
        target = substitution_matrix(theta)
        assert np.max(np.abs(fac.matrix() - target)) < 1e-12
        for kind, _ in fac.factors:
            assert kind in ("shear_x", "shear_xi", "quarter")


def test_shear_factorization_rejects_non_unimodular():
    from phasekit.metaplectic import ShearFactorization

    with pytest.raises(ConfigurationError):
        ShearFactorization.factor(np.array([[2.0, 0.0], [0.0, 2.0]]))


def _gaussian_plane_function(n=128, half_width=10.0):
    gx = Grid1D.centered(n, half_width)
    ge = gx.dual()
    x = gx.nodes()[:, None]
    e = ge.nodes()[None, :]
    vals = (np.exp(-(x**2) - e**2) / np.pi).astype(complex)
    return PhaseFunction2D(gx, ge, vals)


def test_coordinate_transform_matches_closed_form():
    # substituting the inverse flow into a Gaussian has a closed form;
    # the shear pipeline must track it at every angle
    F = _gaussian_plane_function()
    x = F.grid_x.nodes()[:, None]
    e = F.grid_p.nodes()[None, :]
    for theta in (0.05, 0.3, -0.5, 0.8):
        A = substitution_matrix(theta)
        exact = (
            np.exp(
                -((A[0, 0] * x + A[0, 1] * e) ** 2)
                - (A[1, 0] * x + A[1, 1] * e) ** 2
            )
            / np.pi
        )
        out = coordinate_transform(F, theta, method="spectral")
        assert np.max(np.abs(out.values - exact)) < 1e-6


def test_resample_oracle_near_identity():
    # the one-pass interpolation oracle wraps once the mapped box leaves
    # the fundamental period, so it is only consulted at small angles
    F = _gaussian_plane_function()
    for theta in (0.05, -0.1, 0.15):
        spectral = coordinate_transform(F, theta, method="spectral")
        resampled = coordinate_transform(F, theta, method="resample")
        err = np.max(np.abs(spectral.values - resampled.values))
        assert err < 1e-8
