"""Volume and single-layer potentials against independent quadrature oracles."""

import numpy as np
import pytest
from scipy.integrate import quad

from elascat.geometry import boundary_geometry, interior_grid
from elascat.greens import phi_dynamic_radial
from elascat.potentials import (
    assemble_volume_blocks,
    single_layer,
    volume_potential,
)
from elascat.tensors import IsotropicMaterial

MAT = IsotropicMaterial(1.0, 1.0, 1.0)


def test_zero_density():
    grid = interior_grid(11)
    out = volume_potential(grid, np.zeros((11, 11, 2)), np.zeros((1, 2)), MAT, 0.1)
    assert np.abs(out).max() == 0.0
    b = boundary_geometry(8)
    out = single_layer(b, np.zeros((16, 2)), np.zeros((1, 2)), MAT, 0.1)
    assert np.abs(out).max() == 0.0


def test_far_source_agrees_with_naive_sum():
    grid = interior_grid(9)
    rng = np.random.default_rng(0)
    dens = rng.normal(size=(9, 9, 2))
    x = np.array([5.0, -3.0])
    got = volume_potential(grid, dens, x, MAT, 0.1)[0]
    # naive reference sum over inside nodes
    from elascat.greens import phi_dynamic
    ref = np.zeros(2, dtype=complex)
    for k in range(9):
        for j in range(9):
            if grid.inside[k, j]:
                w = grid.weights2d[k, j]
                ref += w * phi_dynamic(x - grid.nodes[k, j], MAT, 0.1) @ dens[k, j]
    assert np.abs(got - ref).max() < 1e-14


def test_disc_center_against_polar_quadrature():
    """Constant unit density on a disc, evaluated at its center.

    The reference integrates the angular average of the kernel radially with
    adaptive quadrature; the angular average of phi1 I + phi2 xhat xhat over
    a circle is (phi1 + phi2 / 2) I.
    """
    omega = 0.1
    R_disc = 0.8

    def integrand(r, part):
        p1, p2 = phi_dynamic_radial(np.array([r]), MAT, omega)
        val = (p1[0] + 0.5 * p2[0]) * 2.0 * np.pi * r
        return val.real if part == "re" else val.imag

    ref = quad(integrand, 0.0, R_disc, args=("re",), limit=200)[0] \
        + 1j * quad(integrand, 0.0, R_disc, args=("im",), limit=200)[0]

    N = 81
    grid = interior_grid(N)
    disc = grid.nodes[..., 0] ** 2 + grid.nodes[..., 1] ** 2 <= R_disc**2
    grid.inside = disc          # repurpose the mask as the disc support
    dens = np.zeros((N, N, 2))
    dens[..., 0] = disc.astype(float)
    val = volume_potential(grid, dens, np.array([[0.0, 0.0]]), MAT, omega)[0]
    assert abs(val[0] - ref) / abs(ref) < 1e-3
    assert abs(val[1]) < 1e-13


def test_single_layer_amplitude_decay():
    b = boundary_geometry(32)
    rng = np.random.default_rng(1)
    dens = rng.normal(size=(64, 2)) + 1j * rng.normal(size=(64, 2))
    v100 = single_layer(b, dens, np.array([100.0, 0.0]), MAT, 1.0)[0]
    v400 = single_layer(b, dens, np.array([400.0, 0.0]), MAT, 1.0)[0]
    ratio = np.linalg.norm(v400) / np.linalg.norm(v100)
    assert ratio == pytest.approx(0.5, abs=0.02)


def test_single_layer_self_convergence():
    """Geometric trapezoid convergence; the 1e-8 doubling mark needs n = 128.

    The rounded-square parametrization is analytic in a strip of half-width
    about 0.16, so each doubling of n shrinks the error by roughly 1e-3.
    """
    x = np.array([0.2, -0.1])
    vals = {}
    for n in (32, 64, 128, 256):
        b = boundary_geometry(n)
        dens = np.ones((2 * n, 2)) * np.array([1.0, -0.5])
        vals[n] = single_layer(b, dens, x, MAT, 0.1)[0]
    e32 = np.abs(vals[32] - vals[64]).max()
    e64 = np.abs(vals[64] - vals[128]).max()
    e128 = np.abs(vals[128] - vals[256]).max()
    assert e128 < 1e-8
    assert e64 < 1e-2 * e32    # geometric, not algebraic, decay


def test_volume_blocks_match_pointwise_evaluation():
    grid = interior_grid(9)
    V11, V12, V22 = assemble_volume_blocks(grid, MAT, 0.3)
    rng = np.random.default_rng(3)
    dens = rng.normal(size=(9, 9, 2))
    dens_m = np.where(grid.inside[..., None], dens, 0.0)
    d1 = dens_m[..., 0].reshape(-1)
    d2 = dens_m[..., 1].reshape(-1)
    via_blocks = np.stack([V11 @ d1 + V12 @ d2, V12 @ d1 + V22 @ d2], axis=-1)
    direct = volume_potential(grid, dens, grid.flat_nodes, MAT, 0.3)
    assert np.abs(via_blocks - direct).max() < 1e-13
