"""Inverse solver machinery at reduced size: Jacobian, Tikhonov, Newton."""

import numpy as np
import pytest

from elascat.basis import LambdaField, fit_constant
from elascat.errors import Diverged
from elascat.forward import far_field
from elascat.inversion import (
    NewtonOptions,
    ScatteringSetup,
    assemble_jacobian,
    forward_map,
    frechet_column,
    function_contrast,
    gaussian_direction_contrast,
    lambda_contrast,
    newton_iterate,
    tikhonov_step,
)
from elascat.tensors import IsotropicMaterial

MAT = IsotropicMaterial(2.0, 1.0, 1.0)
OMEGA = 0.1
ANGLES = [0.0, np.pi / 2.0, np.pi, 1.5 * np.pi]


@pytest.fixture(scope="module")
def setup():
    return ScatteringSetup(MAT, OMEGA, 16, 15, ANGLES, 16, "p")


def test_forward_map_shape_and_zero_contrast(setup):
    K = 3
    flat = LambdaField(K=K, coeffs=np.full((K, K), 0.0))
    # coefficients reproducing the exterior lam would need the constant fit;
    # zero coefficients with lam_exterior = 0 mean zero contrast directly
    data = forward_map(flat, setup, lam_exterior=0.0)
    assert data.shape == (setup.data_size,)
    assert np.abs(data).max() < 1e-12


def test_forward_map_rotation_symmetry(setup):
    """Incidents at 0 and pi see point-symmetric media symmetrically.

    For a centered target, u_inf(-d; -xhat) = -u_inf(d; xhat); with M even
    the direction grid maps onto itself under the half-turn.
    """
    grid = setup.grid
    K = 3
    coeffs = np.zeros((K, K))
    coeffs[1, 1] = 0.4          # centered single Gaussian, even under x -> -x
    f = LambdaField(K=K, coeffs=coeffs)
    data = forward_map(f, setup, lam_exterior=0.0)
    M = setup.M
    per_inc = data.reshape(len(ANGLES), 2, M, 2)
    shift = M // 2
    tol = 1e-12 * np.abs(per_inc[0, 0]).max()
    for mode in range(2):
        a = per_inc[0, mode]                      # incident theta = 0
        b = per_inc[2, mode]                      # incident theta = pi
        b_mapped = -np.roll(b, -shift, axis=0)
        assert np.abs(a - b_mapped).max() < tol


def test_frechet_zero_direction(setup):
    K = 3
    f = fit_constant(0.3, K, setup.grid.flat_nodes)
    cf = lambda_contrast(setup.grid, f, MAT.lam)
    solver, fields = setup.solve_state(cf)
    zero_dir = gaussian_direction_contrast(setup.grid, K, 1, 1, amplitude=0.0)
    col = frechet_column(setup, cf, solver, fields, zero_dir)
    assert np.abs(col).max() == 0.0


def test_frechet_linearity_in_direction(setup):
    K = 3
    f = fit_constant(0.3, K, setup.grid.flat_nodes)
    cf = lambda_contrast(setup.grid, f, MAT.lam)
    solver, fields = setup.solve_state(cf)
    c1 = frechet_column(setup, cf, solver, fields,
                        gaussian_direction_contrast(setup.grid, K, 1, 2, 1.0))
    c2 = frechet_column(setup, cf, solver, fields,
                        gaussian_direction_contrast(setup.grid, K, 1, 2, 2.0))
    assert np.abs(c2 - 2.0 * c1).max() < 1e-14


def test_jacobian_matches_generic_column(setup):
    K = 3
    f = fit_constant(0.3, K, setup.grid.flat_nodes)
    cf = lambda_contrast(setup.grid, f, MAT.lam)
    solver, fields = setup.solve_state(cf)
    J = assemble_jacobian(setup, f, MAT.lam, state=(solver, fields))
    assert J.shape == (2 * setup.data_size, K * K)
    rows = setup.data_size
    for k_idx, j_idx in ((0, 0), (1, 2), (2, 1)):
        col = J[:rows, k_idx * K + j_idx] + 1j * J[rows:, k_idx * K + j_idx]
        ref = frechet_column(setup, cf, solver, fields,
                             gaussian_direction_contrast(setup.grid, K, k_idx, j_idx))
        assert np.abs(col - ref).max() < 1e-13


def test_jacobian_born_column_at_zero_contrast(setup):
    """At zero contrast the column is the Born far field of the basis bump."""
    K = 3
    grid = setup.grid
    zero = LambdaField(K=K, coeffs=np.zeros((K, K)))
    cf0 = lambda_contrast(grid, zero, 0.0)
    solver, fields = setup.solve_state(cf0)
    J = assemble_jacobian(setup, zero, 0.0, state=(solver, fields))
    k_idx, j_idx = 1, 1
    rows = setup.data_size
    col = J[:rows, k_idx * K + j_idx] + 1j * J[rows:, k_idx * K + j_idx]
    d_cf = gaussian_direction_contrast(grid, K, k_idx, j_idx)
    born = np.concatenate([
        far_field(grid, u, d_cf, MAT, OMEGA, setup.M).stacked()
        for u in fields])
    assert np.abs(col - born).max() < 1e-13


def test_frechet_finite_difference_consistency(setup):
    K = 3
    base = fit_constant(0.3, K, setup.grid.flat_nodes)
    cf = lambda_contrast(setup.grid, base, MAT.lam)
    F0, solver, fields = setup.forward_stacked(cf)
    J = assemble_jacobian(setup, base, MAT.lam, state=(solver, fields))
    rng = np.random.default_rng(5)
    direction = rng.normal(size=(K, K))
    dvec = J @ direction.reshape(-1)
    deriv = dvec[:setup.data_size] + 1j * dvec[setup.data_size:]
    rems = []
    for eps in (1e-2, 1e-3, 1e-4):
        Fp = forward_map(LambdaField(K=K, coeffs=base.coeffs + eps * direction),
                         setup, MAT.lam)
        rems.append(np.linalg.norm(Fp - F0 - eps * deriv))
    slope = np.polyfit(np.log([1e-2, 1e-3, 1e-4]), np.log(rems), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)
    assert rems[2] / np.linalg.norm(1e-4 * deriv) <= 0.05


def test_tikhonov_step():
    assert np.abs(tikhonov_step(np.eye(3), np.zeros(3), 0.5)).max() == 0.0
    tau = tikhonov_step(np.eye(3), np.array([1.0, 0.0, 0.0]), 1.0)
    assert np.allclose(tau, [0.5, 0.0, 0.0])
    rng = np.random.default_rng(6)
    J = rng.normal(size=(40, 7))
    r = rng.normal(size=40)
    for alpha in (1e-6, 1e-2, 1e3):
        tau = tikhonov_step(J, r, alpha)
        lhs = alpha * tau + J.T @ (J @ tau)
        rhs = J.T @ r
        assert np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs) < 1e-10
    big = tikhonov_step(J, r, 1e9)
    assert np.allclose(big, J.T @ r / 1e9, rtol=1e-6)
    with pytest.raises(ValueError):
        tikhonov_step(J, r, 0.0)


def test_newton_fixed_point_on_own_data(setup):
    """Data generated from the initial state gives a zero first update."""
    K = 3
    init = fit_constant(0.4, K, setup.grid.flat_nodes)
    data = forward_map(init, setup, MAT.lam)
    records = newton_iterate(setup, data, K, MAT.lam,
                             NewtonOptions(iterations=1), initial=init)
    assert records[0].residual < 1e-13
    assert np.abs(records[-1].coeffs - init.coeffs).max() < 1e-10


def test_newton_reduces_residual(setup):
    K = 3
    grid = setup.grid

    def truth(p):
        return 0.4 * np.exp(-2.0 * (p[..., 0] ** 2 + p[..., 1] ** 2))

    def gtruth(p):
        return -4.0 * np.asarray(p) * truth(p)[..., None]

    data, _, _ = setup.forward_stacked(function_contrast(grid, truth, gtruth, MAT.lam))
    records = newton_iterate(setup, data, K, MAT.lam,
                             NewtonOptions(lambda0=0.3, iterations=3),
                             truth_values=truth(grid.nodes))
    assert records[-1].residual < 0.2 * records[0].residual
    assert all(np.isfinite(r.residual) for r in records)


def test_newton_divergence_guard(setup):
    """Mangled (sign-flipped) data sends the iteration uphill immediately."""
    K = 3
    grid = setup.grid
    init = fit_constant(0.5, K, grid.flat_nodes)
    data = forward_map(init, setup, MAT.lam)
    # make the problem inconsistent and the steps destructive
    bad = -50.0 * data
    with pytest.raises(Diverged) as info:
        newton_iterate(setup, bad, K, MAT.lam,
                       NewtonOptions(iterations=12, alpha0=1e-9,
                                     divergence_patience=2), initial=init)
    assert len(info.value.records) >= 2
