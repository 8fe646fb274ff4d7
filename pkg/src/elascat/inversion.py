"""Inverse medium solver: forward map, Fréchet columns, Tikhonov-Newton loop.

The toy inverse problem recovers lambda*(x) only (mu* = mu, rho* = rho), so
every contrast is a pure dlam field.  Far-field data vectors are stacked
incident-major, then mode (p, s), then direction, then component; residuals
and the normal equations use the plain stacked l2 norm, which keeps the
regularization schedule alpha_n = alpha0 ratio^n on the scale the
reconstruction experiments assume.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .basis import LambdaField, design_matrix, fit_constant
from .errors import Diverged
from .forward import (
    ContrastFields,
    DynamicKernels,
    LsSolver,
    far_field,
    masked_stress,
    observation_directions,
    w_potential,
)
from .geometry import boundary_geometry, interior_grid
from .greens import farfield_coeffs
from .potentials import volume_potential
from .tensors import IsotropicMaterial, wavenumbers
from .waves import eval_plane_wave, plane_wave


@dataclass
class IterationRecord:
    """State logged at the start of Newton step n (before the update)."""

    n: int
    coeffs: np.ndarray
    residual: float
    field_error: float = np.nan


def lambda_contrast(grid, f: LambdaField, lam_exterior: float) -> ContrastFields:
    """dlam = lambda*(x) - lam with the analytic basis gradient."""
    vals = f.evaluate(grid.nodes).reshape(grid.N, grid.N) - lam_exterior
    grads = f.gradient(grid.nodes)
    zero = np.zeros((grid.N, grid.N))
    return ContrastFields(dlam=vals, dmu=zero, drho=zero.copy(),
                          grad_dlam=grads, grad_dmu=np.zeros(grads.shape))


def gaussian_direction_contrast(grid, K: int, k_idx: int, j_idx: int,
                                amplitude: float = 1.0) -> ContrastFields:
    """Contrast fields of one basis Gaussian (a Jacobian direction)."""
    coeffs = np.zeros((K, K))
    coeffs[k_idx, j_idx] = amplitude
    return lambda_contrast(grid, LambdaField(K=K, coeffs=coeffs), 0.0)


def function_contrast(grid, func, grad, lam_exterior: float) -> ContrastFields:
    """Contrast from an analytic target function and its gradient."""
    vals = func(grid.nodes) - lam_exterior
    grads = grad(grid.nodes)
    zero = np.zeros((grid.N, grid.N))
    return ContrastFields(dlam=vals, dmu=zero, drho=zero.copy(),
                          grad_dlam=grads, grad_dmu=np.zeros(grads.shape))


class ScatteringSetup:
    """Grids, kernels and incident fields shared by all solves of one setup."""

    def __init__(self, mat: IsotropicMaterial, omega: float, n: int, N: int,
                 incident_angles, M: int, incident_mode: str = "p"):
        self.mat = mat
        self.omega = omega
        self.M = M
        self.grid = interior_grid(N)
        self.boundary = boundary_geometry(n)
        self.kernels = DynamicKernels(self.grid, self.boundary, mat, omega)
        self.waves = [plane_wave(incident_mode, a, mat, omega)
                      for a in incident_angles]
        self.incident_values = [eval_plane_wave(w, self.grid.nodes)
                                for w in self.waves]
        # far-field phase matrices, reused by the batched Jacobian
        k_p, k_s = wavenumbers(mat, omega)
        _, dirs = observation_directions(M)
        w2 = (self.grid.weights2d * self.grid.inside).reshape(-1)
        y = self.grid.flat_nodes
        self._dirs = dirs
        self._phase = {
            "p": (k_p, np.exp(-1j * k_p * (dirs @ y.T)) * w2[None, :]),
            "s": (k_s, np.exp(-1j * k_s * (dirs @ y.T)) * w2[None, :]),
        }

    @property
    def data_size(self) -> int:
        return len(self.waves) * 2 * self.M * 2

    def solve_state(self, cf: ContrastFields):
        """Factorize (I - P L P) once and solve for every incident wave."""
        solver = LsSolver(self.kernels, cf)
        fields = [solver.solve_field(ui) for ui in self.incident_values]
        return solver, fields

    def stack_far_fields(self, cf: ContrastFields, fields) -> np.ndarray:
        return np.concatenate([
            far_field(self.grid, u, cf, self.mat, self.omega, self.M).stacked()
            for u in fields])

    def forward_stacked(self, cf: ContrastFields):
        solver, fields = self.solve_state(cf)
        return self.stack_far_fields(cf, fields), solver, fields

    def isotropic_far_stack(self, phi_matrix: np.ndarray) -> np.ndarray:
        """Batched far fields of isotropic stress densities phi I.

        ``phi_matrix`` holds masked scalar density columns (P, C); the result
        stacks mode/direction/component rows per column, (4 M, C) complex.
        The transversal far field of an isotropic density vanishes exactly.
        """
        dirs = self._dirs
        betas = farfield_coeffs(self.mat, self.omega)
        beta = {"p": betas.beta_p, "s": betas.beta_s}
        C = phi_matrix.shape[1]
        blocks = []
        for mode in ("p", "s"):
            k_a, phase = self._phase[mode]
            if mode == "s":
                blocks.append(np.zeros((2 * self.M, C), dtype=complex))
                continue
            t = phase @ phi_matrix                       # (M, C)
            amp = 1j * k_a * beta[mode] * t
            rows = amp[:, None, :] * dirs[:, :, None]    # (M, 2, C)
            blocks.append(rows.reshape(2 * self.M, C))
        return np.concatenate(blocks, axis=0)


def forward_map(f: LambdaField, setup: ScatteringSetup,
                lam_exterior: float) -> np.ndarray:
    """Stacked far-field data of the lambda* coefficient state."""
    cf = lambda_contrast(setup.grid, f, lam_exterior)
    data, _, _ = setup.forward_stacked(cf)
    return data


def frechet_column(setup: ScatteringSetup, cf: ContrastFields, solver: LsSolver,
                   fields, direction_cf: ContrastFields) -> np.ndarray:
    """Stacked far-field derivative in one general parameter direction.

    For each incident wave, solves (I - P L P) w = P [W(C_h : eps(u)) +
    omega^2 V(q u)] against the retained factorization and synthesizes the
    moment-form far field of the combined (w, u) sources.
    """
    grid, mat, omega = setup.grid, setup.mat, setup.omega
    parts = []
    for u in fields:
        h_pert = masked_stress(grid, u, direction_cf)
        rhs = w_potential(grid, h_pert, mat, omega)
        if direction_cf.drho.any():
            dens = np.where(grid.inside[..., None],
                            direction_cf.drho[..., None] * u, 0.0)
            rhs = rhs + omega**2 * volume_potential(
                grid, dens, grid.flat_nodes, mat, omega, premasked=True
            ).reshape(rhs.shape)
        w = solver.solve_rhs(rhs)
        ff_w = far_field(grid, w, cf, mat, omega, setup.M)
        ff_pert = far_field(grid, u, direction_cf, mat, omega, setup.M)
        parts.append(ff_w.stacked() + ff_pert.stacked())
    return np.concatenate(parts)


def assemble_jacobian(setup: ScatteringSetup, f: LambdaField,
                      lam_exterior: float, state=None) -> np.ndarray:
    """Real stacked Jacobian (2 data size, K^2), one factorization for all.

    Fast path for the pure-dlam problem: all K^2 basis directions share one
    batched multi-RHS solve and batched far-field synthesis.  Column order
    matches the k-major coefficient flattening.
    """
    grid = setup.grid
    cf = lambda_contrast(grid, f, lam_exterior)
    if state is None:
        solver, fields = setup.solve_state(cf)
    else:
        solver, fields = state
    K = f.K
    P = grid.N ** 2
    m = grid.inside.reshape(-1).astype(float)
    basis_cols = design_matrix(grid.flat_nodes, K)       # (P, K^2)
    kern = setup.kernels
    dlam_m = m * cf.dlam.reshape(-1)
    cols = []
    div_plain = np.hstack([kern.Dx, kern.Dy])
    for u in fields:
        u_vec = np.concatenate([u[..., 0].reshape(-1), u[..., 1].reshape(-1)])
        div_u = div_plain @ u_vec
        phi_pert = (m * div_u)[:, None] * basis_cols     # (P, K^2)
        # rhs_c = P W(phi_c I); G blocks already carry the left projection
        rhs = np.vstack([kern.G1 @ phi_pert, kern.G2 @ phi_pert])
        w_sol = solver.solve_rhs_batch(rhs)              # (2P, K^2)
        div_w = div_plain @ w_sol
        phi_total = dlam_m[:, None] * div_w + phi_pert
        cols.append(setup.isotropic_far_stack(phi_total))
    J = np.concatenate(cols, axis=0)
    return np.vstack([J.real, J.imag])


def tikhonov_step(J: np.ndarray, residual: np.ndarray, alpha: float) -> np.ndarray:
    """Solve (alpha I + J^T J) tau = J^T residual in the real formulation."""
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    JtJ = J.T @ J
    JtJ[np.diag_indices_from(JtJ)] += alpha
    return cho_solve(cho_factor(JtJ), J.T @ residual)


@dataclass
class NewtonOptions:
    lambda0: float = 0.5
    alpha0: float = 1e-3
    alpha_ratio: float = 0.5
    iterations: int = 2
    stagnation_rtol: float = 1e-12
    divergence_patience: int = 3


def newton_iterate(setup: ScatteringSetup, data: np.ndarray, K: int,
                   lam_exterior: float, options: NewtonOptions,
                   truth_values: np.ndarray = None,
                   initial: LambdaField = None,
                   callback=None) -> list:
    """Tikhonov-regularized Newton iteration on the coefficient matrix.

    ``data`` is the stacked far-field measurement vector.  Records hold the
    state before each update plus a final record after the last one.  Raises
    :class:`Diverged` (records attached) if the residual grows for
    ``divergence_patience`` consecutive steps.
    """
    grid = setup.grid
    current = initial if initial is not None else \
        fit_constant(options.lambda0, K, grid.flat_nodes)

    def field_error(f: LambdaField) -> float:
        if truth_values is None:
            return np.nan
        vals = f.evaluate(grid.nodes).reshape(grid.N, grid.N)
        return np.sqrt(grid.integrate((vals - truth_values) ** 2, mask_aware=True))

    records = []
    grow_streak = 0
    for n in range(options.iterations):
        cf = lambda_contrast(grid, current, lam_exterior)
        predicted, solver, fields = setup.forward_stacked(cf)
        resid = data - predicted
        res_norm = np.linalg.norm(resid)
        records.append(IterationRecord(n=n, coeffs=current.coeffs.copy(),
                                       residual=res_norm,
                                       field_error=field_error(current)))
        if callback is not None:
            callback(records[-1])
        if len(records) > 1:
            prev = records[-2].residual
            if res_norm > prev:
                grow_streak += 1
                if grow_streak >= options.divergence_patience:
                    raise Diverged("residual grew for "
                                   f"{grow_streak} consecutive steps", records)
            else:
                grow_streak = 0
            if abs(prev - res_norm) <= options.stagnation_rtol * prev:
                break
        J = assemble_jacobian(setup, current, lam_exterior,
                              state=(solver, fields))
        r_real = np.concatenate([resid.real, resid.imag])
        alpha_n = options.alpha0 * options.alpha_ratio**n
        tau = tikhonov_step(J, r_real, alpha_n)
        current = LambdaField(K=K, coeffs=current.coeffs + tau.reshape(K, K))

    cf = lambda_contrast(grid, current, lam_exterior)
    predicted, _, _ = setup.forward_stacked(cf)
    res_norm = np.linalg.norm(data - predicted)
    records.append(IterationRecord(n=len(records), coeffs=current.coeffs.copy(),
                                   residual=res_norm,
                                   field_error=field_error(current)))
    if callback is not None:
        callback(records[-1])
    return records
