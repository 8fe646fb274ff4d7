"""Discretized elastodynamic forward problem.

The second-kind volume integral equation u - L(u) = u_inc is collocated on
the full tensor grid of D = [-1, 1]^2 (the equation itself extends u beyond
the scatterer as the total field) and projected onto the resolved Chebyshev
subspace (2/3 anti-aliasing rule) on both sides.  Without the projection the
collocated operator carries spurious grid-scale eigenvalues near 1 that do
not converge with N and destabilize the inversion.

The operator uses the primal form of the integro-differential potential,
L(v) = div integral Phi (DeltaC : eps(v)) + omega^2 V(drho v), in which the
divergence acts on the (C^1) volume potential by differential quadrature.
The integration-by-parts split into a volume plus single-layer term is kept
for far-field synthesis, where it is exact; collocating the split form on
the grid evaluates the single layer at near-boundary nodes where the
trapezoidal rule breaks down, which is the measured source of the spurious
eigenvalues.

Far-field patterns are synthesized from the moment form

    u_inf_a(xhat) = beta_a J_a(xhat) . integral_Omega
        [i k_a (DeltaC : eps(u)) . xhat + omega^2 drho u] e^{-i k_a xhat.y} dy,

obtained from the volume/single-layer split by integrating the divergence
term by parts; the boundary contributions cancel exactly, which avoids a
numerically delicate near-cancellation (for a pure dlam contrast the
transversal far field vanishes identically, a fact the moment form honors to
machine precision).  The split form remains available for cross checks.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import SingularSystem
from .geometry import BoundaryGeometry, ScatterGrid
from .greens import farfield_coeffs
from .potentials import assemble_volume_blocks, volume_potential
from .tensors import IsotropicMaterial, wavenumbers
from .waves import PlaneWave, eval_plane_wave


@dataclass
class ContrastFields:
    """Smooth contrast fields sampled on the grid nodes of D.

    The arrays are unmasked smooth extensions; solvers multiply by the inside
    mask wherever a volume density is formed.  Analytic gradients, when
    available, replace differential-quadrature gradients of dlam and dmu.
    """

    dlam: np.ndarray
    dmu: np.ndarray
    drho: np.ndarray
    grad_dlam: np.ndarray = None   # (N, N, 2) or None
    grad_dmu: np.ndarray = None

    @classmethod
    def zero(cls, N: int) -> "ContrastFields":
        z = np.zeros((N, N))
        return cls(dlam=z, dmu=z.copy(), drho=z.copy())

    def gradients(self, grid: ScatterGrid):
        """(grad dlam, grad dmu), analytic if provided, else DQ of the fields."""
        if self.grad_dlam is not None:
            g_lam = self.grad_dlam
        else:
            g_lam = np.stack([grid.diff(self.dlam, 0), grid.diff(self.dlam, 1)], axis=-1)
        if self.grad_dmu is not None:
            g_mu = self.grad_dmu
        else:
            g_mu = np.stack([grid.diff(self.dmu, 0), grid.diff(self.dmu, 1)], axis=-1)
        return g_lam, g_mu

    @property
    def is_zero(self) -> bool:
        return not (self.dlam.any() or self.dmu.any() or self.drho.any())

    @property
    def only_dlam(self) -> bool:
        return not (self.dmu.any() or self.drho.any())


@dataclass
class InteriorField:
    """Solution values at all grid nodes with the generating metadata.

    Values are the resolved-subspace collocation solution; outside-mask nodes
    carry the equation's total-field extension, not zeros.
    """

    values: np.ndarray          # (N, N, 2) complex
    incident: PlaneWave
    mat: IsotropicMaterial
    omega: float


@dataclass
class FarFieldSet:
    """P/S far-field samples over equidistant observation directions."""

    angles: np.ndarray          # (M,)
    directions: np.ndarray      # (M, 2)
    u_p: np.ndarray             # (M, 2) complex, parallel to direction
    u_s: np.ndarray             # (M, 2) complex, orthogonal to direction

    def stacked(self) -> np.ndarray:
        """Complex vector ordered mode (p, s), direction, component."""
        return np.concatenate([self.u_p.reshape(-1), self.u_s.reshape(-1)])


def observation_directions(M: int):
    """M equidistant angles on the unit circle starting at zero."""
    angles = 2.0 * np.pi * np.arange(M) / M
    return angles, np.stack([np.cos(angles), np.sin(angles)], axis=1)


def grad_field(grid: ScatterGrid, u: np.ndarray) -> np.ndarray:
    """Gradient tensor field g[..., i, j] = d u_i / d x_j by DQ."""
    return np.stack([grid.diff(u, 0), grid.diff(u, 1)], axis=-1)


def divergence(grid: ScatterGrid, u: np.ndarray) -> np.ndarray:
    return grid.diff(u[..., 0], 0) + grid.diff(u[..., 1], 1)


def strain_field(grid: ScatterGrid, u: np.ndarray) -> np.ndarray:
    g = grad_field(grid, u)
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def contrast_stress(grid: ScatterGrid, u: np.ndarray,
                    cf: ContrastFields) -> np.ndarray:
    """DeltaC : eps(u) = dlam (div u) I + 2 dmu eps(u) on the grid."""
    div = divergence(grid, u)
    out = np.zeros(u.shape[:-1] + (2, 2), dtype=np.result_type(u, float))
    if cf.dmu.any():
        out += 2.0 * cf.dmu[..., None, None] * strain_field(grid, u)
    out[..., 0, 0] += cf.dlam * div
    out[..., 1, 1] += cf.dlam * div
    return out


def contrast_divergence(grid: ScatterGrid, u: np.ndarray,
                        cf: ContrastFields) -> np.ndarray:
    """div(DeltaC : eps(u)) expanded in contrast terms.

    dmu Lap(u) + (dlam + dmu) grad(div u) + (grad dlam)(div u)
    + 2 eps(u) grad dmu.
    """
    div = divergence(grid, u)
    g_lam, g_mu = cf.gradients(grid)
    out = np.zeros(u.shape, dtype=np.result_type(u, float))
    if cf.dmu.any():
        lap = np.stack([
            grid.diff(u[..., 0], 0, 2) + grid.diff(u[..., 0], 1, 2),
            grid.diff(u[..., 1], 0, 2) + grid.diff(u[..., 1], 1, 2),
        ], axis=-1)
        out += cf.dmu[..., None] * lap
        out += 2.0 * np.einsum("...ij,...j->...i", strain_field(grid, u), g_mu)
    grad_div = np.stack([grid.diff(div, 0), grid.diff(div, 1)], axis=-1)
    out += (cf.dlam + cf.dmu)[..., None] * grad_div
    out += g_lam * div[..., None]
    return out


def boundary_traction(grid: ScatterGrid, boundary: BoundaryGeometry,
                      u: np.ndarray, cf: ContrastFields,
                      interp=None) -> np.ndarray:
    """(DeltaC : eps(u)) . n at the boundary nodes.

    The unmasked stress components are interpolated from the grid with the
    tensor barycentric rule and contracted with the outward normal.
    """
    stress = contrast_stress(grid, u, cf)
    P = grid.interp_matrix(boundary.points) if interp is None else interp
    s11 = P @ stress[..., 0, 0].reshape(-1)
    s22 = P @ stress[..., 1, 1].reshape(-1)
    s12 = P @ stress[..., 0, 1].reshape(-1)
    n1, n2 = boundary.normals[:, 0], boundary.normals[:, 1]
    return np.stack([s11 * n1 + s12 * n2, s12 * n1 + s22 * n2], axis=-1)


def volume_source(grid: ScatterGrid, u: np.ndarray, cf: ContrastFields,
                  mat: IsotropicMaterial, omega: float) -> np.ndarray:
    """Masked volume density div(DeltaC : eps(u)) + omega^2 drho u."""
    g = contrast_divergence(grid, u, cf)
    if cf.drho.any():
        g = g + omega**2 * cf.drho[..., None] * u
    return np.where(grid.inside[..., None], g, 0.0)


def masked_stress(grid: ScatterGrid, u: np.ndarray,
                  cf: ContrastFields) -> np.ndarray:
    return np.where(grid.inside[..., None, None], contrast_stress(grid, u, cf), 0.0)


def w_potential(grid: ScatterGrid, h: np.ndarray, mat: IsotropicMaterial,
                omega: float) -> np.ndarray:
    """Primal integro-differential potential W(h) = div integral Phi . h.

    ``h`` is a symmetric tensor density on the grid (masked by the caller);
    the divergence of the C^1 volume potential is taken by differential
    quadrature.
    """
    col1 = volume_potential(grid, h[..., :, 0], grid.flat_nodes, mat, omega,
                            premasked=True)
    col2 = volume_potential(grid, h[..., :, 1], grid.flat_nodes, mat, omega,
                            premasked=True)
    N = grid.N
    m11 = col1[:, 0].reshape(N, N)
    m21 = col1[:, 1].reshape(N, N)
    m12 = col2[:, 0].reshape(N, N)
    m22 = col2[:, 1].reshape(N, N)
    w1 = grid.diff(m11, 0) + grid.diff(m12, 1)
    w2 = grid.diff(m21, 0) + grid.diff(m22, 1)
    return np.stack([w1, w2], axis=-1)


def apply_L(grid: ScatterGrid, u: np.ndarray, cf: ContrastFields,
            mat: IsotropicMaterial, omega: float) -> np.ndarray:
    """Operator form of L(u) at all grid nodes (unprojected).

    L(u) = W(DeltaC : eps(u)) + omega^2 V(drho u) with the stress density
    masked to the scatterer.
    """
    u = np.asarray(u)
    if cf.is_zero:
        return np.zeros(u.shape, dtype=complex)
    out = w_potential(grid, masked_stress(grid, u, cf), mat, omega)
    if cf.drho.any():
        dens = np.where(grid.inside[..., None], cf.drho[..., None] * u, 0.0)
        out = out + omega**2 * volume_potential(
            grid, dens, grid.flat_nodes, mat, omega, premasked=True
        ).reshape(u.shape)
    return out


class DynamicKernels:
    """Contrast-independent dense pieces shared by every solve at (mat, omega).

    Holds the volume-potential blocks, the pre-projected composite operators
    of the pure-dlam fast path, the boundary interpolation matrix, and the
    kron-factored differential-quadrature operators.
    """

    def __init__(self, grid: ScatterGrid, boundary: BoundaryGeometry,
                 mat: IsotropicMaterial, omega: float):
        self.grid = grid
        self.boundary = boundary
        self.mat = mat
        self.omega = omega
        N = grid.N
        eye = np.eye(N)
        self.Dx = np.kron(grid.D1, eye)
        self.Dy = np.kron(eye, grid.D1)
        self.P2 = np.kron(grid.lowpass, grid.lowpass)
        self.Dx_f = self.Dx @ self.P2
        self.Dy_f = self.Dy @ self.P2
        self.interp = grid.interp_matrix(boundary.points)
        self.V11, self.V12, self.V22 = assemble_volume_blocks(grid, mat, omega)
        # projected divergence-of-potential composites for isotropic densities
        self.G1 = self.P2 @ (self.Dx @ self.V11 + self.Dy @ self.V12)
        self.G2 = self.P2 @ (self.Dx @ self.V12 + self.Dy @ self.V22)


class LsSolver:
    """Dense factorized projected operator I - P L P for one contrast state."""

    def __init__(self, kernels: DynamicKernels, cf: ContrastFields):
        self.kernels = kernels
        self.cf = cf
        grid = kernels.grid
        P = grid.N ** 2
        if cf.is_zero:
            A = np.eye(2 * P, dtype=complex)
        else:
            A = -self._operator_matrix(cf)
            idx = np.arange(2 * P)
            A[idx, idx] += 1.0
        try:
            self.lu = lu_factor(A, overwrite_a=True, check_finite=False)
        except Exception as exc:
            raise SingularSystem(f"LU factorization failed: {exc}") from exc
        diag_u = np.abs(np.diag(self.lu[0]))
        if diag_u.min() == 0.0 or not np.isfinite(diag_u).all():
            raise SingularSystem("dense collocation system is singular")

    def _operator_matrix(self, cf: ContrastFields) -> np.ndarray:
        k = self.kernels
        grid = k.grid
        P = grid.N ** 2
        m = grid.inside.reshape(-1).astype(float)
        div_f = np.hstack([k.Dx_f, k.Dy_f])
        if cf.only_dlam:
            s_iso = (m * cf.dlam.reshape(-1))[:, None] * div_f
            return np.vstack([k.G1 @ s_iso, k.G2 @ s_iso])
        # general path: tensor density h = dlam div I + 2 dmu eps, masked
        dlam = (m * cf.dlam.reshape(-1))[:, None]
        dmu = (m * cf.dmu.reshape(-1))[:, None]
        e11 = np.hstack([k.Dx_f, np.zeros_like(k.Dx_f)])
        e22 = np.hstack([np.zeros_like(k.Dy_f), k.Dy_f])
        e12 = 0.5 * np.hstack([k.Dy_f, k.Dx_f])
        h11 = dlam * div_f + 2.0 * dmu * e11
        h22 = dlam * div_f + 2.0 * dmu * e22
        h12 = 2.0 * dmu * e12
        W1 = k.Dx @ (k.V11 @ h11 + k.V12 @ h12) + k.Dy @ (k.V11 @ h12 + k.V12 @ h22)
        W2 = k.Dx @ (k.V12 @ h11 + k.V22 @ h12) + k.Dy @ (k.V12 @ h12 + k.V22 @ h22)
        L = np.vstack([k.P2 @ W1, k.P2 @ W2])
        if cf.drho.any():
            w2rho = self.kernels.omega**2 * m * cf.drho.reshape(-1)
            B11 = (k.V11 * w2rho[None, :]) @ k.P2
            B12 = (k.V12 * w2rho[None, :]) @ k.P2
            B22 = (k.V22 * w2rho[None, :]) @ k.P2
            L[:P, :P] += k.P2 @ B11
            L[:P, P:] += k.P2 @ B12
            L[P:, :P] += k.P2 @ B12
            L[P:, P:] += k.P2 @ B22
        return L

    def _to_vec(self, field: np.ndarray) -> np.ndarray:
        return np.concatenate([field[..., 0].reshape(-1), field[..., 1].reshape(-1)])

    def _to_field(self, vec: np.ndarray) -> np.ndarray:
        N = self.kernels.grid.N
        P = N * N
        return np.stack([vec[:P].reshape(N, N), vec[P:].reshape(N, N)], axis=-1)

    def _project(self, field: np.ndarray) -> np.ndarray:
        return self.kernels.grid.filter_field(field)

    def solve_field(self, incident_values: np.ndarray) -> np.ndarray:
        """Solve (I - P L P) u = P u_inc; the solution lies in the subspace."""
        rhs = self._project(np.asarray(incident_values, dtype=complex))
        sol = lu_solve(self.lu, self._to_vec(rhs), check_finite=False)
        if not np.isfinite(sol).all():
            raise SingularSystem("solve produced non-finite values")
        return self._to_field(sol)

    def solve_rhs(self, rhs_field: np.ndarray) -> np.ndarray:
        """Solve (I - P L P) w = P rhs for a linearization right-hand side."""
        rhs = self._project(np.asarray(rhs_field, dtype=complex))
        return self._to_field(lu_solve(self.lu, self._to_vec(rhs),
                                       check_finite=False))

    def solve_rhs_batch(self, rhs_matrix: np.ndarray) -> np.ndarray:
        """Solve against pre-projected stacked right-hand-side columns."""
        return lu_solve(self.lu, rhs_matrix, check_finite=False)

    def apply_operator(self, u: np.ndarray) -> np.ndarray:
        """P L(P u) through the same dense kernels (for residual checks)."""
        uf = self._project(np.asarray(u, dtype=complex))
        return self._project(apply_L(self.kernels.grid, uf, self.cf,
                                     self.kernels.mat, self.kernels.omega))


def solve_lippmann_schwinger(incident: PlaneWave, cf: ContrastFields,
                             grid: ScatterGrid, boundary: BoundaryGeometry,
                             mat: IsotropicMaterial, omega: float,
                             solver: LsSolver = None):
    """Solve the forward problem for one incident wave.

    Returns the interior field and the factorized solver, reusable for other
    incident waves and linearization right-hand sides at the same contrast.
    """
    if solver is None:
        kernels = DynamicKernels(grid, boundary, mat, omega)
        solver = LsSolver(kernels, cf)
    u_inc = eval_plane_wave(incident, grid.nodes)
    u = solver.solve_field(u_inc)
    return InteriorField(values=u, incident=incident, mat=mat, omega=omega), solver


def _project_modes(integ: np.ndarray, dirs: np.ndarray, beta, mode: str):
    radial = np.einsum("mi,mi->m", dirs, integ)
    if mode == "p":
        return beta * radial[:, None] * dirs
    return beta * (integ - radial[:, None] * dirs)


def far_field(grid: ScatterGrid, u: np.ndarray, cf: ContrastFields,
              mat: IsotropicMaterial, omega: float, M: int) -> FarFieldSet:
    """Far-field pair of the scattered wave, moment form (no boundary term)."""
    angles, dirs = observation_directions(M)
    k_p, k_s = wavenumbers(mat, omega)
    betas = farfield_coeffs(mat, omega)
    S = masked_stress(grid, u, cf).reshape(-1, 2, 2)
    w = (grid.weights2d * grid.inside).reshape(-1)
    y = grid.flat_nodes
    rho_term = None
    if cf.drho.any():
        rho_term = (np.where(grid.inside[..., None], cf.drho[..., None] * u, 0.0)
                    .reshape(-1, 2))
    out = {}
    for mode, k_a, beta in (("p", k_p, betas.beta_p), ("s", k_s, betas.beta_s)):
        phase = np.exp(-1j * k_a * (dirs @ y.T)) * w[None, :]
        Sx = np.einsum("pij,mj->mpi", S, dirs)
        integ = 1j * k_a * np.einsum("mp,mpi->mi", phase, Sx)
        if rho_term is not None:
            integ += omega**2 * (phase @ rho_term)
        out[mode] = _project_modes(integ, dirs, beta, mode)
    return FarFieldSet(angles=angles, directions=dirs, u_p=out["p"], u_s=out["s"])


def far_field_from_sources(grid: ScatterGrid, boundary: BoundaryGeometry,
                           g: np.ndarray, h: np.ndarray,
                           mat: IsotropicMaterial, omega: float,
                           M: int) -> FarFieldSet:
    """Far-field pair in the volume/single-layer split form.

    u_inf_a(xhat) = beta_a J_a(xhat) . [ integral_Omega g(y) e^{-i k_a xhat.y}
    - integral_bdry h(y) e^{-i k_a xhat.y} ].  Exact counterpart of the moment
    form; numerically the two large terms nearly cancel at low frequency, so
    this path serves verification rather than production synthesis.
    """
    angles, dirs = observation_directions(M)
    k_p, k_s = wavenumbers(mat, omega)
    betas = farfield_coeffs(mat, omega)
    w_vol = (grid.weights2d * grid.inside).reshape(-1)
    gv = g.reshape(-1, 2) * w_vol[:, None]
    hv = h * (boundary.jacobians * boundary.node_weight)[:, None]
    out = {}
    for mode, k_a, beta in (("p", k_p, betas.beta_p), ("s", k_s, betas.beta_s)):
        phase_v = np.exp(-1j * k_a * (dirs @ grid.flat_nodes.T))
        phase_b = np.exp(-1j * k_a * (dirs @ boundary.points.T))
        integ = phase_v @ gv - phase_b @ hv
        out[mode] = _project_modes(integ, dirs, beta, mode)
    return FarFieldSet(angles=angles, directions=dirs, u_p=out["p"], u_s=out["s"])


def far_field_split(grid: ScatterGrid, boundary: BoundaryGeometry, u: np.ndarray,
                    cf: ContrastFields, mat: IsotropicMaterial, omega: float,
                    M: int, interp=None) -> FarFieldSet:
    """Far field through the literal volume + boundary-traction sources."""
    g = volume_source(grid, u, cf, mat, omega)
    h = boundary_traction(grid, boundary, u, cf, interp=interp)
    return far_field_from_sources(grid, boundary, g, h, mat, omega, M)


def add_noise_vector(values: np.ndarray, delta: float, seed: int) -> np.ndarray:
    """Perturb a complex data vector to exact relative L2 level delta.

    U_delta = U + delta (||U|| / ||V||) V with V drawn componentwise from the
    standard complex normal distribution of the counter-based Philox4x64-10
    generator, so fixed seeds give bit-identical noise.
    """
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    if delta == 0.0:
        return values.copy()
    rng = np.random.Generator(np.random.Philox(key=seed))
    noise = rng.standard_normal(values.shape) + 1j * rng.standard_normal(values.shape)
    scale = delta * np.linalg.norm(values) / np.linalg.norm(noise)
    return values + scale * noise


def add_noise(U: FarFieldSet, delta: float, seed: int) -> FarFieldSet:
    """Noise applied across the stacked (p, s) samples of one far-field set."""
    stacked = add_noise_vector(U.stacked(), delta, seed)
    M = len(U.angles)
    return FarFieldSet(
        angles=U.angles.copy(),
        directions=U.directions.copy(),
        u_p=stacked[: 2 * M].reshape(M, 2),
        u_s=stacked[2 * M:].reshape(M, 2),
    )
