"""Volume and single-layer potentials of the dynamic fundamental tensor.

Evaluation rules follow the collocation discretization: tensor Clenshaw-Curtis
quadrature over the masked grid for the volume potential and the periodic
trapezoidal rule over the boundary nodes for the single layer.  The weakly
singular (logarithmic) self interaction of the volume potential is replaced by
its analytic integral over a disc of equal cell area plus the angular mean of
the regular remainder on that disc's rim; the two log terms cancel, leaving

    diag contribution = w_cell * (phi1(Rc) + phi2(Rc)/2 + lam'/2) * I,

with Rc = sqrt(w_cell / pi) and lam' the static log coefficient.  Boundary
kernel evaluations that coincide with a target point (four grid nodes lie
exactly on the boundary) are dropped from the trapezoidal sum.
"""

import numpy as np

from .geometry import BoundaryGeometry, ScatterGrid
from .greens import phi_dynamic_radial, static_coeffs
from .tensors import IsotropicMaterial

_COINCIDENT = 1e-13


def _radial_parts(r, mat, omega):
    """Kernel radial parts with coincident pairs zeroed instead of singular."""
    hit = r < _COINCIDENT
    r_safe = np.where(hit, 1.0, r)
    phi1, phi2 = phi_dynamic_radial(r_safe, mat, omega)
    phi1 = np.where(hit, 0.0, phi1)
    phi2 = np.where(hit, 0.0, phi2)
    return phi1, phi2, hit


def kernel_blocks(targets: np.ndarray, sources: np.ndarray,
                  mat: IsotropicMaterial, omega: float):
    """Pairwise kernel component arrays (B11, B12, B22) and the hit mask."""
    dx = targets[:, None, 0] - sources[None, :, 0]
    dy = targets[:, None, 1] - sources[None, :, 1]
    r = np.hypot(dx, dy)
    phi1, phi2, hit = _radial_parts(r, mat, omega)
    r_safe = np.where(hit, 1.0, r)
    ex, ey = dx / r_safe, dy / r_safe
    b11 = phi1 + phi2 * ex * ex
    b22 = phi1 + phi2 * ey * ey
    b12 = phi2 * ex * ey
    return b11, b12, b22, hit


def self_cell_coefficient(cell_weight: float, mat: IsotropicMaterial,
                          omega: float) -> complex:
    """Self-interaction value per unit density for a cell of given area."""
    rc = np.sqrt(cell_weight / np.pi)
    phi1, phi2 = phi_dynamic_radial(np.array([rc]), mat, omega)
    lam_p = static_coeffs(mat.lam, mat.mu).lambda_prime
    return cell_weight * (phi1[0] + 0.5 * phi2[0] + 0.5 * lam_p)


def volume_potential(grid: ScatterGrid, density: np.ndarray, x_eval: np.ndarray,
                     mat: IsotropicMaterial, omega: float,
                     premasked: bool = False) -> np.ndarray:
    """V_omega(density) at points x_eval, with density given on grid nodes.

    The density is restricted to the inside mask (skipped when the caller
    passes ``premasked`` data); evaluation points that coincide with grid
    nodes receive the self-cell correction.
    """
    x_eval = np.atleast_2d(np.asarray(x_eval, dtype=float))
    if premasked:
        dens = np.asarray(density).reshape(-1, 2)
    else:
        dens = np.where(grid.inside[..., None], density, 0.0).reshape(-1, 2)
    w = (grid.weights2d * grid.inside).reshape(-1)
    b11, b12, b22, hit = kernel_blocks(x_eval, grid.flat_nodes, mat, omega)
    wd1, wd2 = w * dens[:, 0], w * dens[:, 1]
    out = np.stack([b11 @ wd1 + b12 @ wd2, b12 @ wd1 + b22 @ wd2], axis=-1)
    if hit.any():
        cell_w = grid.weights2d.reshape(-1)
        for p, q in zip(*np.nonzero(hit)):
            if w[q] > 0.0:
                out[p] += self_cell_coefficient(cell_w[q], mat, omega) * dens[q]
    return out


def single_layer(boundary: BoundaryGeometry, density: np.ndarray,
                 x_eval: np.ndarray, mat: IsotropicMaterial,
                 omega: float) -> np.ndarray:
    """S_omega(density) at points x_eval by the periodic trapezoidal rule."""
    x_eval = np.atleast_2d(np.asarray(x_eval, dtype=float))
    dens = np.asarray(density)
    w = boundary.jacobians * boundary.node_weight
    b11, b12, b22, _ = kernel_blocks(x_eval, boundary.points, mat, omega)
    wd1, wd2 = w * dens[:, 0], w * dens[:, 1]
    return np.stack([b11 @ wd1 + b12 @ wd2, b12 @ wd1 + b22 @ wd2], axis=-1)


def assemble_volume_blocks(grid: ScatterGrid, mat: IsotropicMaterial,
                           omega: float):
    """Component blocks (V11, V12, V22) of the volume-potential matrix.

    Each block maps masked node densities (Clenshaw-Curtis weights built in,
    outside columns zero) to potential values at all grid nodes; the diagonal
    carries the self-cell correction.
    """
    P = grid.N * grid.N
    nodes = grid.flat_nodes
    w = (grid.weights2d * grid.inside).reshape(-1)
    b11, b12, b22, hit = kernel_blocks(nodes, nodes, mat, omega)
    for b in (b11, b12, b22):
        b *= w[None, :]
    diag_idx = np.arange(P)
    cell_w = grid.weights2d.reshape(-1)
    rc = np.sqrt(cell_w / np.pi)
    phi1, phi2 = phi_dynamic_radial(rc, mat, omega)
    lam_p = static_coeffs(mat.lam, mat.mu).lambda_prime
    coeffs = np.where(w > 0.0, cell_w * (phi1 + 0.5 * phi2 + 0.5 * lam_p), 0.0)
    b11[diag_idx, diag_idx] = coeffs
    b22[diag_idx, diag_idx] = coeffs
    b12[diag_idx, diag_idx] = 0.0
    return b11, b12, b22


def assemble_volume_matrix(grid: ScatterGrid, mat: IsotropicMaterial,
                           omega: float) -> np.ndarray:
    """Full component-blocked volume-potential matrix [[V11, V12], [V12, V22]]."""
    b11, b12, b22 = assemble_volume_blocks(grid, mat, omega)
    P = grid.N * grid.N
    V = np.empty((2 * P, 2 * P), dtype=complex)
    V[:P, :P] = b11
    V[:P, P:] = b12
    V[P:, :P] = b12
    V[P:, P:] = b22
    return V


def assemble_single_layer_matrix(boundary: BoundaryGeometry, targets: np.ndarray,
                                 mat: IsotropicMaterial, omega: float) -> np.ndarray:
    """Dense matrix of S_omega from boundary densities to target points.

    Layout maps [h1_nodes, h2_nodes] to [S1_targets, S2_targets]; target
    points coinciding with boundary nodes drop that node's contribution.
    """
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    P, B = len(targets), 2 * boundary.n
    w = boundary.jacobians * boundary.node_weight
    b11, b12, b22, _ = kernel_blocks(targets, boundary.points, mat, omega)
    for b in (b11, b12, b22):
        b *= w[None, :]
    S = np.empty((2 * P, 2 * B), dtype=complex)
    S[:P, :B] = b11
    S[:P, B:] = b12
    S[P:, :B] = b12
    S[P:, B:] = b22
    return S
