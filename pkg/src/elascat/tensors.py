"""Small tensor algebra for 2D plane-strain elasticity.

Fourth-order tensors are stored as dense (2, 2, 2, 2) arrays so index algebra
stays one-to-one with the written formulas; packed notation is provided only
through :func:`mandel_matrix`.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AsymmetricInput, DegenerateModuli

_DELTA = np.eye(2)


@dataclass(frozen=True)
class IsotropicMaterial:
    """Background medium: Lame pair (lam, mu) and mass density rho.

    Plane strain requires mu > 0 and lam + mu >= 0.
    """

    lam: float
    mu: float
    rho: float = 1.0

    def __post_init__(self):
        if self.mu <= 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.lam + self.mu < 0.0:
            raise ValueError(f"lam + mu must be nonnegative, got {self.lam + self.mu}")
        if self.rho <= 0.0:
            raise ValueError(f"rho must be positive, got {self.rho}")


def identity4() -> np.ndarray:
    """Symmetric fourth-order identity on 2x2 symmetric matrices."""
    return 0.5 * (np.einsum("ik,jl->ijkl", _DELTA, _DELTA)
                  + np.einsum("il,jk->ijkl", _DELTA, _DELTA))


def j_tensor() -> np.ndarray:
    """Hydrostatic projector J_ijkl = delta_ij delta_kl / 2."""
    return 0.5 * np.einsum("ij,kl->ijkl", _DELTA, _DELTA)


def k_tensor() -> np.ndarray:
    """Deviatoric projector K = I - J."""
    return identity4() - j_tensor()


def make_isotropic_tensor(lam: float, mu: float) -> np.ndarray:
    """Stiffness C_ijkl = lam d_ij d_kl + mu (d_ik d_jl + d_il d_jk)."""
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    return lam * np.einsum("ij,kl->ijkl", _DELTA, _DELTA) + 2.0 * mu * identity4()


def double_contract(T: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Double inner product (T : e)_ij = T_ijkl e_kl."""
    return np.einsum("ijkl,kl->ij", T, e)


def contract44(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Double inner product of two fourth-order tensors, (A : B)_ijkl."""
    return np.einsum("ijmn,mnkl->ijkl", A, B)


def strain(grad_u: np.ndarray) -> np.ndarray:
    """Symmetric part of a displacement gradient."""
    g = np.asarray(grad_u)
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def sym4_deviation(T: np.ndarray) -> float:
    """Largest violation of the minor/major index symmetries."""
    return max(
        np.abs(T - np.einsum("jikl->ijkl", T)).max(),
        np.abs(T - np.einsum("ijlk->ijkl", T)).max(),
        np.abs(T - np.einsum("klij->ijkl", T)).max(),
    )


def poisson_plane_strain(lam: float, mu: float) -> float:
    """Poisson ratio nu = lam / (2 (lam + mu))."""
    if lam + mu == 0.0:
        raise DegenerateModuli("lam + mu = 0 leaves the Poisson ratio undefined")
    return lam / (2.0 * (lam + mu))


def bulk_modulus(lam: float, mu: float) -> float:
    """Plane-strain bulk modulus kappa = mu / (1 - nu)."""
    nu = poisson_plane_strain(lam, mu)
    if nu == 1.0:
        raise DegenerateModuli("nu = 1 makes the bulk modulus infinite")
    return mu / (1.0 - nu)


def jk_decompose(lam: float, mu: float) -> tuple[float, float]:
    """Bulk/shear pair (kappa, mu) of an isotropic Lame pair."""
    return bulk_modulus(lam, mu), mu


def jk_recompose(kappa: float, mu: float) -> np.ndarray:
    """Stiffness tensor of the (kappa, mu) pair, inverse of :func:`jk_decompose`.

    kappa = mu / (1 - nu) with nu = lam / (2 (lam + mu)) solves to
    lam = 2 mu (kappa - mu) / (2 mu - kappa), which degenerates at kappa = 2 mu.
    """
    if kappa == 2.0 * mu:
        raise DegenerateModuli("kappa = 2 mu has no finite Lame pair")
    lam = 2.0 * mu * (kappa - mu) / (2.0 * mu - kappa)
    return make_isotropic_tensor(lam, mu)


def mandel_matrix(T: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """3x3 matrix of a minor/major-symmetric fourth-order tensor.

    Row/column order (11, 22, 12) with sqrt(2) scaling on the off-diagonal
    slot and 2 T_1212 in the corner, preserving the Frobenius inner product.
    """
    T = np.asarray(T)
    scale = max(np.abs(T).max(), 1.0)
    if sym4_deviation(T) > tol * scale:
        raise AsymmetricInput("tensor violates minor/major symmetry beyond tolerance")
    r2 = np.sqrt(2.0)
    return np.array([
        [T[0, 0, 0, 0], T[0, 0, 1, 1], r2 * T[0, 0, 0, 1]],
        [T[1, 1, 0, 0], T[1, 1, 1, 1], r2 * T[1, 1, 0, 1]],
        [r2 * T[0, 1, 0, 0], r2 * T[0, 1, 1, 1], 2.0 * T[0, 1, 0, 1]],
    ])


def wavenumbers(mat: IsotropicMaterial, omega: float) -> tuple[float, float]:
    """Longitudinal and transversal wavenumbers (k_p, k_s) at frequency omega."""
    if omega < 0.0:
        raise ValueError("omega must be nonnegative")
    k_p = omega * np.sqrt(mat.rho / (mat.lam + 2.0 * mat.mu))
    k_s = omega * np.sqrt(mat.rho / mat.mu)
    return k_p, k_s
