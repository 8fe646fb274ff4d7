"""Fundamental tensors of 2D elastostatics and elastodynamics.

Fourier transform convention: F{f}(k) = integral f(x) exp(+i k.x) dx.
Every transformed kernel used here is even in x, so no sign ambiguity from
the convention survives in the formulas.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularPoint
from .hankel import hankel1_0, hankel1_1
from .tensors import IsotropicMaterial, wavenumbers

_I2 = np.eye(2)


@dataclass(frozen=True)
class StaticCoeffs:
    """Coefficients (lam', mu') of the plane-strain static fundamental tensor."""

    lambda_prime: float
    mu_prime: float


def static_coeffs(lam: float, mu: float) -> StaticCoeffs:
    """lam' = (lam+3mu)/(4 pi mu (lam+2mu)), mu' = (lam+mu)/(4 pi mu (lam+2mu))."""
    if mu <= 0.0 or lam + 2.0 * mu <= 0.0:
        raise ValueError("require mu > 0 and lam + 2 mu > 0")
    den = 4.0 * np.pi * mu * (lam + 2.0 * mu)
    return StaticCoeffs((lam + 3.0 * mu) / den, (lam + mu) / den)


def phi_static(x: np.ndarray, c: StaticCoeffs) -> np.ndarray:
    """Static fundamental tensor lam' ln(1/|x|) I + mu' xhat (x) xhat."""
    x = np.asarray(x, dtype=float)
    r = np.hypot(x[0], x[1])
    if r == 0.0:
        raise SingularPoint("static kernel is singular at x = 0")
    xhat = x / r
    return c.lambda_prime * np.log(1.0 / r) * _I2 + c.mu_prime * np.outer(xhat, xhat)


def phi_dynamic_radial(r, mat: IsotropicMaterial, omega: float):
    """Radial parts (phi1, phi2) with Phi_omega(x) = phi1(r) I + phi2(r) xhat (x) xhat.

    From the Hankel form of the kernel with the dyadic gradient expanded as
    grad grad^T f(r) = f''(r) xhat xhat + (f'(r)/r)(I - xhat xhat) where
    f(r) = H0(k_s r) - H0(k_p r).  Vectorized over r > 0.
    """
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise SingularPoint("dynamic kernel is singular at x = 0")
    k_p, k_s = wavenumbers(mat, omega)
    rho_w2 = mat.rho * omega * omega
    h0_s, h1_s = hankel1_0(k_s * r), hankel1_1(k_s * r)
    h0_p, h1_p = hankel1_0(k_p * r), hankel1_1(k_p * r)
    fp = -k_s * h1_s + k_p * h1_p
    # H1'(z) = H0(z) - H1(z)/z
    fpp = -k_s**2 * (h0_s - h1_s / (k_s * r)) + k_p**2 * (h0_p - h1_p / (k_p * r))
    phi1 = 0.25j * h0_s / mat.mu + 0.25j * fp / (rho_w2 * r)
    phi2 = 0.25j * (fpp - fp / r) / rho_w2
    return phi1, phi2


def phi_dynamic(x: np.ndarray, mat: IsotropicMaterial, omega: float) -> np.ndarray:
    """Dynamic fundamental tensor at a single point x != 0."""
    x = np.asarray(x, dtype=float)
    r = np.hypot(x[0], x[1])
    if r == 0.0:
        raise SingularPoint("dynamic kernel is singular at x = 0")
    phi1, phi2 = phi_dynamic_radial(np.array([r]), mat, omega)
    xhat = x / r
    return phi1[0] * _I2 + phi2[0] * np.outer(xhat, xhat)


def phi_hat(k: np.ndarray, c: StaticCoeffs) -> np.ndarray:
    """Fourier transform of the static fundamental tensor at k != 0."""
    k = np.asarray(k, dtype=float)
    n2 = k[0] * k[0] + k[1] * k[1]
    if n2 == 0.0:
        raise SingularPoint("transform is singular at k = 0")
    out = np.empty((2, 2))
    out[0, 0] = c.lambda_prime / n2 + c.mu_prime * (k[1] ** 2 - k[0] ** 2) / n2**2
    out[1, 1] = c.lambda_prime / n2 + c.mu_prime * (k[0] ** 2 - k[1] ** 2) / n2**2
    out[0, 1] = out[1, 0] = -2.0 * c.mu_prime * k[0] * k[1] / n2**2
    return out


def symbol_kernel_hat(k: np.ndarray, c: StaticCoeffs) -> np.ndarray:
    """Transform of the symmetrized strongly singular kernel, degree 0 in k.

    S_hat_ijkl = -(k_j k_l P_ik + k_j k_k P_il + k_i k_l P_jk + k_i k_k P_jl)/4
    with P = phi_hat(k); carries all minor/major symmetries by construction.
    """
    k = np.asarray(k, dtype=float)
    P = phi_hat(k, c)
    kk_P = np.einsum("j,l,ik->ijkl", k, k, P)
    return -0.25 * (kk_P
                    + np.einsum("ijlk->ijkl", kk_P)
                    + np.einsum("jikl->ijkl", kk_P)
                    + np.einsum("jilk->ijkl", kk_P))


@dataclass(frozen=True)
class FarFieldCoeffs:
    """Scalar amplitudes of the P/S far-field representations."""

    beta_p: complex
    beta_s: complex


def farfield_coeffs(mat: IsotropicMaterial, omega: float) -> FarFieldCoeffs:
    """beta_a = exp(i pi/4) / (modulus * sqrt(8 pi k_a)) for a = p, s."""
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    k_p, k_s = wavenumbers(mat, omega)
    phase = np.exp(0.25j * np.pi)
    return FarFieldCoeffs(
        beta_p=phase / ((mat.lam + 2.0 * mat.mu) * np.sqrt(8.0 * np.pi * k_p)),
        beta_s=phase / (mat.mu * np.sqrt(8.0 * np.pi * k_s)),
    )


def projector_p(xhat: np.ndarray) -> np.ndarray:
    """Longitudinal projector xhat (x) xhat."""
    xhat = np.asarray(xhat, dtype=float)
    return np.einsum("...i,...j->...ij", xhat, xhat)


def projector_s(xhat: np.ndarray) -> np.ndarray:
    """Transversal projector I - xhat (x) xhat."""
    return _I2 - projector_p(xhat)
