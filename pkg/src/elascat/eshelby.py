"""Plane-strain static eigenstrain apparatus.

Constant-tensor algebra (jump tensor, contrast inverse, invertibility
classification, Fourier symbol with its closed-form determinant) plus a
spectral solver for the eigenstrain equation on a periodic square cell.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    NoConvergence,
    NotInvertible,
    SingularContrast,
    SingularPoint,
    ZeroTensorContrast,
)
from .greens import StaticCoeffs, static_coeffs, symbol_kernel_hat
from .tensors import j_tensor, k_tensor, mandel_matrix


@dataclass(frozen=True)
class ContrastModuli:
    """Bulk/shear contrast (kappa* - kappa, mu* - mu) of the inclusion."""

    d_kappa: float
    d_mu: float

    def __post_init__(self):
        if self.d_kappa == 0.0 or self.d_mu == 0.0:
            raise SingularContrast("contrast requires kappa* != kappa and mu* != mu")


@dataclass(frozen=True)
class AlphaBeta:
    """J/K coefficients of the constant tensor M = DeltaC^-1 + gamma."""

    alpha: float
    beta: float


class Invertibility(enum.Enum):
    FULL_RANK = "FullRank"
    J_DEGENERATE = "JDegenerate"
    K_DEGENERATE = "KDegenerate"
    ZERO_TENSOR = "ZeroTensor"


@dataclass(frozen=True)
class InvertibilityClass:
    variant: Invertibility
    alpha: float
    beta: float


def gamma_jk_coeffs(lam: float, mu: float) -> tuple[float, float]:
    """J and K coefficients of the jump tensor gamma."""
    den = 4.0 * mu * (lam + 2.0 * mu)
    return (2.0 * lam + 6.0 * mu) / den, -(lam + mu) / den


def gamma_tensor(lam: float, mu: float) -> np.ndarray:
    """Jump tensor of the strongly singular volume operator.

    gamma_ijkl = (3 lam + 7 mu)/(8 mu (lam+2mu)) d_ij d_kl
               - (lam + mu)/(8 mu (lam+2mu)) (d_ik d_jl + d_il d_jk)
    """
    if mu <= 0.0 or lam + 2.0 * mu <= 0.0:
        raise ValueError("require mu > 0 and lam + 2 mu > 0")
    g_j, g_k = gamma_jk_coeffs(lam, mu)
    return g_j * j_tensor() + g_k * k_tensor()


def contrast_tensor(c: ContrastModuli) -> np.ndarray:
    """Stiffness contrast DeltaC = 2 d_kappa J + 2 d_mu K."""
    return 2.0 * c.d_kappa * j_tensor() + 2.0 * c.d_mu * k_tensor()


def contrast_inverse(c: ContrastModuli) -> np.ndarray:
    """Sherman-Morrison inverse DeltaC^-1 = J/(2 d_kappa) + K/(2 d_mu)."""
    return (0.5 / c.d_kappa) * j_tensor() + (0.5 / c.d_mu) * k_tensor()


def alpha_beta(lam: float, mu: float, c: ContrastModuli) -> AlphaBeta:
    """Coefficients of M = DeltaC^-1 + gamma = alpha J + beta K.

    alpha = 1/(2 d_kappa) + (lam + 3 mu)/(2 mu (lam + 2 mu))
    beta  = 1/(2 d_mu)    - (lam + mu)/(4 mu (lam + 2 mu))
    """
    g_j, g_k = gamma_jk_coeffs(lam, mu)
    return AlphaBeta(0.5 / c.d_kappa + g_j, 0.5 / c.d_mu + g_k)


def degenerate_contrast(lam: float, mu: float) -> ContrastModuli:
    """The exceptional contrast pair with alpha = beta = 0.

    kappa - kappa* = mu (lam + 2 mu)/(lam + 3 mu) and
    mu* - mu = 2 mu (lam + 2 mu)/(lam + mu).
    """
    return ContrastModuli(
        d_kappa=-mu * (lam + 2.0 * mu) / (lam + 3.0 * mu),
        d_mu=2.0 * mu * (lam + 2.0 * mu) / (lam + mu),
    )


def classify_invertibility(ab: AlphaBeta, tol: float) -> InvertibilityClass:
    """Rank classification of M = alpha J + beta K within tolerance tol."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    a_zero = abs(ab.alpha) <= tol
    b_zero = abs(ab.beta) <= tol
    if a_zero and b_zero:
        variant = Invertibility.ZERO_TENSOR
    elif a_zero:
        variant = Invertibility.J_DEGENERATE
    elif b_zero:
        variant = Invertibility.K_DEGENERATE
    else:
        variant = Invertibility.FULL_RANK
    return InvertibilityClass(variant, ab.alpha, ab.beta)


def m_tensor(lam: float, mu: float, c: ContrastModuli) -> np.ndarray:
    """Constant tensor M = alpha J + beta K."""
    ab = alpha_beta(lam, mu, c)
    return ab.alpha * j_tensor() + ab.beta * k_tensor()


def m_inverse(ab: AlphaBeta, tol: float = 1e-14) -> np.ndarray:
    """Inverse M^-1 = J/alpha + K/beta; requires full rank."""
    cls = classify_invertibility(ab, tol)
    if cls.variant is not Invertibility.FULL_RANK:
        raise NotInvertible(f"M is {cls.variant.value}; no J/K inverse")
    return (1.0 / ab.alpha) * j_tensor() + (1.0 / ab.beta) * k_tensor()


def symbol_matrix(k: np.ndarray, ab: AlphaBeta, c: StaticCoeffs) -> np.ndarray:
    """Symbol Psi(k) = M - S_hat(k) in 3x3 Mandel form."""
    k = np.asarray(k, dtype=float)
    if k[0] == 0.0 and k[1] == 0.0:
        raise SingularPoint("symbol undefined at k = 0")
    M = ab.alpha * j_tensor() + ab.beta * k_tensor()
    return mandel_matrix(M - symbol_kernel_hat(k, c))


def symbol_det_closed(ab: AlphaBeta, c: StaticCoeffs) -> float:
    """Closed form of det Psi(k); independent of k."""
    a, b = ab.alpha, ab.beta
    lp, mp = c.lambda_prime, c.mu_prime
    return a * b * b + a * b * lp + 0.5 * b * b * (lp - mp) \
        + 0.25 * (a + b) * (lp - mp) * (lp + mp)


@dataclass
class EshelbyResult:
    """Eigenstrain field on the periodic cell with iteration diagnostics."""

    h: np.ndarray            # (R, R, 2, 2), zero off the inclusion support
    support: np.ndarray      # (R, R) bool
    residuals: np.ndarray    # relative residual per iteration, monotone goal
    iterations: int


def symbol_kernel_mandel_grid(k1, k2, coeffs: StaticCoeffs) -> np.ndarray:
    """Mandel 3x3 form of the symmetrized kernel transform, vectorized over k.

    Expanded components of S_hat contracted with the transform of the static
    fundamental tensor; zero-frequency entries are returned as zero.
    """
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    n2 = k1 * k1 + k2 * k2
    safe = np.where(n2 == 0.0, 1.0, n2)
    lp, mp = coeffs.lambda_prime, coeffs.mu_prime
    p11 = lp / safe + mp * (k2 * k2 - k1 * k1) / safe**2
    p22 = lp / safe + mp * (k1 * k1 - k2 * k2) / safe**2
    p12 = -2.0 * mp * k1 * k2 / safe**2
    s1111 = -k1 * k1 * p11
    s2222 = -k2 * k2 * p22
    s1122 = -k1 * k2 * p12
    s1112 = -0.5 * (k1 * k2 * p11 + k1 * k1 * p12)
    s2212 = -0.5 * (k2 * k2 * p12 + k1 * k2 * p22)
    s1212 = -0.25 * (k2 * k2 * p11 + 2.0 * k1 * k2 * p12 + k1 * k1 * p22)
    r2 = np.sqrt(2.0)
    out = np.empty(np.broadcast(k1, k2).shape + (3, 3))
    out[..., 0, 0] = s1111
    out[..., 1, 1] = s2222
    out[..., 0, 1] = out[..., 1, 0] = s1122
    out[..., 0, 2] = out[..., 2, 0] = r2 * s1112
    out[..., 1, 2] = out[..., 2, 1] = r2 * s2212
    out[..., 2, 2] = 2.0 * s1212
    out[n2 == 0.0] = 0.0
    return out


def _symbol_multiplier(R: int, coeffs: StaticCoeffs) -> np.ndarray:
    """Mandel-form multiplier of the singular operator on the R x R torus.

    The symbol is homogeneous of degree zero, so only the integer frequency
    directions matter; the zero mode is set to zero (the mean eigenstrain is
    constrained through M alone).
    """
    freqs = np.fft.fftfreq(R) * R
    K1, K2 = np.meshgrid(freqs, freqs, indexing="ij")
    return symbol_kernel_mandel_grid(K1, K2, coeffs)


def solve_periodic_eshelby(
    d_kappa,
    d_mu,
    eps_inc: np.ndarray,
    lam: float,
    mu: float,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    method: str = "fixed_point",
    class_tol: float = 1e-12,
) -> EshelbyResult:
    """Solve (DeltaC^-1 + gamma) : h - A(h) = eps_inc on a periodic cell.

    Parameters
    ----------
    d_kappa, d_mu : (R, R) arrays
        Per-cell contrast moduli; cells where both vanish are outside the
        inclusion and carry h = 0.  R must be a power of two.
    eps_inc : (2, 2) symmetric array
        Uniform incident strain.
    method : 'fixed_point' or 'direct'
        Richardson iteration h <- h + M^-1 : (rhs - M:h + A(h)), or a dense
        solve over the support degrees of freedom (supports R <= 64).

    The singular operator A acts spectrally through its Mandel-form symbol.
    """
    d_kappa = np.asarray(d_kappa, dtype=float)
    d_mu = np.asarray(d_mu, dtype=float)
    R = d_kappa.shape[0]
    if d_kappa.shape != (R, R) or d_mu.shape != (R, R):
        raise ValueError("contrast fields must be square and equally shaped")
    if R & (R - 1):
        raise ValueError("grid resolution must be a power of two")
    eps_inc = np.asarray(eps_inc, dtype=float)

    support = (d_kappa != 0.0) | (d_mu != 0.0)
    if ((d_kappa == 0.0) ^ (d_mu == 0.0)).any():
        raise SingularContrast("cells need both contrasts nonzero or both zero")

    coeffs = static_coeffs(lam, mu)
    g_j, g_k = gamma_jk_coeffs(lam, mu)
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.where(support, 0.5 / np.where(support, d_kappa, 1.0) + g_j, 0.0)
        beta = np.where(support, 0.5 / np.where(support, d_mu, 1.0) + g_k, 0.0)
    on = support
    if np.any((np.abs(alpha[on]) <= class_tol) & (np.abs(beta[on]) <= class_tol)):
        raise ZeroTensorContrast("alpha = beta = 0 somewhere on the support")
    if np.any(np.abs(alpha[on]) <= class_tol) or np.any(np.abs(beta[on]) <= class_tol):
        raise NotInvertible("contrast field must be full rank on its support")

    mult = _symbol_multiplier(R, coeffs)

    # Mandel 3-vector fields (h11, h22, sqrt2 h12); J/K act diagonally there.
    r2 = np.sqrt(2.0)
    e_vec = np.array([eps_inc[0, 0], eps_inc[1, 1], r2 * eps_inc[0, 1]])

    def apply_m(v):
        hyd = 0.5 * (v[..., 0] + v[..., 1])
        out = np.empty_like(v)
        out[..., 0] = alpha * hyd + beta * (v[..., 0] - hyd)
        out[..., 1] = alpha * hyd + beta * (v[..., 1] - hyd)
        out[..., 2] = beta * v[..., 2]
        return out

    def apply_m_inv(v):
        hyd = 0.5 * (v[..., 0] + v[..., 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            ia = np.where(on, 1.0 / np.where(on, alpha, 1.0), 0.0)
            ib = np.where(on, 1.0 / np.where(on, beta, 1.0), 0.0)
        out = np.empty_like(v)
        out[..., 0] = ia * hyd + ib * (v[..., 0] - hyd)
        out[..., 1] = ia * hyd + ib * (v[..., 1] - hyd)
        out[..., 2] = ib * v[..., 2]
        return out

    def apply_a(v):
        v_hat = np.fft.fft2(v, axes=(0, 1))
        a_hat = np.einsum("abij,abj->abi", mult, v_hat)
        return np.real(np.fft.ifft2(a_hat, axes=(0, 1)))

    rhs = np.where(on[..., None], e_vec, 0.0)
    nrm_rhs = np.linalg.norm(rhs)

    def residual(h_vec):
        r = rhs - (apply_m(h_vec) - apply_a(h_vec))
        r[~on] = 0.0
        return r

    if nrm_rhs == 0.0 or not on.any():
        return EshelbyResult(np.zeros((R, R, 2, 2)), on, np.zeros(0), 0)

    if method == "direct":
        dof = np.argwhere(on)
        ndof = 3 * len(dof)
        if ndof > 20_000:
            raise ValueError("direct solve limited to small supports")
        A = np.zeros((ndof, ndof))
        for col in range(ndof):
            basis = np.zeros((R, R, 3))
            cell = dof[col // 3]
            basis[cell[0], cell[1], col % 3] = 1.0
            img = apply_m(basis) - apply_a(basis)
            A[:, col] = img[on].reshape(-1)
        sol = np.linalg.solve(A, rhs[on].reshape(-1))
        h_vec = np.zeros((R, R, 3))
        h_vec[on] = sol.reshape(-1, 3)
        res = [np.linalg.norm(residual(h_vec)) / nrm_rhs]
        result_iters = 1
    else:
        h_vec = np.zeros((R, R, 3))
        res = []
        result_iters = 0
        for it in range(max_iter):
            r = residual(h_vec)
            rel = np.linalg.norm(r) / nrm_rhs
            res.append(rel)
            if rel <= tol:
                result_iters = it
                break
            step = apply_m_inv(r)
            step[~on] = 0.0
            h_vec = h_vec + step
        else:
            raise NoConvergence(f"no convergence in {max_iter} iterations "
                                f"(relative residual {res[-1]:.3e})")

    h = np.zeros((R, R, 2, 2))
    h[..., 0, 0] = h_vec[..., 0]
    h[..., 1, 1] = h_vec[..., 1]
    h[..., 0, 1] = h[..., 1, 0] = h_vec[..., 2] / r2
    return EshelbyResult(h, on, np.asarray(res), result_iters)


def disc_contrast(R: int, radius: float, d_kappa: float, d_mu: float):
    """Constant-contrast disc centered in the unit periodic cell [-1, 1)^2."""
    x = -1.0 + 2.0 * (np.arange(R) + 0.5) / R
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    inside = X1**2 + X2**2 <= radius**2
    return np.where(inside, d_kappa, 0.0), np.where(inside, d_mu, 0.0)
