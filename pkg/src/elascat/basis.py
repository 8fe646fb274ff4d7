"""Gaussian tensor basis for the unknown Lame parameter field.

lambda*(x) = sum_kj L_kj exp(-(K pi / 4) [(x1 - z_k)^2 + (x2 - z_j)^2]) with
K x K centers z_k = -1 + 2 (k - 1)/(K - 1) and the width exponent K pi / 4.
Coefficient vectors are k-major: flat index (k - 1) K + (j - 1).
"""

from dataclasses import dataclass

import numpy as np


def basis_centers(K: int) -> np.ndarray:
    """Centers z_k = -1 + 2 (k - 1)/(K - 1) for k = 1..K."""
    if K < 2:
        raise ValueError("need at least two centers per axis")
    return np.linspace(-1.0, 1.0, K)


def width_exponent(K: int) -> float:
    return K * np.pi / 4.0


@dataclass
class LambdaField:
    """Coefficient matrix of the separable Gaussian basis on D = [-1, 1]^2."""

    K: int
    coeffs: np.ndarray     # (K, K) real

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.K, self.K):
            raise ValueError(f"coefficients must be {self.K} x {self.K}")

    @property
    def centers(self) -> np.ndarray:
        return basis_centers(self.K)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Field values at points of shape (..., 2)."""
        return design_matrix(points, self.K) @ self.coeffs.reshape(-1)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """Analytic gradient at points of shape (..., 2) -> (..., 2)."""
        points = np.asarray(points, dtype=float)
        flat = points.reshape(-1, 2)
        z = self.centers
        a = width_exponent(self.K)
        g1 = np.exp(-a * (flat[:, 0:1] - z[None, :]) ** 2)      # (P, K)
        g2 = np.exp(-a * (flat[:, 1:2] - z[None, :]) ** 2)
        d1 = -2.0 * a * (flat[:, 0:1] - z[None, :]) * g1
        d2 = -2.0 * a * (flat[:, 1:2] - z[None, :]) * g2
        gx = np.einsum("pk,pj,kj->p", d1, g2, self.coeffs)
        gy = np.einsum("pk,pj,kj->p", g1, d2, self.coeffs)
        return np.stack([gx, gy], axis=-1).reshape(points.shape)


def design_matrix(points: np.ndarray, K: int) -> np.ndarray:
    """Evaluation matrix (P, K^2) of the k-major basis at flattened points."""
    points = np.asarray(points, dtype=float)
    flat = points.reshape(-1, 2)
    z = basis_centers(K)
    a = width_exponent(K)
    g1 = np.exp(-a * (flat[:, 0:1] - z[None, :]) ** 2)
    g2 = np.exp(-a * (flat[:, 1:2] - z[None, :]) ** 2)
    return np.einsum("pk,pj->pkj", g1, g2).reshape(len(flat), K * K)


def eval_lambda_field(field: LambdaField, points: np.ndarray) -> np.ndarray:
    """Functional wrapper for :meth:`LambdaField.evaluate`."""
    pts = np.asarray(points, dtype=float)
    return field.evaluate(pts).reshape(pts.shape[:-1])


def fit_constant(value: float, K: int, points: np.ndarray) -> LambdaField:
    """Least-squares coefficients reproducing a constant field on the points."""
    A = design_matrix(points, K)
    rhs = np.full(A.shape[0], float(value))
    coeffs, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    return LambdaField(K=K, coeffs=coeffs.reshape(K, K))
