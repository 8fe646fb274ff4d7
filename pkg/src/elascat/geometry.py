"""Scatterer geometry and collocation grid.

The scatterer is the rounded square r = q(t) = (sin^10 t + cos^10 t)^(-0.1);
its boundary carries 2n equidistant parameter nodes and the computational
square D = [-1, 1]^2 carries an N x N Chebyshev-extrema tensor grid with
Clenshaw-Curtis weights and differential-quadrature derivative matrices.
"""

from dataclasses import dataclass, field

import numpy as np


def radial_function(t):
    """Boundary radius q(t) of the rounded square."""
    s, c = np.sin(t), np.cos(t)
    return (s**10 + c**10) ** (-0.1)


def radial_function_derivative(t):
    """dq/dt, used for tangents and arc-length Jacobians."""
    s, c = np.sin(t), np.cos(t)
    g = s**10 + c**10
    gp = 10.0 * s**9 * c - 10.0 * c**9 * s
    return -0.1 * g ** (-1.1) * gp


@dataclass
class BoundaryGeometry:
    """Discretized boundary with nodes, outward normals and Jacobians."""

    n: int
    t: np.ndarray
    points: np.ndarray      # (2n, 2)
    normals: np.ndarray     # (2n, 2), unit, outward
    jacobians: np.ndarray   # (2n,) arc-length factors |x'(t)|

    @property
    def node_weight(self) -> float:
        """Trapezoidal parameter weight pi/n of the periodic rule."""
        return np.pi / self.n


def boundary_geometry(n: int) -> BoundaryGeometry:
    """Boundary discretization with 2n nodes t_j = j pi / n."""
    if n < 4:
        raise ValueError("need n >= 4 boundary nodes per half-turn")
    t = np.arange(2 * n) * np.pi / n
    q = radial_function(t)
    qp = radial_function_derivative(t)
    cos_t, sin_t = np.cos(t), np.sin(t)
    points = np.stack([q * cos_t, q * sin_t], axis=1)
    tangent = np.stack([qp * cos_t - q * sin_t, qp * sin_t + q * cos_t], axis=1)
    jac = np.hypot(tangent[:, 0], tangent[:, 1])
    # counterclockwise parametrization: rotating the tangent by -90 degrees
    # points outward
    normals = np.stack([tangent[:, 1], -tangent[:, 0]], axis=1) / jac[:, None]
    return BoundaryGeometry(n=n, t=t, points=points, normals=normals, jacobians=jac)


def cc_weights(N: int) -> np.ndarray:
    """Clenshaw-Curtis weights on N Chebyshev extrema of [-1, 1].

    Exact for all polynomials up to degree N - 1; the weights sum to 2.
    """
    n = N - 1
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k * k - 1)
        v -= np.cos(n * theta[1:-1]) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / n
    return w


def chebyshev_nodes(N: int) -> np.ndarray:
    """Ascending extrema nodes x_k = -cos((k-1) pi / (N-1)), k = 1..N."""
    return -np.cos(np.pi * np.arange(N) / (N - 1))


def barycentric_weights(N: int) -> np.ndarray:
    """Closed-form Lagrange barycentric weights of the extrema nodes."""
    lam = np.ones(N)
    lam[0] = lam[-1] = 0.5
    lam *= (-1.0) ** np.arange(N)
    return lam


def dq_matrix(N: int) -> np.ndarray:
    """First-order differential-quadrature matrix on the extrema nodes.

    Off-diagonal weights from the Lagrange barycentric form; diagonal by the
    negative row-sum rule so constants differentiate to zero exactly.
    """
    x = chebyshev_nodes(N)
    lam = barycentric_weights(N)
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    D = (lam[None, :] / lam[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def interp_matrix_1d(x_nodes: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Barycentric interpolation matrix from the grid axis to arbitrary points."""
    lam = barycentric_weights(len(x_nodes))
    pts = np.atleast_1d(np.asarray(pts, dtype=float))
    diff = pts[:, None] - x_nodes[None, :]
    hit = np.abs(diff) < 1e-14
    diff = np.where(hit, 1.0, diff)
    w = lam[None, :] / diff
    P = w / w.sum(axis=1, keepdims=True)
    exact = hit.any(axis=1)
    P[exact] = 0.0
    P[hit] = 1.0
    return P


def lowpass_matrix(x_nodes: np.ndarray, cut: int) -> np.ndarray:
    """Projector onto Chebyshev polynomials of degree < cut on the nodes.

    Anti-aliasing companion of the DQ matrices: grid-scale oscillations are
    annihilated while resolved fields pass through unchanged.
    """
    N = len(x_nodes)
    V = np.empty((N, N))
    V[:, 0] = 1.0
    V[:, 1] = x_nodes
    for mdeg in range(2, N):
        V[:, mdeg] = 2.0 * x_nodes * V[:, mdeg - 1] - V[:, mdeg - 2]
    Vi = np.linalg.inv(V)
    return V[:, :cut] @ Vi[:cut, :]


@dataclass
class ScatterGrid:
    """Chebyshev tensor grid on D = [-1, 1]^2 with the inside-Omega mask."""

    N: int
    x1d: np.ndarray          # (N,), ascending
    w1d: np.ndarray          # (N,) Clenshaw-Curtis weights
    D1: np.ndarray           # (N, N) first-derivative matrix
    D2: np.ndarray           # (N, N) second derivative (D1 @ D1)
    nodes: np.ndarray        # (N, N, 2), nodes[k, j] = (x1d[k], x1d[j])
    inside: np.ndarray       # (N, N) bool, r <= q(theta)
    cut: int = 0             # resolved Chebyshev degree bound (2/3 rule)
    weights2d: np.ndarray = field(init=False)
    lowpass: np.ndarray = field(init=False)

    def __post_init__(self):
        self.weights2d = np.outer(self.w1d, self.w1d)
        if self.cut <= 0:
            self.cut = 2 * (self.N - 1) // 3 + 1
        self.lowpass = lowpass_matrix(self.x1d, self.cut)

    def filter_field(self, values: np.ndarray) -> np.ndarray:
        """Project a (N, N) or (N, N, c) field onto the resolved subspace."""
        P = self.lowpass
        if values.ndim == 2:
            return P @ values @ P.T
        return np.stack([P @ values[..., c] @ P.T
                         for c in range(values.shape[-1])], axis=-1)

    def diff(self, values: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
        """Differential-quadrature derivative along a grid axis.

        ``values`` has shape (N, N) or (N, N, c); axis 0 is the x1 direction.
        """
        D = self.D1 if order == 1 else self.D2
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        return np.tensordot(D, values, axes=(1, axis)) if axis == 0 else \
            np.moveaxis(np.tensordot(D, values, axes=(1, axis)), 0, 1)

    def integrate(self, values: np.ndarray, mask_aware: bool = True):
        """Tensor Clenshaw-Curtis integral, optionally restricted to Omega."""
        w = self.weights2d * self.inside if mask_aware else self.weights2d
        return np.tensordot(w, values, axes=([0, 1], [0, 1]))

    def interp_matrix(self, points: np.ndarray) -> np.ndarray:
        """Interpolation matrix (P, N^2) from grid values to scattered points."""
        points = np.asarray(points, dtype=float)
        P1 = interp_matrix_1d(self.x1d, points[:, 0])
        P2 = interp_matrix_1d(self.x1d, points[:, 1])
        return np.einsum("pa,pb->pab", P1, P2).reshape(len(points), -1)

    @property
    def flat_nodes(self) -> np.ndarray:
        return self.nodes.reshape(-1, 2)


def interior_grid(N: int) -> ScatterGrid:
    """Tensor grid of N x N Chebyshev extrema with the r <= q inside test."""
    if N < 5:
        raise ValueError("need N >= 5 grid nodes per axis")
    x = chebyshev_nodes(N)
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    nodes = np.stack([X1, X2], axis=-1)
    r = np.hypot(X1, X2)
    theta = np.arctan2(X2, X1)
    inside = r <= radial_function(theta) + 1e-12
    D1 = dq_matrix(N)
    return ScatterGrid(N=N, x1d=x, w1d=cc_weights(N), D1=D1, D2=D1 @ D1,
                       nodes=nodes, inside=inside)


def dq_derivative(grid: ScatterGrid, values: np.ndarray, axis: int,
                  order: int = 1) -> np.ndarray:
    """Functional wrapper around :meth:`ScatterGrid.diff`."""
    return grid.diff(values, axis, order)


def cc_integrate(grid: ScatterGrid, values: np.ndarray, mask_aware: bool = True):
    """Functional wrapper around :meth:`ScatterGrid.integrate`."""
    return grid.integrate(values, mask_aware)
