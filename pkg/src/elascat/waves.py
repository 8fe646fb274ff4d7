"""Time-harmonic incident plane waves."""

from dataclasses import dataclass

import numpy as np

from .tensors import IsotropicMaterial, wavenumbers

# 90 degree clockwise rotation; the S-wave polarization is -Q d.
ROTATION_Q = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class PlaneWave:
    """Incident plane wave of kind 'p' (longitudinal) or 's' (transversal)."""

    kind: str
    direction: np.ndarray
    wavenumber: float

    def __post_init__(self):
        if self.kind not in ("p", "s"):
            raise ValueError(f"kind must be 'p' or 's', got {self.kind!r}")
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (2,) or abs(np.hypot(d[0], d[1]) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit 2-vector")
        object.__setattr__(self, "direction", d)

    @property
    def polarization(self) -> np.ndarray:
        """Unit polarization vector: d for P, -Q d for S."""
        if self.kind == "p":
            return self.direction
        return -ROTATION_Q @ self.direction


def plane_wave(kind: str, angle: float, mat: IsotropicMaterial, omega: float) -> PlaneWave:
    """Plane wave with incidence direction (cos angle, sin angle)."""
    k_p, k_s = wavenumbers(mat, omega)
    d = np.array([np.cos(angle), np.sin(angle)])
    return PlaneWave(kind, d, k_p if kind == "p" else k_s)


def eval_plane_wave(w: PlaneWave, x: np.ndarray) -> np.ndarray:
    """Displacement of the wave at points x with shape (..., 2).

    P-wave: d exp(i k_p d.x).  S-wave: -Q d exp(i k_s d.x).
    """
    x = np.asarray(x, dtype=float)
    phase = np.exp(1j * w.wavenumber * (x @ w.direction))
    return phase[..., None] * w.polarization
