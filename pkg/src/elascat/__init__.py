"""Forward and inverse elastic scattering for a 2D plane-strain inhomogeneity.

The library covers three pieces that share one small tensor toolbox:

* a spectral solver for the static eigenstrain (equivalent inclusion)
  equation on a periodic cell,
* a collocation solver for the low-frequency elastodynamic
  Lippmann-Schwinger equation with far-field synthesis,
* a Tikhonov-regularized Newton iteration that recovers the spatially
  varying Lame parameter of the scatterer from far-field data.
"""

__version__ = "0.1.0"

from .errors import (
    AsymmetricInput,
    ConfigError,
    DegenerateModuli,
    Diverged,
    ElascatError,
    NoConvergence,
    NotInvertible,
    SingularContrast,
    SingularPoint,
    SingularSystem,
    ZeroTensorContrast,
)
from .tensors import (
    IsotropicMaterial,
    double_contract,
    identity4,
    j_tensor,
    jk_decompose,
    jk_recompose,
    k_tensor,
    make_isotropic_tensor,
    mandel_matrix,
    strain,
    wavenumbers,
)
from .waves import PlaneWave, eval_plane_wave, plane_wave
