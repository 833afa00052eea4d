"""Point-set registration with Laplacian mixture models.

The moving set supplies the centroids of a Laplacian mixture that is fitted
to the fixed set by EM; rigid (similarity) and affine transforms are
supported. Gaussian CPD and ICP are included as baselines.
"""

from .baselines import register_cpd, register_icp
from .core import (
    AffineParams,
    RegConfig,
    RegistrationResult,
    Responsibilities,
    RigidParams,
    center,
    weighted_centroids,
)
from .em import register, surrogate_objective
from .errors import (
    DegenerateGeometryError,
    EmptyTruth,
    InvalidInput,
    RegistrationError,
    SingularGeometryError,
    ZeroMassError,
)
from .estep import negative_log_likelihood

__version__ = "0.1.0"

__all__ = [
    "AffineParams",
    "DegenerateGeometryError",
    "EmptyTruth",
    "InvalidInput",
    "RegConfig",
    "RegistrationError",
    "RegistrationResult",
    "Responsibilities",
    "RigidParams",
    "SingularGeometryError",
    "ZeroMassError",
    "center",
    "negative_log_likelihood",
    "register",
    "register_cpd",
    "register_icp",
    "surrogate_objective",
    "weighted_centroids",
]
