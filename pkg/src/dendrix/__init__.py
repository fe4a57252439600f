"""Pseudo-spectral solver for anisotropic dendritic crystal growth.

Energy-stable one- to three-step backward differentiation time integration
with a relaxed auxiliary energy variable, on periodic 2-D and 3-D boxes.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DendrixError,
    DivergenceError,
    GridMismatchError,
    RelaxationError,
    SnapshotFormatError,
)
from .model import ModelParams
from .spectral import Grid, RealField, SpectralField
from .stepping import BdfTableau, Stepper, StepReport

__all__ = [
    "Grid",
    "RealField",
    "SpectralField",
    "ModelParams",
    "BdfTableau",
    "Stepper",
    "StepReport",
    "DendrixError",
    "ConfigError",
    "DivergenceError",
    "GridMismatchError",
    "RelaxationError",
    "SnapshotFormatError",
    "__version__",
]
