"""Steady-state Gaussian entanglement and squeezing in a hybrid cavity.

A driven cavity mode couples to a membrane in the middle and to the
Bogoliubov modes of two Bose-Einstein condensates, one on each side. The
package solves the mean fields, linearizes the fluctuations, solves the
Lyapunov equation for the stationary covariance matrix and evaluates
logarithmic negativities and quadrature squeezing.
"""

__version__ = "0.1.0"

from .dynamics import build_diffusion, build_drift, is_stable, routh_hurwitz, spectral_abscissa
from .errors import (ConfigError, InvalidParameterError, NoPhysicalRootError, OptomechError,
                     UnstableDriftError)
from .lyapunov import is_physical, physicality_margin, solve_lyapunov
from .measures import Bipartition, MeasureSet, log_negativity, measure_point, squeezing_params
from .model import DerivedParams, Geometry, PhysicalParams, derive_params, validity_check
from .steadystate import MeanFields, select_branch, solve_mean_fields
from .sweep import evaluate_point, grid_sw, sweep_detuning

__all__ = [
    "__version__",
    "PhysicalParams",
    "DerivedParams",
    "Geometry",
    "derive_params",
    "validity_check",
    "MeanFields",
    "solve_mean_fields",
    "select_branch",
    "build_drift",
    "build_diffusion",
    "spectral_abscissa",
    "is_stable",
    "routh_hurwitz",
    "solve_lyapunov",
    "physicality_margin",
    "is_physical",
    "Bipartition",
    "MeasureSet",
    "log_negativity",
    "squeezing_params",
    "measure_point",
    "evaluate_point",
    "sweep_detuning",
    "grid_sw",
    "OptomechError",
    "InvalidParameterError",
    "ConfigError",
    "NoPhysicalRootError",
    "UnstableDriftError",
]
