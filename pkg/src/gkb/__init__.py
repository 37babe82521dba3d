"""Gaussian-measurement lower bounds on the secret-key capacity of bosonic Gaussian channels."""

from .bounds import (
    BoundResult,
    Direction,
    coherent_info,
    delta_of_gamma,
    eve_eigs_closed,
    finite_mu_coherent_info,
    finite_mu_delta,
    lower_bound,
    maximize_delta,
    upper_bound,
)
from .channels import AddedNoise, ThermalAmp, ThermalLoss, build_joint_state, make_channel
from .errors import DomainError, NonMonotoneError, NumericalError, SingularBlockError
from .optimize import OptimizerOptions
from .symplectic import CovarianceMatrix, MeasurementSpec, Party, symplectic_eigenvalues, thermal_entropy
from .thresholds import Axis, SweepGrid, ThresholdQuery, run_sweep, security_threshold, threshold_of_info

__version__ = "0.1.0"

__all__ = [
    "AddedNoise",
    "Axis",
    "BoundResult",
    "CovarianceMatrix",
    "Direction",
    "DomainError",
    "MeasurementSpec",
    "NonMonotoneError",
    "NumericalError",
    "OptimizerOptions",
    "Party",
    "SingularBlockError",
    "SweepGrid",
    "ThermalAmp",
    "ThermalLoss",
    "ThresholdQuery",
    "build_joint_state",
    "coherent_info",
    "delta_of_gamma",
    "eve_eigs_closed",
    "finite_mu_coherent_info",
    "finite_mu_delta",
    "lower_bound",
    "make_channel",
    "maximize_delta",
    "run_sweep",
    "security_threshold",
    "symplectic_eigenvalues",
    "thermal_entropy",
    "threshold_of_info",
    "upper_bound",
]
