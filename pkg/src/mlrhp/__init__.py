"""Steepest-descent verification toolkit for the 3x3 multiple Laguerre Riemann-Hilbert problem."""

from .harness import (AsymptoticReport, ExperimentConfig, emit, exp_edge_asymptotics, exp_outer_asymptotics,
                      exp_regularity_suite, exp_zero_distribution)
from .model import ModelDescriptor, MonicPolynomial, solve_mop

__version__ = "0.1.0"

__all__ = [
    "AsymptoticReport", "ExperimentConfig", "ModelDescriptor", "MonicPolynomial", "emit",
    "exp_edge_asymptotics", "exp_outer_asymptotics", "exp_regularity_suite", "exp_zero_distribution",
    "solve_mop",
]
