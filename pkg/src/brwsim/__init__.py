"""Branching random walks on Z^d in random and non-random branching media."""

from brwsim.lattice import BoundaryPolicy, LatticeWindow
from brwsim.medium import (
    Constant,
    MediumRealization,
    MediumSpec,
    SourceConfiguration,
    Weibull,
    sample_medium,
)
from brwsim.engine import EngineParams, Status, Trajectory, mu_at, simulate

__version__ = "0.1.0"

__all__ = [
    "BoundaryPolicy",
    "Constant",
    "EngineParams",
    "LatticeWindow",
    "MediumRealization",
    "MediumSpec",
    "SourceConfiguration",
    "Status",
    "Trajectory",
    "Weibull",
    "mu_at",
    "sample_medium",
    "simulate",
]
