"""Trajectory simulation and the deterministic (constant-parameter) solver."""

from .exact import exact_constant_prefix, exact_fraction, exact_prefix_fractions
from .harmonic import (
    EULER_GAMMA,
    HarmonicInverse,
    Method,
    SolveReport,
    deterministic_hitting_time,
    digamma,
    digamma_difference,
    harmonic_number,
    invert_harmonic,
)
from .trajectory import (
    DEFAULT_CAP,
    TrajectoryRecord,
    run_batch,
    simulate_trajectory,
    trajectory_draws,
)

__all__ = [
    "DEFAULT_CAP", "EULER_GAMMA", "HarmonicInverse", "Method", "SolveReport",
    "TrajectoryRecord", "deterministic_hitting_time", "digamma", "digamma_difference",
    "exact_constant_prefix", "exact_fraction", "exact_prefix_fractions", "harmonic_number",
    "invert_harmonic", "run_batch", "simulate_trajectory", "trajectory_draws",
]
