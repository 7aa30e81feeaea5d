"""Ant on a rubber rope: trajectories, hitting times and the numerics behind them."""

__version__ = "0.1.0"

from .distributions import DistributionSpec, Kind, mean, parse_distribution, sample
from .engines import (
    HarmonicInverse,
    Method,
    SolveReport,
    TrajectoryRecord,
    deterministic_hitting_time,
    exact_fraction,
    harmonic_number,
    invert_harmonic,
    run_batch,
    simulate_trajectory,
)
from .errors import ContractError, DomainError, RopeError
from .model import ProcessSpec, RopeState, advance, progress_fraction
from .rng import Stream
from .stats import (
    BlockBoundParams,
    SurvivalCurve,
    block_lower_bound,
    choose_block_length,
    lln_diagnostic,
    mean_hitting_time,
    survival_curve,
    verify_block_bound,
)
