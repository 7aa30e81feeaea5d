"""Monte Carlo trajectories of the stochastic process up to the hitting time."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from numbers import Integral
from typing import Optional

from ..distributions import sample, sample_many
from ..errors import ContractError
from ..model import ProcessSpec, RopeState, advance
from ..rng import STEP_LANE, STRETCH_LANE, Stream, check_seed

DEFAULT_CAP = 10 ** 7


@dataclass(frozen=True)
class TrajectoryRecord:
    """Outcome of one trajectory.

    ``hitting_time`` is ``None`` when the ant had not arrived after ``cap``
    seconds (censored); ``final_fraction`` is then the fraction at ``cap``.
    """

    substream_id: int
    hitting_time: Optional[int]
    cap: int
    final_fraction: float

    @property
    def censored(self) -> bool:
        return self.hitting_time is None


def _check_cap(cap) -> int:
    if isinstance(cap, bool) or not isinstance(cap, Integral) or cap < 1:
        raise ContractError(f"cap must be a positive integer, got {cap!r}")
    return int(cap)


def _streams(master_seed: int, substream_id: int, namespace: int) -> tuple[Stream, Stream]:
    return (Stream(master_seed, substream_id, STEP_LANE, namespace),
            Stream(master_seed, substream_id, STRETCH_LANE, namespace))


def simulate_trajectory(spec: ProcessSpec, substream_id: int, master_seed: int,
                        cap: int = DEFAULT_CAP, namespace: int = 0) -> TrajectoryRecord:
    """Run one trajectory until the fraction reaches 1 or ``cap`` seconds pass.

    Step ``X_i`` is draw ``i`` of the step lane and stretch ``L_{i+1}`` is
    draw ``i`` of the stretch lane, both keyed by ``(master_seed,
    namespace, substream_id)``.
    """
    cap = _check_cap(cap)
    check_seed(master_seed)
    steps, stretches = _streams(master_seed, substream_id, namespace)
    step_dist, stretch_dist = spec.step_dist, spec.stretch_dist
    state = RopeState.initial(spec.l0)
    for _ in range(cap):
        state = advance(state, sample(step_dist, steps), sample(stretch_dist, stretches))
        if state.terminal:
            return TrajectoryRecord(substream_id, state.t, cap, state.fraction)
    return TrajectoryRecord(substream_id, None, cap, state.fraction)


def trajectory_draws(spec: ProcessSpec, substream_id: int, master_seed: int, n: int,
                     namespace: int = 0) -> tuple[list[float], list[float]]:
    """The first ``n`` steps ``X_0..X_{n-1}`` and stretches ``L_1..L_n`` of a substream.

    These are exactly the values :func:`simulate_trajectory` consumes.
    """
    steps, stretches = _streams(master_seed, substream_id, namespace)
    return sample_many(spec.step_dist, steps, n), sample_many(spec.stretch_dist, stretches, n)


def _run_range(spec: ProcessSpec, lo: int, hi: int, master_seed: int, cap: int,
               namespace: int) -> list[TrajectoryRecord]:
    return [simulate_trajectory(spec, i, master_seed, cap, namespace) for i in range(lo, hi)]


def run_batch(spec: ProcessSpec, n_trajectories: int, master_seed: int, cap: int = DEFAULT_CAP,
              parallelism_hint: int = 1, namespace: int = 0) -> list[TrajectoryRecord]:
    """Records for substreams ``0 .. n_trajectories-1`` in id order.

    The result does not depend on ``parallelism_hint``: each record is a
    function of ``(master_seed, namespace, substream_id)`` only.
    """
    if isinstance(n_trajectories, bool) or not isinstance(n_trajectories, Integral) or n_trajectories < 1:
        raise ContractError(f"n_trajectories must be a positive integer, got {n_trajectories!r}")
    if parallelism_hint < 1:
        raise ContractError("parallelism_hint must be at least 1")
    cap = _check_cap(cap)
    check_seed(master_seed)
    workers = min(int(parallelism_hint), n_trajectories)
    if workers == 1:
        return _run_range(spec, 0, n_trajectories, master_seed, cap, namespace)

    n_chunks = min(n_trajectories, 4 * workers)
    bounds = [n_trajectories * k // n_chunks for k in range(n_chunks + 1)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_range, spec, lo, hi, master_seed, cap, namespace)
                   for lo, hi in zip(bounds, bounds[1:])]
        records: list[TrajectoryRecord] = []
        for fut in futures:
            records.extend(fut.result())
    return records
