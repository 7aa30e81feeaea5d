"""Estimators for the hitting time and diagnostics for the divergence argument.

The divergence argument needs three finite facts about a realised sample:

* running means of the steps and of ``l0 + L_1 + ... + L_n`` settle within
  ``eps`` of their means from some block length ``N`` on;
* consequently the ``i``-th block average of steps is within ``(2i-1) eps``
  of the step mean;
* grouping the fraction series into blocks of ``N`` and replacing each
  denominator by its block-end value gives a lower bound that, as
  ``eps -> 0``, behaves like ``(mu_X / mu_L) * H_m``.

:func:`choose_block_length`, :func:`block_lower_bound` and
:func:`check_block_bound` make each step checkable on real draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Iterator, Optional, Sequence

import numpy as np

from .distributions import mean as dist_mean
from .engines.trajectory import TrajectoryRecord, trajectory_draws
from .errors import ContractError, DomainError
from .model import ProcessSpec
from .summation import CompensatedSum, compensated_prefix_sums


# --- survival and mean of T -----------------------------------------------

@dataclass(frozen=True)
class SurvivalCurve:
    """Empirical ``P(T > n)`` for ``n = 0 .. horizon``."""

    horizon: int
    values: tuple[float, ...]
    n_trajectories: int
    n_censored: int

    def __getitem__(self, n: int) -> float:
        return self.values[n]

    def standard_errors(self) -> tuple[float, ...]:
        k = self.n_trajectories
        return tuple(math.sqrt(s * (1 - s) / k) for s in self.values)


def survival_curve(records: Sequence[TrajectoryRecord], horizon: int) -> SurvivalCurve:
    if not records:
        raise ContractError("survival_curve needs at least one record")
    if horizon < 1:
        raise ContractError(f"horizon must be positive, got {horizon}")
    min_cap = min(r.cap for r in records)
    if horizon > min_cap:
        raise ContractError(f"horizon {horizon} exceeds the smallest cap {min_cap}")
    n = len(records)
    # number of arrivals at each second; censored ones never arrive within the horizon
    arrivals = np.zeros(horizon + 2, dtype=np.int64)
    for r in records:
        if r.hitting_time is not None:
            arrivals[min(r.hitting_time, horizon + 1)] += 1
    alive = n - np.cumsum(arrivals[:horizon + 1])
    values = tuple(float(a) / n for a in alive)
    return SurvivalCurve(horizon, values, n, sum(r.censored for r in records))


@dataclass(frozen=True)
class MeanEstimate:
    """Mean hitting time over non-censored records with a normal-theory interval.

    With censored records present the mean is biased low; ``censored_warning``
    says so.  ``mean`` is NaN when every record is censored.
    """

    mean: float
    lo: float
    hi: float
    censored_warning: bool
    n_used: int
    confidence: float

    @property
    def defined(self) -> bool:
        return not math.isnan(self.mean)


def mean_hitting_time(records: Sequence[TrajectoryRecord], confidence: float = 0.95) -> MeanEstimate:
    if not records:
        raise ContractError("mean_hitting_time needs at least one record")
    if not 0 < confidence < 1:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    times = [r.hitting_time for r in records if r.hitting_time is not None]
    warn = len(times) < len(records)
    n = len(times)
    if n == 0:
        nan = math.nan
        return MeanEstimate(nan, nan, nan, True, 0, confidence)
    m = math.fsum(times) / n
    if n == 1:
        return MeanEstimate(m, math.nan, math.nan, warn, 1, confidence)
    var = math.fsum((t - m) ** 2 for t in times) / (n - 1)
    half = NormalDist().inv_cdf(0.5 + confidence / 2) * math.sqrt(var / n)
    return MeanEstimate(m, m - half, m + half, warn, n, confidence)


# --- law-of-large-numbers trace ---------------------------------------------

@dataclass(frozen=True)
class LLNTrace:
    """Running means ``(x_1+...+x_n)/n`` and their distance from a declared mean."""

    declared_mean: float
    running_mean: np.ndarray
    deviation: np.ndarray

    def __len__(self) -> int:
        return len(self.running_mean)

    def __iter__(self) -> Iterator[tuple[int, float, float]]:
        for i, (m, d) in enumerate(zip(self.running_mean.tolist(), self.deviation.tolist()), 1):
            yield i, m, d

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)


def _running_means(values: Sequence[float]) -> np.ndarray:
    # Welford's update keeps constant sequences exactly constant
    out = np.empty(len(values))
    m = 0.0
    for i, x in enumerate(values):
        m += (x - m) / (i + 1)
        out[i] = m
    return out


def lln_diagnostic(draws: Sequence[float], declared_mean: float) -> LLNTrace:
    if len(draws) == 0:
        raise ContractError("lln_diagnostic needs at least one draw")
    if not math.isfinite(declared_mean):
        raise DomainError("declared mean must be finite")
    running = _running_means(draws)
    return LLNTrace(declared_mean, running, np.abs(running - declared_mean))


def choose_block_length(draws_x: Sequence[float], draws_l: Sequence[float], l0: float,
                        mu_x: float, mu_l: float, epsilon: float) -> Optional[int]:
    """Least ``N`` such that for every ``n`` in ``[N, len]``

        |(x_1 + ... + x_n)/n - mu_x| < eps  and  |(l0 + l_1 + ... + l_n)/n - mu_l| < eps.

    ``draws_x`` are ``x_1, x_2, ...`` (the ``x_0`` term plays no part) and
    ``draws_l`` are ``l_1, l_2, ...``.  Returns ``None`` when no such ``N``
    exists within the sample.
    """
    if len(draws_x) == 0 or len(draws_l) == 0:
        raise ContractError("choose_block_length needs nonempty draws")
    if len(draws_x) != len(draws_l):
        raise ContractError("step and stretch samples must have the same length")
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not (math.isfinite(mu_x) and math.isfinite(mu_l)):
        raise DomainError("declared means must be finite")
    dev_x = np.abs(_running_means(draws_x) - mu_x)
    with_l0 = list(draws_l)
    with_l0[0] = l0 + with_l0[0]
    dev_l = np.abs(_running_means(with_l0) - mu_l)
    bad = np.flatnonzero((dev_x >= epsilon) | (dev_l >= epsilon))
    if len(bad) == 0:
        return 1
    last_bad = int(bad[-1]) + 1
    if last_bad == len(draws_x):
        return None
    return last_bad + 1


# --- blockwise lower bound --------------------------------------------------

@dataclass(frozen=True)
class BlockBoundParams:
    """``epsilon``, block length ``N`` and block count ``m``.

    ``epsilon = 0`` is allowed for :func:`block_lower_bound` (the limiting
    harmonic bound) but not for checks on draws.
    """

    epsilon: float
    N: int
    m: int

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise DomainError(f"epsilon must be finite and nonnegative, got {self.epsilon}")
        if self.N < 1 or self.m < 1:
            raise DomainError("block length N and block count m must be at least 1")


def first_vacuous_block(mu_x: float, epsilon: float, m: int) -> Optional[int]:
    """First ``k <= m`` with ``mu_x - (2k - 1) eps <= 0``, else ``None``."""
    if epsilon <= 0:
        return None if mu_x > 0 else 1
    if mu_x - (2 * m - 1) * epsilon > 0:
        return None
    # block m is vacuous, so the guess is finite and at most about m
    k = min(m, max(1, math.ceil((mu_x / epsilon + 1) / 2)))
    while k > 1 and mu_x - (2 * k - 3) * epsilon <= 0:
        k -= 1
    while mu_x - (2 * k - 1) * epsilon > 0:
        k += 1
    return k


@dataclass(frozen=True)
class BlockBound:
    partial_sums: tuple[float, ...]
    vacuous_from: Optional[int]

    @property
    def total(self) -> float:
        return self.partial_sums[-1]


def block_lower_bound(params: BlockBoundParams, mu_x: float, mu_l: float) -> BlockBound:
    """Partial sums ``B_k = sum_{i<=k} (1/i) (mu_x - (2i-1) eps) / (mu_l + eps)``.

    Negative terms (once ``(2i-1) eps`` exceeds ``mu_x``) are kept as they are
    and the first such block is reported in ``vacuous_from``.
    """
    if not (math.isfinite(mu_x) and math.isfinite(mu_l)):
        raise DomainError("means must be finite")
    eps = params.epsilon
    denom = mu_l + eps
    if not denom > 0:
        raise DomainError("mu_l + epsilon must be positive")
    acc = CompensatedSum()
    sums = []
    for i in range(1, params.m + 1):
        sums.append(acc.add((mu_x - (2 * i - 1) * eps) / denom / i).value)
    return BlockBound(tuple(sums), first_vacuous_block(mu_x, eps, params.m))


@dataclass(frozen=True)
class BlockBoundReport:
    """Outcome of checking the blockwise chain on one realised sample.

    ``observed`` is ``sum_{i=1}^{mN} x_i / (l0 + ... + l_i)``; ``bound`` is
    the same sum with each denominator replaced by its block-end value;
    ``epsilon_bound`` is :func:`block_lower_bound`.  ``holds`` means
    ``observed >= bound >= epsilon_bound``.
    """

    holds: bool
    observed: float
    bound: float
    epsilon_bound: float
    precondition_ok: bool
    valid_from: Optional[int]
    vacuous_from: Optional[int]
    block_terms: tuple[float, ...]


def check_block_bound(draws_x: Sequence[float], draws_l: Sequence[float], l0: float,
                      mu_x: float, mu_l: float, params: BlockBoundParams) -> BlockBoundReport:
    """Evaluate the chain on given draws ``x_1..x_{mN}`` and ``l_1..l_{mN}``."""
    N, m, eps = params.N, params.m, params.epsilon
    total = N * m
    if len(draws_x) < total or len(draws_l) < total:
        raise ContractError(f"need {total} draws of each kind, got {len(draws_x)} and {len(draws_l)}")
    if not eps > 0:
        raise DomainError("epsilon must be positive when checking draws")
    xs = [float(v) for v in draws_x[:total]]
    ls = [float(v) for v in draws_l[:total]]

    valid_from = choose_block_length(xs, ls, l0, mu_x, mu_l, eps)
    precondition_ok = valid_from is not None and valid_from <= N

    x_arr = np.asarray(xs)
    lengths = np.asarray(compensated_prefix_sums(ls, l0))
    end_lengths = lengths[N - 1::N]
    observed = math.fsum((x_arr / lengths).tolist())
    bound = math.fsum((x_arr / np.repeat(end_lengths, N)).tolist())
    terms = []
    for b in range(m):
        hi = (b + 1) * N
        block_avg = math.fsum(xs[b * N:hi]) / N
        # (block average) / (block-end length per index) / (block number)
        terms.append(block_avg / (float(end_lengths[b]) / hi) / (b + 1))
    rewritten = math.fsum(terms)

    eb = block_lower_bound(params, mu_x, mu_l)
    # the rewritten form equals ``bound`` up to rounding
    holds = observed >= bound and rewritten >= eb.total
    return BlockBoundReport(holds, observed, bound, eb.total, precondition_ok,
                            valid_from, eb.vacuous_from, tuple(terms))


def verify_block_bound(spec: ProcessSpec, master_seed: int, params: BlockBoundParams,
                       substream_id: int = 0, namespace: int = 0) -> BlockBoundReport:
    """Draw ``x_0..x_{mN}`` and ``l_1..l_{mN}`` from a substream and check the chain.

    The bound is only claimed when ``params.N`` is a valid block length for
    those draws; ``precondition_ok`` reports whether it is.
    """
    mu_x, mu_l = dist_mean(spec.step_dist), dist_mean(spec.stretch_dist)
    if not (math.isfinite(mu_x) and math.isfinite(mu_l)):
        raise DomainError("the block bound needs finite step and stretch means")
    total = params.N * params.m
    steps, stretches = trajectory_draws(spec, substream_id, master_seed, total + 1, namespace)
    # x_0 is not part of the bound; x_i pairs with l_1 + ... + l_i
    return check_block_bound(steps[1:], stretches[:total], spec.l0, mu_x, mu_l, params)
