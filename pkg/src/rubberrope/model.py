"""Process state and the one-second evolution of the ant and the rope.

Each second the ant crawls forward, the end is checked, and then (if the
ant is still on the rope) the rope stretches uniformly and carries the ant
with it.  Because a uniform stretch leaves ``position / length`` unchanged,
the accumulated progress fraction after ``m`` seconds is

    x_0/l_0 + x_1/(l_0+l_1) + ... + x_{m-1}/(l_0+l_1+...+l_{m-1})

which :func:`progress_fraction` evaluates directly.  Both the fraction and
the rope length are carried as compensated ``(total, carry)`` pairs, in the
same order in both functions, so the two routes agree bit for bit on the
fraction and therefore on the hitting time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Real
from typing import Optional, Sequence

from .distributions import DistributionSpec
from .errors import ContractError, DomainError
from .summation import Pair, neumaier_add, pair_value


def _positive(name: str, value) -> None:
    if not isinstance(value, Real) or isinstance(value, bool):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class ProcessSpec:
    """Initial rope length plus the laws of the ant's steps and the stretches.

    Infinite-mean laws fall outside the hypotheses of the divergence result
    and are accepted only with ``exploration=True``.
    """

    l0: float
    step_dist: DistributionSpec
    stretch_dist: DistributionSpec
    exploration: bool = False

    def __post_init__(self):
        _positive("l0", self.l0)
        for name in ("step_dist", "stretch_dist"):
            if not isinstance(getattr(self, name), DistributionSpec):
                raise DomainError(f"{name} must be a DistributionSpec")
        if not self.exploration and not self.within_hypotheses:
            raise DomainError(
                "infinite-mean step or stretch law; pass exploration=True to simulate it anyway")

    @property
    def within_hypotheses(self) -> bool:
        return self.step_dist.has_finite_mean and self.stretch_dist.has_finite_mean

    @property
    def is_deterministic(self) -> bool:
        return self.step_dist.is_degenerate and self.stretch_dist.is_degenerate


@dataclass(frozen=True)
class RopeState:
    t: int
    position: float
    length: float
    fraction: float
    terminal: bool = False
    # compensated accumulators backing ``fraction`` and ``length``
    fraction_acc: Pair = field(default=(0.0, 0.0), repr=False, compare=False)
    length_acc: Optional[Pair] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.length_acc is None:
            object.__setattr__(self, "length_acc", (self.length, 0.0))

    @classmethod
    def initial(cls, l0: float) -> "RopeState":
        _positive("l0", l0)
        zero = l0 * 0
        return cls(t=0, position=zero, length=l0, fraction=zero,
                   fraction_acc=(zero, zero), length_acc=(l0, zero))

    @property
    def ratio(self) -> float:
        return self.position / self.length


def advance(state: RopeState, step: float, stretch: float) -> RopeState:
    """Evolve ``state`` by one second: move ``step``, then stretch by ``stretch``.

    The end is reached when the accumulated fraction is at least one; the
    returned state is then terminal and no stretch is applied.  The fraction
    increment uses the pre-stretch length.
    """
    if state.terminal:
        raise ContractError(f"the ant already reached the end at t={state.t}")
    _positive("step", step)
    _positive("stretch", stretch)
    if not state.length > 0:
        raise DomainError(f"rope length must be positive, got {state.length!r}")

    length = state.length
    moved = state.position + step
    facc = neumaier_add(state.fraction_acc, step / length)
    fraction = pair_value(facc)
    if fraction >= 1:
        return RopeState(state.t + 1, moved, length, fraction, True, facc, state.length_acc)

    lacc = neumaier_add(state.length_acc, stretch)
    new_length = pair_value(lacc)
    return RopeState(state.t + 1, moved * (new_length / length), new_length, fraction,
                     False, facc, lacc)


def progress_fraction(steps: Sequence[float], l0: float, stretches: Sequence[float]) -> float:
    """Compensated value of ``sum_i steps[i] / (l0 + stretches[0] + ... + stretches[i-1])``.

    ``stretches`` holds ``l_1 .. l_{m-1}`` and must be one shorter than
    ``steps``.
    """
    if len(steps) == 0:
        raise ContractError("steps must be nonempty")
    if len(stretches) != len(steps) - 1:
        raise ContractError(
            f"need exactly len(steps) - 1 = {len(steps) - 1} stretches, got {len(stretches)}")
    _positive("l0", l0)
    zero = l0 * 0
    lacc: Pair = (l0, zero)
    facc: Pair = (zero, zero)
    length = l0
    for i, x in enumerate(steps):
        _positive(f"steps[{i}]", x)
        if i:
            s = stretches[i - 1]
            _positive(f"stretches[{i - 1}]", s)
            lacc = neumaier_add(lacc, s)
            length = pair_value(lacc)
        facc = neumaier_add(facc, x / length)
    return pair_value(facc)


def prefix_fractions(steps: Sequence[float], l0: float, stretches: Sequence[float]) -> list[float]:
    """``progress_fraction`` of every prefix ``steps[:k]``, ``k = 1..len(steps)``.

    ``stretches`` may be as long as ``steps``; surplus entries are ignored.
    """
    if len(stretches) < len(steps) - 1:
        raise ContractError("not enough stretches for the requested prefixes")
    _positive("l0", l0)
    lacc: Pair = (l0, 0.0)
    facc: Pair = (0.0, 0.0)
    length = l0
    out = []
    for i, x in enumerate(steps):
        if i:
            lacc = neumaier_add(lacc, stretches[i - 1])
            length = pair_value(lacc)
        facc = neumaier_add(facc, x / length)
        out.append(pair_value(facc))
    return out
