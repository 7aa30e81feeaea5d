"""Positive-support distributions for ant steps and rope stretches.

Every family is sampled by inverse transform from exactly one raw 64-bit
draw, so the ``i``-th variate of a substream always comes from the ``i``-th
raw draw:

============  ==============================================
kind          variate from ``u`` in (0, 1)
============  ==============================================
constant      ``c`` (the draw is consumed and ignored)
uniform       ``a + (b - a) * u``, nudged inside ``(a, b)``
exponential   ``-mean * log(u)``
lognormal     ``exp(log_mean + log_sd * Phi^-1(u))``
pareto        ``scale * u ** (-1 / shape)``
============  ==============================================

Textual form used on the command line and in config files::

    constant:c=1
    uniform:a=0.5,b=1.5
    exponential:mean=1.0
    lognormal:log_mean=0,log_sd=0.5
    pareto:scale=1,shape=1.5
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Sequence

from .errors import DomainError
from .rng import Stream

_STD_NORMAL = NormalDist()


class Kind(str, enum.Enum):
    CONSTANT = "constant"
    UNIFORM = "uniform"
    EXPONENTIAL = "exponential"
    LOGNORMAL = "lognormal"
    PARETO = "pareto"


_PARAM_NAMES = {
    Kind.CONSTANT: ("c",),
    Kind.UNIFORM: ("a", "b"),
    Kind.EXPONENTIAL: ("mean",),
    Kind.LOGNORMAL: ("log_mean", "log_sd"),
    Kind.PARETO: ("scale", "shape"),
}


@dataclass(frozen=True)
class DistributionSpec:
    kind: Kind
    params: tuple[float, ...]

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        names = _PARAM_NAMES[kind]
        if len(self.params) != len(names):
            raise DomainError(f"{kind.value} takes parameters {names}, got {self.params!r}")
        try:
            params = tuple(float(p) for p in self.params)
        except (TypeError, ValueError) as exc:
            raise DomainError(f"non-numeric parameter in {self.params!r}") from exc
        object.__setattr__(self, "params", params)
        if not all(math.isfinite(p) for p in params):
            raise DomainError(f"{kind.value} parameters must be finite, got {params!r}")
        _check_support(kind, params)

    # constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, c: float) -> "DistributionSpec":
        return cls(Kind.CONSTANT, (c,))

    @classmethod
    def uniform(cls, a: float, b: float) -> "DistributionSpec":
        return cls(Kind.UNIFORM, (a, b))

    @classmethod
    def exponential(cls, mean: float) -> "DistributionSpec":
        return cls(Kind.EXPONENTIAL, (mean,))

    @classmethod
    def lognormal(cls, log_mean: float, log_sd: float) -> "DistributionSpec":
        return cls(Kind.LOGNORMAL, (log_mean, log_sd))

    @classmethod
    def pareto(cls, scale: float, shape: float) -> "DistributionSpec":
        return cls(Kind.PARETO, (scale, shape))

    # metadata -------------------------------------------------------------
    def param(self, name: str) -> float:
        return self.params[_PARAM_NAMES[self.kind].index(name)]

    @property
    def has_finite_mean(self) -> bool:
        return math.isfinite(mean(self))

    @property
    def is_degenerate(self) -> bool:
        return self.kind is Kind.CONSTANT

    def __str__(self) -> str:
        names = _PARAM_NAMES[self.kind]
        body = ",".join(f"{n}={p!r}" for n, p in zip(names, self.params))
        return f"{self.kind.value}:{body}"


def _check_support(kind: Kind, p: Sequence[float]) -> None:
    if kind is Kind.CONSTANT:
        ok = p[0] > 0
    elif kind is Kind.UNIFORM:
        ok = 0 < p[0] < p[1]
    elif kind is Kind.EXPONENTIAL:
        ok = p[0] > 0
    elif kind is Kind.LOGNORMAL:
        ok = p[1] > 0
    else:
        ok = p[0] > 0 and p[1] > 0
    if not ok:
        raise DomainError(f"{kind.value}{tuple(p)} does not have strictly positive support")


def mean(spec: DistributionSpec) -> float:
    """Analytic mean; ``math.inf`` when it does not exist."""
    k, p = spec.kind, spec.params
    if k is Kind.CONSTANT:
        return p[0]
    if k is Kind.UNIFORM:
        return 0.5 * (p[0] + p[1])
    if k is Kind.EXPONENTIAL:
        return p[0]
    if k is Kind.LOGNORMAL:
        return math.exp(p[0] + 0.5 * p[1] * p[1])
    scale, shape = p
    if shape <= 1:
        return math.inf
    return shape * scale / (shape - 1)


def variance(spec: DistributionSpec) -> float:
    k, p = spec.kind, spec.params
    if k is Kind.CONSTANT:
        return 0.0
    if k is Kind.UNIFORM:
        return (p[1] - p[0]) ** 2 / 12
    if k is Kind.EXPONENTIAL:
        return p[0] ** 2
    if k is Kind.LOGNORMAL:
        s2 = p[1] * p[1]
        return math.expm1(s2) * math.exp(2 * p[0] + s2)
    scale, shape = p
    if shape <= 2:
        return math.inf
    return scale * scale * shape / ((shape - 1) ** 2 * (shape - 2))


def transform(spec: DistributionSpec, u: float) -> float:
    """Map one uniform ``u`` in (0, 1) to a variate of ``spec``."""
    k, p = spec.kind, spec.params
    if k is Kind.CONSTANT:
        return p[0]
    if k is Kind.UNIFORM:
        a, b = p
        v = a + (b - a) * u
        if v <= a:
            v = math.nextafter(a, b)
        elif v >= b:
            v = math.nextafter(b, a)
        return v
    if k is Kind.EXPONENTIAL:
        v = -p[0] * math.log(u)
    elif k is Kind.LOGNORMAL:
        v = math.exp(p[0] + p[1] * _STD_NORMAL.inv_cdf(u))
    else:
        v = p[0] * u ** (-1.0 / p[1])
    if v == 0.0:
        # underflow only; the true variate is positive
        return math.ulp(0.0)
    if not math.isfinite(v):
        raise DomainError(f"{spec} produced a non-finite variate; parameters are too extreme")
    return v


def sample(spec: DistributionSpec, stream: Stream) -> float:
    """Draw one strictly positive variate, consuming exactly one raw draw."""
    return transform(spec, stream.next_uniform())


def sample_many(spec: DistributionSpec, stream: Stream, n: int) -> list[float]:
    """``n`` consecutive draws; bit-identical to ``n`` calls of :func:`sample`."""
    us = stream.next_uniforms(n)
    k, p = spec.kind, spec.params
    # same scalar formulas as transform(), without per-call dispatch
    if k is Kind.CONSTANT:
        return [p[0]] * n
    if k is Kind.UNIFORM:
        a, b = p
        w = b - a
        vs = [a + w * u for u in us]
        if min(vs, default=b) > a and max(vs, default=a) < b:
            return vs
    elif k is Kind.EXPONENTIAL:
        neg, log = -p[0], math.log
        vs = [neg * log(u) for u in us]
        if min(vs, default=1.0) > 0.0 and max(vs, default=1.0) < math.inf:
            return vs
    return [transform(spec, u) for u in us]


def parse_distribution(text: str) -> DistributionSpec:
    """Parse ``"kind:key=value,key=value"`` into a :class:`DistributionSpec`."""
    kind_text, sep, body = text.strip().partition(":")
    try:
        kind = Kind(kind_text.strip().lower())
    except ValueError:
        known = ", ".join(k.value for k in Kind)
        raise DomainError(f"unknown distribution kind {kind_text!r} (expected one of {known})") from None
    names = _PARAM_NAMES[kind]
    values: dict[str, float] = {}
    for item in filter(None, (s.strip() for s in body.split(","))) if sep else ():
        key, eq, raw = item.partition("=")
        key = key.strip()
        if not eq:
            raise DomainError(f"expected key=value in {text!r}, got {item!r}")
        if key not in names:
            raise DomainError(f"{kind.value} has no parameter {key!r} (expected {', '.join(names)})")
        if key in values:
            raise DomainError(f"parameter {key!r} given twice in {text!r}")
        try:
            values[key] = float(raw)
        except ValueError:
            raise DomainError(f"parameter {key!r} is not a number: {raw!r}") from None
    missing = [n for n in names if n not in values]
    if missing:
        raise DomainError(f"{kind.value} is missing parameter(s) {', '.join(missing)}")
    return DistributionSpec(kind, tuple(values[n] for n in names))
