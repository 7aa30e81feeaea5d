"""Exact rational evaluation of the progress-fraction partial sum.

Fractions are summed by binary splitting on unreduced ``(numerator,
denominator)`` pairs and reduced once at the end, which keeps ``m`` around
``10**4`` terms well under a second.  Denominators grow like ``lcm`` of the
rope lengths, so much longer inputs are impractical.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Tuple

from ..errors import ContractError, DomainError

_NumDen = Tuple[int, int]


def as_fraction(value, name: str = "value") -> Fraction:
    try:
        q = Fraction(value)
    except (TypeError, ValueError, OverflowError) as exc:
        raise DomainError(f"{name} is not a finite rational: {value!r}") from exc
    if q <= 0:
        raise DomainError(f"{name} must be positive, got {value!r}")
    return q


def sum_pairs(pairs: Sequence[_NumDen]) -> _NumDen:
    """Sum ``n_i / d_i`` without intermediate reduction (binary splitting)."""
    if not pairs:
        return 0, 1
    level = list(pairs)
    while len(level) > 1:
        nxt = []
        for j in range(0, len(level) - 1, 2):
            (a, b), (c, d) = level[j], level[j + 1]
            nxt.append((a * d + c * b, b * d))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def exact_fraction(steps: Sequence, l0, stretches: Sequence) -> Fraction:
    """Exact ``sum_i x_i / (l0 + l_1 + ... + l_i)``; floats are taken at face value."""
    if len(steps) == 0:
        raise ContractError("steps must be nonempty")
    if len(stretches) != len(steps) - 1:
        raise ContractError(
            f"need exactly len(steps) - 1 = {len(steps) - 1} stretches, got {len(stretches)}")
    length = as_fraction(l0, "l0")
    pairs = []
    for i, x in enumerate(steps):
        if i:
            length += as_fraction(stretches[i - 1], f"stretches[{i - 1}]")
        q = as_fraction(x, f"steps[{i}]")
        pairs.append((q.numerator * length.denominator, q.denominator * length.numerator))
    num, den = sum_pairs(pairs)
    return Fraction(num, den)


def exact_prefix_fractions(steps: Sequence, l0, stretches: Sequence) -> list[Fraction]:
    """Exact value of every prefix sum; quadratic-ish, keep inputs short."""
    length = as_fraction(l0, "l0")
    total = Fraction(0)
    out = []
    for i, x in enumerate(steps):
        if i:
            length += as_fraction(stretches[i - 1], f"stretches[{i - 1}]")
        total += as_fraction(x, f"steps[{i}]") / length
        out.append(total)
    return out


def exact_constant_prefix(l0, x, stretch, m: int) -> Fraction:
    """Exact ``sum_{i<m} x / (l0 + i * stretch)`` for constant step and stretch."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    q0, qx, qs = (as_fraction(v, n) for v, n in ((l0, "l0"), (x, "x"), (stretch, "stretch")))
    # l0 + i*L = (p*s + i*r*q) / (q*s) with l0 = p/q, L = r/s
    p, q, r, s = q0.numerator, q0.denominator, qs.numerator, qs.denominator
    base, inc = p * s, r * q
    num, den = sum_pairs([(1, base + i * inc) for i in range(m)])
    return qx * q * s * Fraction(num, den)


def first_exact_crossing(terms: Iterable[Fraction], target: Fraction = Fraction(1)):
    """Index (1-based) of the first prefix sum ``>= target``, or ``None``."""
    total = Fraction(0)
    for n, t in enumerate(terms, start=1):
        total += t
        if total >= target:
            return n
    return None
