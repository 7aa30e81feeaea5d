"""Compensated floating-point summation.

The running sums in this package add terms that shrink like ``1/n`` onto a
total of order one, which is exactly where naive summation drops the tail.
Neumaier's variant of Kahan summation is used throughout because it stays
correct when an addend is larger than the running total.
"""

from __future__ import annotations

from typing import Iterable, Tuple

#: ``(total, carry)`` pair; the represented value is ``total + carry``.
Pair = Tuple[float, float]


def neumaier_add(acc: Pair, x: float) -> Pair:
    """Return the pair obtained by adding ``x`` to ``acc``. Pure."""
    s, c = acc
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


def pair_value(acc: Pair) -> float:
    return acc[0] + acc[1]


class CompensatedSum:
    """Mutable running sum, like ``math.fsum`` but incremental."""

    __slots__ = ("_s", "_c")

    def __init__(self, start: float = 0.0):
        self._s = float(start)
        self._c = 0.0

    def add(self, x: float) -> "CompensatedSum":
        s = self._s
        t = s + x
        if abs(s) >= abs(x):
            self._c += (s - t) + x
        else:
            self._c += (x - t) + s
        self._s = t
        return self

    def extend(self, xs: Iterable[float]) -> "CompensatedSum":
        for x in xs:
            self.add(x)
        return self

    @property
    def value(self) -> float:
        return self._s + self._c

    @property
    def pair(self) -> Pair:
        return self._s, self._c

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"CompensatedSum({self.value!r})"


def compensated_sum(xs: Iterable[float], start: float = 0.0) -> float:
    return CompensatedSum(start).extend(xs).value


def compensated_prefix_sums(xs: Iterable[float], start: float = 0.0) -> list[float]:
    """Running compensated totals ``start + x_0 + ... + x_k`` for every ``k``."""
    # inlined CompensatedSum.add; this is on the hot path of the diagnostics
    s, c = float(start), 0.0
    out = []
    append = out.append
    for x in xs:
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        append(s + c)
    return out
