"""Harmonic numbers, digamma differences and the constant-parameter solver.

With constant step ``x`` and constant stretch ``L`` the fraction after
``m`` seconds is

    sum_{i<m} x / (l0 + i*L) = (x/L) * (psi(r + m) - psi(r)),   r = l0 / L,

so the hitting time is the least ``m`` with ``psi(r+m) - psi(r) >= L/x``.
Small answers are found by direct compensated summation and, below
``EXACT_LIMIT``, confirmed in exact rational arithmetic.  Large answers come
from inverting the digamma asymptotics and may be reported only as
``log10``; the classic puzzle (1 km rope, 1 cm/s, +1 km per second) needs
about ``10**43429`` seconds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from typing import Callable, Optional

import numpy as np

from ..errors import DomainError
from ..summation import CompensatedSum
from .exact import as_fraction, exact_constant_prefix

EULER_GAMMA = 0.57721566490153286061
LN10 = math.log(10.0)
EPS = 2.0 ** -52

#: largest index summed term by term
DIRECT_LIMIT = 10 ** 7
#: largest hitting time confirmed in exact rational arithmetic
EXACT_LIMIT = 5 * 10 ** 4
#: largest target harmonic value inverted to an exact integer
EXACT_INVERSION_LIMIT = 30.0

_CHUNK = 1 << 16
_SHIFT_TO = 10.0
# beyond ~2**49 a unit change of m is invisible in double precision
_INTEGER_LOG_LIMIT = 34.0

# psi(z) ~ ln z - 1/(2z) - sum_k _PSI_COEF[k] * z**(-2(k+1))
_PSI_COEF = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760, 1 / 12)


class Method(str, enum.Enum):
    EXACT_RATIONAL = "exact_rational"
    COMPENSATED_SUM = "compensated_sum"
    DIGAMMA_ASYMPTOTIC = "digamma_asymptotic"


# --- harmonic numbers ------------------------------------------------------

def _check_index(m) -> int:
    if isinstance(m, bool) or not isinstance(m, Integral):
        raise DomainError(f"index must be an integer, got {m!r}")
    m = int(m)
    if m < 1:
        raise DomainError(f"index must be at least 1, got {m}")
    return m


def _direct_harmonic(m: int) -> float:
    acc = CompensatedSum()
    for start in range(1, m + 1, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, m + 1), dtype=np.float64)
        acc.add(float(np.sum(1.0 / k)))
    return acc.value


def _asymptotic_harmonic(m: int) -> float:
    inv2 = 1.0 / (float(m) * float(m))
    tail = inv2 * (-1 / 12 + inv2 * (1 / 120 - inv2 / 252))
    return math.log(m) + EULER_GAMMA + 0.5 / m + tail


def harmonic_number(m: int) -> float:
    """``H_m = 1 + 1/2 + ... + 1/m`` to absolute accuracy 1e-12."""
    m = _check_index(m)
    if m <= DIRECT_LIMIT:
        return _direct_harmonic(m)
    return _asymptotic_harmonic(m)


# --- digamma ---------------------------------------------------------------

def _psi_series(z: float) -> float:
    """``psi(z) - ln z + 1/(2z)`` for ``z >= 10``."""
    w = 1.0 / (z * z)
    s = 0.0
    for c in reversed(_PSI_COEF):
        s = s * w + c
    return -s * w


def digamma(z: float) -> float:
    """Digamma function for real ``z > 0``."""
    if not (math.isfinite(z) and z > 0):
        raise DomainError(f"digamma is implemented for finite z > 0, got {z!r}")
    shift = CompensatedSum()
    while z < _SHIFT_TO:
        shift.add(-1.0 / z)
        z += 1.0
    return shift.add(math.log(z) - 0.5 / z + _psi_series(z)).value


def digamma_difference(r: float, m) -> float:
    """``psi(r + m) - psi(r) = sum_{i<m} 1/(r + i)`` without cancellation."""
    if not (math.isfinite(r) and r > 0):
        raise DomainError(f"r must be finite and positive, got {r!r}")
    if m < 0:
        raise DomainError("m must be nonnegative")
    acc = CompensatedSum()
    k = 0
    a = r
    while a < _SHIFT_TO and k < m:
        acc.add(1.0 / a)
        k += 1
        a = r + k
    n = m - k
    if n <= 0:
        return acc.value
    n = float(n)
    b = a + n
    acc.add(math.log1p(n / a))
    acc.add(n / (2.0 * a * b))
    acc.add(_psi_series(b) - _psi_series(a))
    return acc.value


def _log_inverse_digamma(y: float, lower: float) -> float:
    """``ln z`` for the ``z > lower`` with ``psi(z) = y`` (``psi(lower) < y``)."""
    if y > 36.0:
        # psi(z) = ln(z - 1/2) + O(z**-2); the gap is below double precision
        return y + math.log1p(0.5 * math.exp(-y))
    lo = math.log(lower)
    hi = max(lo, 0.0) + 1.0
    while digamma(math.exp(hi)) < y:
        hi += 2.0 * (hi - lo)
    # psi is increasing; bisect on ln z
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if digamma(math.exp(mid)) < y:
            lo = mid
        else:
            hi = mid
    return hi


# --- direct first-crossing search -----------------------------------------

def first_crossing(term: Callable[[np.ndarray], np.ndarray], scalar_term: Callable[[int], float],
                   target: float, limit: int) -> Optional[tuple[int, float]]:
    """Least ``n <= limit`` with compensated ``sum_{i<n} term(i) >= target``.

    Chunk totals are only used to skip ahead; the chunk containing the
    crossing is rescanned term by term with the same compensated
    accumulation the simulator uses.  Returns ``(n, partial_sum)``.
    """
    acc = CompensatedSum()
    start = 0
    while start < limit:
        stop = min(start + _CHUNK, limit)
        chunk_total = float(np.sum(term(np.arange(start, stop, dtype=np.float64))))
        if acc.value + chunk_total * (1 + 1e-9) < target:
            acc.add(chunk_total)
            start = stop
            continue
        for i in range(start, stop):
            acc.add(scalar_term(i))
            if acc.value >= target:
                return i + 1, acc.value
        start = stop
    return None


# --- inversion of H_m ------------------------------------------------------

@dataclass(frozen=True)
class HarmonicInverse:
    """Least ``m`` with ``H_m >= c``.

    ``m`` is set only when it was determined exactly; ``log10_m`` is always
    available, with absolute uncertainty ``log10_error``.
    """

    c: float
    m: Optional[int]
    log10_m: float
    log10_error: float

    @property
    def exact(self) -> bool:
        return self.m is not None

    @property
    def m_estimate(self) -> float:
        if self.m is not None:
            return float(self.m)
        try:
            return 10.0 ** self.log10_m
        except OverflowError:
            return math.inf


def invert_harmonic(c: float) -> HarmonicInverse:
    c = float(c)
    if not math.isfinite(c) or c < 0:
        raise DomainError(f"c must be finite and nonnegative, got {c!r}")
    if c <= 1.0:
        return HarmonicInverse(c, 1, 0.0, 0.0)
    # H_x ~ ln(x + 1/2) + gamma
    shifted = c - EULER_GAMMA
    if c <= EXACT_INVERSION_LIMIT:
        guess = math.exp(shifted) - 0.5
        if guess <= DIRECT_LIMIT:
            hit = first_crossing(lambda k: 1.0 / (k + 1.0), lambda i: 1.0 / (i + 1),
                                 c, DIRECT_LIMIT + _CHUNK)
            assert hit is not None
            m = hit[0]
        else:
            m = math.ceil(guess)
            while harmonic_number(m) < c:
                m += 1
            while m > 1 and harmonic_number(m - 1) >= c:
                m -= 1
        return HarmonicInverse(c, m, math.log10(m), 0.0)
    ln_x = shifted + math.log1p(-0.5 * math.exp(-shifted))
    # ceil() adds less than 1 to x; the rest is rounding of c - gamma
    err = (1.0 / math.exp(min(ln_x, 700.0)) + 4 * EPS * c) / LN10
    return HarmonicInverse(c, None, ln_x / LN10, err)


# --- constant-parameter solver --------------------------------------------

@dataclass(frozen=True)
class SolveReport:
    """Answer of :func:`deterministic_hitting_time`.

    ``hitting_time`` is the integer answer when one was established;
    ``hitting_time_estimate`` saturates to ``inf`` when it exceeds the
    double range.  ``error_bound`` encloses the error of the computed
    fraction at the reported time.
    """

    hitting_time: Optional[int]
    hitting_time_estimate: float
    log10_hitting_time: float
    method: Method
    error_bound: float
    log10_error: float = 0.0

    def render(self) -> str:
        if self.method is Method.EXACT_RATIONAL:
            return f"T = {self.hitting_time} (exact)"
        if self.method is Method.COMPENSATED_SUM:
            return f"T = {self.hitting_time} (compensated sum, fraction error <= {self.error_bound:.3g})"
        head = f"log10(T) ≈ {self.log10_hitting_time:.1f} (asymptotic"
        detail = f", ±{self.log10_error:.2g} in log10"
        if self.hitting_time is not None and self.hitting_time < 10 ** 15:
            head = f"T ≈ {self.hitting_time}, " + head
        return head + detail + ")"


def _validate_positive(name: str, v) -> float:
    try:
        f = float(v)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {v!r}") from None
    if not (math.isfinite(f) and f > 0):
        raise DomainError(f"{name} must be finite and positive, got {v!r}")
    return f


def deterministic_hitting_time(l0: float, x: float, L: float) -> SolveReport:
    """Least ``m`` with ``sum_{i<m} x / (l0 + i*L) >= 1``."""
    l0 = _validate_positive("l0", l0)
    x = _validate_positive("x", x)
    L = _validate_positive("L", L)
    r = l0 / L
    target = L / x
    if not math.isfinite(r) or not math.isfinite(target):
        raise DomainError("l0/L and L/x must be representable")
    y = digamma(r) + target
    ln_z = _log_inverse_digamma(y, r)
    # z = r + m at the continuous crossing
    if ln_z < 700:
        ln_m_cont = ln_z + math.log1p(-min(r * math.exp(-ln_z), 1.0 - EPS))
    else:
        ln_m_cont = ln_z

    if ln_m_cont <= math.log(DIRECT_LIMIT):
        hit = first_crossing(lambda i: x / (l0 + i * L), lambda i: x / (l0 + i * L),
                             1.0, int(DIRECT_LIMIT * 1.05) + _CHUNK)
        if hit is not None:
            m, frac = hit
            if m <= EXACT_LIMIT:
                m = _exact_adjust(l0, x, L, m)
                return SolveReport(m, float(m), math.log10(m), Method.EXACT_RATIONAL, 0.0)
            bound = (6 * EPS + 2 * m * EPS * EPS) * frac
            return SolveReport(m, float(m), math.log10(m), Method.COMPENSATED_SUM, bound)

    # error of the digamma route on the sum, then on the fraction
    sum_err = 16 * EPS * max(abs(y), 1.0) + 1e-16
    frac_err = (x / L) * sum_err
    if ln_m_cont < _INTEGER_LOG_LIMIT:
        m = max(1, math.ceil(math.exp(ln_m_cont)))
        for _ in range(64):
            if digamma_difference(r, m) >= target:
                break
            m += 1
        for _ in range(64):
            if m == 1 or digamma_difference(r, m - 1) < target:
                break
            m -= 1
        # adjacent sums differ by 1/(r+m); closer than sum_err is unresolved
        slack = sum_err * (r + m) + 1.0
        return SolveReport(m, float(m), math.log10(m), Method.DIGAMMA_ASYMPTOTIC,
                           frac_err, slack / (m * LN10))
    log10_m = ln_m_cont / LN10
    log_err = (4 * EPS * max(abs(y), 1.0) + math.exp(-min(ln_m_cont, 700.0))) / LN10
    estimate = math.inf if log10_m > 308 else 10.0 ** log10_m
    return SolveReport(None, estimate, log10_m, Method.DIGAMMA_ASYMPTOTIC, frac_err, log_err)


def _exact_adjust(l0: float, x: float, L: float, m: int) -> int:
    """Move ``m`` until the exact prefix sums bracket 1."""
    one = Fraction(1)
    ql0, qx, qL = as_fraction(l0), as_fraction(x), as_fraction(L)

    def term(i: int) -> Fraction:
        return qx / (ql0 + i * qL)

    before = exact_constant_prefix(ql0, qx, qL, m - 1)
    while before >= one:
        m -= 1
        before -= term(m - 1)
    at = before + term(m - 1)
    while at < one:
        m += 1
        at += term(m - 1)
    return m
