import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import scipy.special

from oracles import brute_force_first_crossing, exact_harmonic
from rubberrope.engines import (
    EULER_GAMMA,
    Method,
    deterministic_hitting_time,
    digamma,
    digamma_difference,
    harmonic_number,
    invert_harmonic,
)
from rubberrope.engines.harmonic import DIRECT_LIMIT, first_crossing
from rubberrope.errors import DomainError

# frozen from exact rational summation (oracles.exact_harmonic)
H_4 = 25 / 12
H_100 = 5.187377517639621


def test_frozen_values_come_from_the_oracle():
    assert float(exact_harmonic(4)) == H_4
    assert float(exact_harmonic(100)) == H_100


@pytest.mark.parametrize("m, expected", [(1, 1.0), (4, H_4), (100, H_100)])
def test_harmonic_small(m, expected):
    assert abs(harmonic_number(m) - expected) <= 1e-15


@pytest.mark.parametrize("m", [1, 2, 10, 1000, 12345])
def test_harmonic_direct_vs_exact(m):
    assert abs(harmonic_number(m) - float(exact_harmonic(m))) <= 1e-12


@pytest.mark.parametrize("m", [10 ** 6, DIRECT_LIMIT, DIRECT_LIMIT + 1, 10 ** 9, 10 ** 15, 10 ** 40])
def test_harmonic_large_vs_mpmath(m):
    with mpmath.workdps(40):
        ref = mpmath.harmonic(m)
    assert abs(harmonic_number(m) - float(ref)) <= 1e-12


def test_harmonic_continuity_at_switch():
    a = harmonic_number(DIRECT_LIMIT)
    b = harmonic_number(DIRECT_LIMIT + 1)
    assert abs((b - a) - 1 / (DIRECT_LIMIT + 1)) < 1e-13


@pytest.mark.parametrize("m", [0, -3, 2.5, True])
def test_harmonic_domain(m):
    with pytest.raises(DomainError):
        harmonic_number(m)


@pytest.mark.parametrize("z", [1e-8, 0.01, 0.5, 1.0, 2.5, 9.99, 10.0, 123.4, 1e8, 1e200])
def test_digamma_vs_mpmath_and_scipy(z):
    with mpmath.workdps(40):
        ref = float(mpmath.digamma(z))
    assert math.isclose(digamma(z), ref, rel_tol=1e-13, abs_tol=1e-14)
    assert math.isclose(digamma(z), scipy.special.digamma(z), rel_tol=1e-12, abs_tol=1e-13)


def test_digamma_at_one_is_minus_gamma():
    assert abs(digamma(1.0) + EULER_GAMMA) < 1e-15


@pytest.mark.parametrize("r", [0.05, 0.5, 1.0, 3.7, 50.0, 1e6])
@pytest.mark.parametrize("m", [1, 7, 100, 12345, 10 ** 6, 10 ** 7])
def test_digamma_difference_vs_direct_summation(r, m):
    # direct compensated sum of 1/(r+i), independent of any digamma code
    i = np.arange(m, dtype=np.float64)
    direct = math.fsum((1.0 / (r + i)).tolist())
    assert math.isclose(digamma_difference(r, m), direct, rel_tol=1e-10)


@pytest.mark.parametrize("l0, x, L", [(1.0, 1.0, 1.0), (3.0, 0.2, 1.7), (100.0, 2.0, 0.5)])
def test_digamma_consistency_with_fraction_terms(l0, x, L):
    for m in (10, 1000, 10 ** 5, 10 ** 7):
        i = np.arange(m, dtype=np.float64)
        direct = math.fsum((x / (l0 + i * L)).tolist())
        via_psi = (x / L) * digamma_difference(l0 / L, m)
        assert math.isclose(via_psi, direct, rel_tol=1e-10)


@pytest.mark.parametrize("c, m", [(0.0, 1), (0.5, 1), (1.0, 1), (1.5, 2), (3.0, 11), (10.0, 12367)])
def test_invert_harmonic_examples(c, m):
    inv = invert_harmonic(c)
    assert inv.m == m and inv.exact


def test_invert_harmonic_brackets_on_small_grid():
    for k in range(1, 21):  # c = 0.5 .. 10
        c = k / 2
        m = invert_harmonic(c).m
        assert brute_force_first_crossing(lambda i: Fraction(1, i + 1), Fraction(c), 10 ** 5) == m


@pytest.mark.parametrize("c", [k / 2 for k in range(1, 61)])
def test_invert_harmonic_grid_vs_mpmath_bracket(c):
    # high-precision bracket; covers the part of the grid direct summation cannot reach quickly
    m = invert_harmonic(c).m
    with mpmath.workdps(50):
        assert mpmath.harmonic(m - 1) < c <= mpmath.harmonic(m)


def test_invert_harmonic_classic_scale():
    inv = invert_harmonic(100000)
    assert inv.m is None
    assert abs(inv.log10_m - 43429.2) < 0.1
    assert inv.log10_m == pytest.approx((100000 - EULER_GAMMA) / math.log(10), abs=1e-9)
    assert inv.log10_error < 1e-9
    assert inv.m_estimate == math.inf


def test_invert_harmonic_log_form_is_consistent_where_checkable():
    # for c slightly above the exact range the log-form answer can still be bracketed
    inv = invert_harmonic(31.0)
    with mpmath.workdps(60):
        m = int(mpmath.ceil(mpmath.mpf(10) ** inv.log10_m))
        lo, hi = m - 3, m + 3
        assert mpmath.harmonic(lo) < 31.0 <= mpmath.harmonic(hi)


@pytest.mark.parametrize("c", [-1.0, math.inf, math.nan])
def test_invert_harmonic_domain(c):
    with pytest.raises(DomainError):
        invert_harmonic(c)


def test_first_crossing_matches_brute_force():
    term = lambda i: 1.0 / (3.0 + 0.5 * i)  # noqa: E731
    got = first_crossing(lambda i: 1.0 / (3.0 + 0.5 * i), term, 4.0, 10 ** 6)
    exact = brute_force_first_crossing(lambda i: 1 / (Fraction(3) + Fraction(1, 2) * i), 4, 10 ** 6)
    assert got[0] == exact


# --- deterministic solver ------------------------------------------------------

@pytest.mark.parametrize("l0, x, L, T", [(2, 1, 2, 4), (5, 5, 1, 1), (10, 1, 10, 12367)])
def test_solver_small_cases_exact(l0, x, L, T):
    rep = deterministic_hitting_time(l0, x, L)
    assert rep.hitting_time == T
    assert rep.method is Method.EXACT_RATIONAL
    assert rep.error_bound == 0


def test_solver_tie_counts_as_arrival():
    # 1/2 + 1/4 + 1/4 ... : x/l0 = 1 exactly on the first move
    assert deterministic_hitting_time(3, 3, 7).hitting_time == 1
    # 1/4 + 1/4 + 1/4 + 1/4 with tiny stretches never ties; exact bracket decides
    rep = deterministic_hitting_time(4, 1, 2 ** -30)
    assert rep.hitting_time == 5


@pytest.mark.parametrize("l0, x, L", [
    (3.0, 0.7, 0.9), (1.0, 1.0, 1.0), (0.25, 0.02, 0.1), (7.5, 2.0, 0.01), (1e3, 1.0, 3.0),
])
def test_solver_matches_brute_force(l0, x, L):
    rep = deterministic_hitting_time(l0, x, L)
    fl0, fx, fL = Fraction(l0), Fraction(x), Fraction(L)
    brute = brute_force_first_crossing(lambda i: fx / (fl0 + i * fL), 1, 10 ** 6)
    assert rep.hitting_time == brute


def test_solver_compensated_range():
    # H_m >= 14 needs m around 6.7e5: past the exact limit, within direct summation
    rep = deterministic_hitting_time(1.0, 0.0625, 1.0)
    assert rep.method is Method.COMPENSATED_SUM
    with mpmath.workdps(40):
        m = rep.hitting_time
        frac = lambda n: mpmath.harmonic(n) / 16  # noqa: E731
        assert frac(m - 1) < 1 <= frac(m)
    assert 0 < rep.error_bound < 1e-12


def test_solver_asymptotic_integer_range():
    rep = deterministic_hitting_time(1.0, 0.03125, 1.0)
    assert rep.method is Method.DIGAMMA_ASYMPTOTIC
    with mpmath.workdps(40):
        m = rep.hitting_time
        frac = lambda n: mpmath.harmonic(n) / 32  # noqa: E731
        assert frac(m - 1) < 1 <= frac(m)


def test_solver_classic_preset():
    rep = deterministic_hitting_time(100000, 1, 100000)
    assert rep.method is Method.DIGAMMA_ASYMPTOTIC
    assert abs(rep.log10_hitting_time - 43429.2) < 0.1
    assert rep.log10_hitting_time == pytest.approx(invert_harmonic(100000).log10_m, abs=1e-9)
    assert rep.hitting_time_estimate == math.inf
    assert math.isfinite(rep.error_bound) and math.isfinite(rep.log10_error)
    assert rep.render() == "log10(T) ≈ 43429.2 (asymptotic, ±3.9e-11 in log10)"


def test_solver_general_log_form_vs_mpmath():
    l0, x, L = 3.0, 0.01, 2.0
    rep = deterministic_hitting_time(l0, x, L)
    with mpmath.workdps(50):
        r = mpmath.mpf(l0) / L
        target = mpmath.mpf(L) / x + mpmath.digamma(r)
        t = mpmath.findroot(lambda t: mpmath.digamma(mpmath.exp(t)) - target, target)
        ref = mpmath.log10(mpmath.exp(t) - r)
    assert abs(rep.log10_hitting_time - float(ref)) <= max(rep.log10_error, 1e-9)


@pytest.mark.parametrize("args", [(0, 1, 1), (1, -1, 1), (1, 1, 0), (math.inf, 1, 1), (1, math.nan, 1)])
def test_solver_domain(args):
    with pytest.raises(DomainError):
        deterministic_hitting_time(*args)
