"""Tests for the shared numerical kernels."""

import itertools
import math
import random

import mpmath as mp
import pytest

from nmwaves.numerics import (Bracket, NoSignChange, PowerSeries,
                              QuadratureError, fit_line, golden_section_max,
                              hermite_cubic, hermite_cubic_deriv,
                              integrate_adaptive, lower_incomplete_gamma,
                              series_exp, series_mul, solve_bracketed)

mp.mp.dps = 30


def test_gamma_exponent_one_closed_form():
    # integral(0..z) e^{-t} dt = 1 - e^{-z}
    for i in range(21):
        z = 10.0 * i / 20
        want = 1.0 - math.exp(-z)
        assert abs(lower_incomplete_gamma(z, 1.0) - want) <= 1e-12


def test_gamma_zero_limit():
    assert lower_incomplete_gamma(0.0, 3.5) == 0.0


def test_gamma_against_mpmath():
    # includes the fractional exponent used by the peak bound at mu = 33.64
    cases = [(1.0, 1.0 + 1.0 / 33.64), (1.0, 2.0 + 1.0 / 33.64),
             (0.09, 1.03), (0.5, 0.4), (1.0, 7.2), (0.999, 0.07)]
    for z, s in cases:
        want = float(mp.gammainc(s, 0, z))
        got = lower_incomplete_gamma(z, s)
        assert abs(got - want) <= 1e-12 * (1.0 + abs(want)), (z, s)


def test_gamma_monotone_in_limit():
    rng = random.Random(7)
    for _ in range(20):
        s = rng.uniform(0.2, 5.0)
        zs = sorted(rng.uniform(0.0, 1.0) for _ in range(5))
        vals = [lower_incomplete_gamma(z, s) for z in zs]
        for a, b in zip(vals[:-1], vals[1:]):
            assert a <= b


def test_gamma_domain_errors():
    with pytest.raises(ValueError):
        lower_incomplete_gamma(-0.1, 1.0)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(1.0, 0.0)


def test_solve_bracketed_sqrt2():
    r = solve_bracketed(lambda x: x * x - 2.0, Bracket(1.0, 2.0), tol=1e-12)
    assert abs(r - math.sqrt(2.0)) <= 1e-12


def test_solve_bracketed_linear_characteristic():
    # z + 1 - p at p = 2, tau = 0: root exactly 1
    r = solve_bracketed(lambda z: z + 1.0 - 2.0, Bracket(0.0, 2.0), tol=1e-12)
    assert abs(r - 1.0) <= 1e-12


def test_solve_bracketed_against_fixed_point_iteration():
    # x e^x = 0.0751 via the contraction x -> 0.0751 e^{-x}
    x = 0.1
    for _ in range(200):
        x = 0.0751 * math.exp(-x)
    r = solve_bracketed(lambda t: t * math.exp(t) - 0.0751,
                        Bracket(0.0, 1.0), tol=1e-13)
    assert abs(r - x) <= 1e-12
    assert abs(r - 0.0700) <= 5e-4


def test_solve_bracketed_no_sign_change():
    with pytest.raises(NoSignChange):
        solve_bracketed(lambda x: x * x + 1.0, Bracket(0.0, 1.0))


def test_solve_bracketed_straddles_root():
    # for strictly monotone f the returned point has a sign change within tol
    tol = 1e-10
    for f in (math.sin, lambda x: math.expm1(x) - 0.5, lambda x: x ** 3 - 0.2):
        lo, hi = -1.0, 1.2
        r = solve_bracketed(f, Bracket(lo, hi), tol=tol)
        assert f(r - tol) * f(r + tol) <= 0.0


def test_bracket_requires_order():
    with pytest.raises(ValueError):
        Bracket(1.0, 1.0)


def test_integrate_exponential():
    got = integrate_adaptive(lambda t: math.exp(-t), 0.0, 1.0, tol=1e-13)
    assert abs(got - (1.0 - math.exp(-1.0))) <= 1e-13


def test_integrate_empty_interval():
    assert integrate_adaptive(math.sin, 2.0, 2.0) == 0.0


def test_integrate_orientation():
    a = integrate_adaptive(lambda t: t * t, 0.0, 2.0, tol=1e-13)
    b = integrate_adaptive(lambda t: t * t, 2.0, 0.0, tol=1e-13)
    assert abs(a - 8.0 / 3.0) <= 1e-12
    assert abs(a + b) <= 1e-12


def test_integrate_mixed_tolerance_contract():
    # large-magnitude integral: error must scale with 1 + |result|
    got = integrate_adaptive(lambda t: 1e6 * math.cos(t), 0.0, 1.0, tol=1e-12)
    want = 1e6 * math.sin(1.0)
    assert abs(got - want) <= 1e-12 * (1.0 + abs(want)) * 20


def test_integrate_depth_limit_carries_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate_adaptive(math.exp, 0.0, 1.0, tol=0.0, max_depth=6)
    assert abs(info.value.estimate - (math.e - 1.0)) <= 1e-6


def test_series_exp_of_x():
    s = PowerSeries([0.0, 1.0, 0.0, 0.0])
    assert series_exp(s).coeffs == (1.0, 1.0, 0.5, 1.0 / 6.0)


def test_series_mul():
    a = PowerSeries([1.0, 1.0, 0.0])
    b = PowerSeries([1.0, -1.0, 0.0])
    assert series_mul(a, b).coeffs == (1.0, 0.0, -1.0)


def test_series_order_mismatch():
    with pytest.raises(ValueError):
        series_mul(PowerSeries([1.0, 2.0]), PowerSeries([1.0, 2.0, 3.0]))


def test_series_exp_requires_zero_constant():
    with pytest.raises(ValueError):
        series_exp(PowerSeries([0.5, 1.0]))


def test_series_exp_inverse():
    rng = random.Random(3)
    a = PowerSeries([0.0] + [rng.uniform(-1, 1) for _ in range(8)])
    prod = series_exp(a) * series_exp(-a)
    assert abs(prod[0] - 1.0) <= 1e-12
    for c in prod.coeffs[1:]:
        assert abs(c) <= 1e-12


def _composition_coefficient(coeffs: dict, m: int) -> float:
    """[w^m] of V e^{-V} by explicit multinomial sums over compositions.

    V = sum_j coeffs[j] w^j; V e^{-V} = sum_{k>=0} (-1)^k V^{k+1} / k!.
    """
    total = 0.0
    js = sorted(coeffs)
    for k in range(0, m):
        parts = k + 1
        acc = 0.0
        for combo in itertools.product(js, repeat=parts):
            if sum(combo) == m:
                prod = 1.0
                for j in combo:
                    prod *= coeffs[j]
                acc += prod
        total += (-1.0) ** k / math.factorial(k) * acc
    return total


def test_series_reproduces_multinomial_sums():
    # u e^{-u} with u = w + qb2 w^2: compare against direct composition sums
    qb2 = -0.0506
    u = PowerSeries([0.0, 1.0, qb2, 0.0, 0.0])
    prod = u * series_exp(-u)
    coeffs = {1: 1.0, 2: qb2}
    for m in range(1, 5):
        want = _composition_coefficient(coeffs, m)
        assert abs(prod[m] - want) <= 1e-14, m


def test_series_multinomial_higher_order():
    rng = random.Random(11)
    cs = {j: rng.uniform(-0.5, 0.5) for j in range(1, 7)}
    u = PowerSeries([0.0] + [cs[j] for j in range(1, 7)])
    prod = u * series_exp(-u)
    for m in range(1, 7):
        want = _composition_coefficient(cs, m)
        assert abs(prod[m] - want) <= 1e-13, m


def test_hermite_reproduces_cubic():
    # exact for cubics
    f = lambda t: 2.0 * t ** 3 - t * t + 0.5 * t - 3.0
    df = lambda t: 6.0 * t * t - 2.0 * t + 0.5
    t0, t1 = 0.3, 1.1
    for i in range(11):
        t = t0 + (t1 - t0) * i / 10
        assert abs(hermite_cubic(t0, t1, f(t0), f(t1), df(t0), df(t1), t)
                   - f(t)) <= 1e-12
        assert abs(hermite_cubic_deriv(t0, t1, f(t0), f(t1), df(t0), df(t1), t)
                   - df(t)) <= 1e-11


def test_fit_line_exact():
    xs = [0.0, 1.0, 2.0, 3.0, 4.0]
    ys = [7.89 * x - 2.0 for x in xs]
    slope, intercept, err = fit_line(xs, ys)
    assert abs(slope - 7.89) <= 1e-12
    assert abs(intercept + 2.0) <= 1e-12
    assert err <= 1e-12


def test_golden_section_max():
    x = golden_section_max(lambda t: -(t - 0.37) ** 2, 0.0, 1.0, tol=1e-12)
    assert abs(x - 0.37) <= 1e-9
