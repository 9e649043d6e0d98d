"""Shared numerical kernels.

Provides the low-level machinery the rest of the package is built on:
bracketed scalar root finding, adaptive Simpson quadrature, the lower
incomplete gamma function, truncated power-series arithmetic, cubic
Hermite interpolation and straight-line least squares.

All routines are pure functions of their inputs and safe to call from
any number of threads. Tolerances default to 1e-12 and are configurable
per call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence


class NoSignChange(ValueError):
    """The supplied bracket does not straddle a sign change."""


class QuadratureError(RuntimeError):
    """Adaptive refinement hit its depth limit.

    The best available estimate is attached as ``.estimate``.
    """

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class Bracket:
    """An interval [lo, hi] handed to the root solver.

    The solver additionally requires f(lo)*f(hi) <= 0.
    """

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")


def solve_bracketed(f: Callable[[float], float], bracket: Bracket,
                    tol: float = 1e-12, max_iter: int = 200) -> float:
    """Find a root of f inside a sign-changing bracket.

    Bisection guarantees progress; a secant step is tried first on each
    iteration and accepted only when it lands strictly inside the current
    bracket. Deterministic for fixed inputs.

    Args:
        f: continuous scalar function.
        bracket: interval with f(lo)*f(hi) <= 0.
        tol: terminate once the bracket width is <= tol.
        max_iter: hard iteration cap.

    Returns:
        A point r with |f(r)| small and final bracket width <= tol.

    Raises:
        NoSignChange: if f has the same (nonzero) sign at both endpoints.
    """
    lo, hi = bracket.lo, bracket.hi
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NoSignChange(f"f({lo})={flo} and f({hi})={fhi} have the same sign")

    x, fx = lo, flo
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        # secant proposal; fall back to bisection when degenerate or outside
        denom = fhi - flo
        if denom != 0.0:
            xs = hi - fhi * (hi - lo) / denom
        else:
            xs = math.nan
        mid = 0.5 * (lo + hi)
        guard = 0.01 * (hi - lo)
        if not (lo + guard < xs < hi - guard):
            xs = mid
        x = xs
        fx = f(x)
        if fx == 0.0:
            return x
        if flo * fx < 0.0:
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
    # midpoint of the final bracket is the certified answer
    r = 0.5 * (lo + hi)
    return r


def _adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                      atol: float, max_depth: int) -> float:
    """Recursive Simpson refinement with Richardson correction.

    Subintervals that hit the depth limit contribute their best local
    value and mark the whole integral unconverged; the error raised at
    the top carries the accumulated estimate.
    """
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    unconverged = []

    def recurse(a, fa, b, fb, m, fm, whole, atol, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * atol:
            return left + right + delta / 15.0
        if depth >= max_depth:
            unconverged.append((a, b, abs(delta)))
            return left + right + delta / 15.0
        return (recurse(a, fa, m, fm, lm, flm, left, 0.5 * atol, depth + 1)
                + recurse(m, fm, b, fb, rm, frm, right, 0.5 * atol, depth + 1))

    total = recurse(a, fa, b, fb, m, fm, whole, atol, 0)
    if unconverged:
        worst = max(err for _, _, err in unconverged)
        raise QuadratureError(
            f"quadrature did not converge on {len(unconverged)} subinterval(s) "
            f"at depth {max_depth} (worst local error estimate {worst:.3e})",
            estimate=total)
    return total


def integrate_adaptive(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-12, max_depth: int = 50) -> float:
    """Adaptive Simpson integration of a continuous integrand on [a, b].

    The result satisfies |result - true| <= tol * (1 + |result|) for
    integrands smooth enough for Simpson refinement to converge.

    Raises:
        QuadratureError: refinement exhausted max_depth; the exception
            carries the best estimate.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    # coarse pass pins the scale for the mixed absolute/relative target
    coarse = (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    atol = tol * (1.0 + abs(coarse))
    return sign * _adaptive_simpson(f, a, b, atol, max_depth)


def lower_incomplete_gamma(z: float, s: float, tol: float = 1e-12) -> float:
    """Lower incomplete gamma integral(0..z) t^(s-1) e^(-t) dt.

    Argument order is (integration limit, exponent). Evaluated by
    adaptive quadrature after the substitution t = z w^q with q*s >= 5,
    which lifts the fractional endpoint power high enough that the
    transformed integrand has a bounded fourth derivative for any s > 0:

        integral = q z^s integral(0..1) w^{q s - 1} e^{-z w^q} dw.

    Strictly increasing in z for fixed s.

    Raises:
        ValueError: z < 0 or s <= 0.
    """
    if z < 0.0:
        raise ValueError(f"limit must be >= 0, got {z}")
    if s <= 0.0:
        raise ValueError(f"exponent must be > 0, got {s}")
    if z == 0.0:
        return 0.0
    q = max(1, math.ceil(5.0 / s))
    a = q * s - 1.0
    integrand = lambda w: w ** a * math.exp(-z * w ** q)
    # loose pass pins the scale, second pass hits the relative target
    rough = _adaptive_simpson(integrand, 0.0, 1.0, 1e-6, 30)
    atol = max(0.5 * tol * abs(rough), 5e-324)
    inner = _adaptive_simpson(integrand, 0.0, 1.0, atol, 60)
    return q * z ** s * inner


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------

class PowerSeries:
    """Coefficients a0..aN of a series truncated at order N.

    Arithmetic is coefficient-exact modulo truncation at the common
    order; operands must share the same truncation order.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[float]):
        if len(coeffs) == 0:
            raise ValueError("series needs at least the constant term")
        self.coeffs = tuple(float(c) for c in coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> float:
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, PowerSeries) and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"PowerSeries({list(self.coeffs)})"

    def _check_order(self, other: "PowerSeries") -> None:
        if self.order != other.order:
            raise ValueError(
                f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        self._check_order(other)
        return PowerSeries([x + y for x, y in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        self._check_order(other)
        return PowerSeries([x - y for x, y in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "PowerSeries":
        return PowerSeries([-x for x in self.coeffs])

    def scale(self, a: float) -> "PowerSeries":
        return PowerSeries([a * x for x in self.coeffs])

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        self._check_order(other)
        n = self.order
        a, b = self.coeffs, other.coeffs
        out = [0.0] * (n + 1)
        for i in range(n + 1):
            ai = a[i]
            if ai == 0.0:
                continue
            for j in range(n + 1 - i):
                out[i + j] += ai * b[j]
        return PowerSeries(out)

    def exp(self) -> "PowerSeries":
        """exp of a series with zero constant term.

        Uses the differential recurrence b' = a' b, i.e.
        (k+1) b_{k+1} = sum_{j=1}^{k+1} j a_j b_{k+1-j}.
        """
        if self.coeffs[0] != 0.0:
            raise ValueError("series exp requires zero constant term")
        n = self.order
        a = self.coeffs
        b = [0.0] * (n + 1)
        b[0] = 1.0
        for k in range(n):
            acc = 0.0
            for j in range(1, k + 2):
                acc += j * a[j] * b[k + 1 - j]
            b[k + 1] = acc / (k + 1)
        return PowerSeries(b)


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Product of two series of equal truncation order."""
    return a * b


def series_exp(a: PowerSeries) -> PowerSeries:
    """Exponential of a series with zero constant term."""
    return a.exp()


# ---------------------------------------------------------------------------
# interpolation and regression
# ---------------------------------------------------------------------------

def hermite_cubic(t0: float, t1: float, y0: float, y1: float,
                  dy0: float, dy1: float, t: float) -> float:
    """Cubic Hermite interpolant on [t0, t1] evaluated at t."""
    h = t1 - t0
    s = (t - t0) / h
    s2 = s * s
    s3 = s2 * s
    return ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * dy0
            + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * dy1)


def hermite_cubic_deriv(t0: float, t1: float, y0: float, y1: float,
                        dy0: float, dy1: float, t: float) -> float:
    """Derivative of the cubic Hermite interpolant at t."""
    h = t1 - t0
    s = (t - t0) / h
    s2 = s * s
    return ((6 * s2 - 6 * s) * y0 / h + (3 * s2 - 4 * s + 1) * dy0
            + (-6 * s2 + 6 * s) * y1 / h + (3 * s2 - 2 * s) * dy1)


def fit_line(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares straight line through (x, y).

    Returns:
        (slope, intercept, slope standard error). The standard error is 0
        for exact fits or when fewer than 3 points are supplied.
    """
    n = len(x)
    if n != len(y):
        raise ValueError("x and y must have equal length")
    if n < 2:
        raise ValueError("need at least two points")
    xm = sum(x) / n
    ym = sum(y) / n
    sxx = sum((xi - xm) ** 2 for xi in x)
    if sxx == 0.0:
        raise ValueError("degenerate abscissae")
    sxy = sum((xi - xm) * (yi - ym) for xi, yi in zip(x, y))
    slope = sxy / sxx
    intercept = ym - slope * xm
    if n < 3:
        return slope, intercept, 0.0
    ss_res = sum((yi - (slope * xi + intercept)) ** 2 for xi, yi in zip(x, y))
    var = ss_res / (n - 2)
    return slope, intercept, math.sqrt(max(var, 0.0) / sxx)


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-10) -> float:
    """Abscissa of the maximum of a unimodal f on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
    return 0.5 * (a + b)
