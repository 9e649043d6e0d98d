"""Exponential-series expansion of the heteroclinic solution near -infinity.

The positive solution u(t) of u' = -u + p u(t-tau) e^{-u(t-tau)} with
u(-inf) = 0 is represented, after normalizing the leading coefficient to
one, by the series

    u(t) = e^{mu t} + qbar_2 e^{2 mu t} + qbar_3 e^{3 mu t} + ...

where mu is the unique positive root of z + 1 - p e^{-z tau}. The
coefficients alternate in sign and satisfy a recurrence obtained by
matching coefficients of e^{(n+1) mu t} once the birth nonlinearity is
expanded as a power series. The series converges absolutely up to a
computable horizon T(eps) parameterized by a free growth parameter
eps in (0, e^{mu tau} - 1).

Also provided here: the sandwich bounds u2(t) < u(t) < u1(t) = e^{mu t}
for t <= 0, and the peak lower bound zeta, in both its incomplete-gamma
closed form and its direct quadrature form.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

from .charroots import mu_root
from .model import ModelParams, birth
from .numerics import (PowerSeries, golden_section_max, integrate_adaptive,
                       lower_incomplete_gamma)


class CoefficientOverflow(RuntimeError):
    """A series coefficient exceeded the sanity bound; partial list attached."""

    def __init__(self, message: str, partial: list[float]):
        super().__init__(message)
        self.partial = partial


def _chi(z: float, params: ModelParams) -> float:
    return z + 1.0 - params.p * math.exp(-z * params.tau)


def coefficients(params: ModelParams, n_coeffs: int,
                 overflow_bound: float = 1e12) -> list[float]:
    """First n_coeffs coefficients qbar_1..qbar_N, qbar_1 = 1.

    With v_j = qbar_j e^{-j mu tau}, the coefficient of order n+1 in
    p * V * exp(-V) (whose linear part drops out because the order-n+1
    slot of V is still zero) divided by chi((n+1) mu) gives qbar_{n+1}.
    """
    if n_coeffs < 2:
        raise ValueError("need at least two coefficients")
    p, tau = params.p, params.tau
    mu = mu_root(params)
    emt = math.exp(-mu * tau)
    qb = [1.0]
    for n in range(1, n_coeffs):
        # V holds v_1..v_n with a zero placeholder at order n+1
        v = [0.0] * (n + 2)
        for j in range(1, n + 1):
            v[j] = qb[j - 1] * emt ** j
        series_v = PowerSeries(v)
        w = series_v * (-series_v).exp()
        q_next = p * w[n + 1] / _chi((n + 1) * mu, params)
        if abs(q_next) > overflow_bound:
            raise CoefficientOverflow(
                f"|qbar_{n + 1}| = {abs(q_next):.3e} exceeds {overflow_bound:.0e}",
                partial=qb)
        qb.append(q_next)
    return qb


def qbar2_closed_form(params: ModelParams) -> float:
    """qbar_2 = -p e^{-2 mu tau} / chi(2 mu), always negative."""
    mu = mu_root(params)
    return -params.p * math.exp(-2.0 * mu * params.tau) / _chi(2.0 * mu, params)


def qbar3_closed_form(params: ModelParams) -> float:
    """qbar_3 = p (0.5 - 2 qbar_2) e^{-3 mu tau} / chi(3 mu), always positive."""
    mu = mu_root(params)
    qb2 = qbar2_closed_form(params)
    return (params.p * (0.5 - 2.0 * qb2) * math.exp(-3.0 * mu * params.tau)
            / _chi(3.0 * mu, params))


def _horizon_value(mu: float, tau: float, qb2: float, eps: float) -> float:
    inner = eps / (1.0 + eps) * math.log(1.0 + 1.0 / (abs(qb2) * (1.0 + eps)))
    return tau + math.log(inner) / mu


def _best_eps(mu: float, tau: float, qb2: float) -> float:
    """Maximize the horizon over the admissible eps interval.

    Coarse log-spaced scan followed by golden-section refinement around
    the best grid point.
    """
    hi = math.exp(mu * tau) - 1.0
    lo = hi * 1e-8
    n = 200
    best_i, best_v = 0, -math.inf
    grid = [lo * (hi / lo) ** (i / (n - 1)) * (1.0 - 1e-12) for i in range(n)]
    g = lambda e: _horizon_value(mu, tau, qb2, e)
    for i, e in enumerate(grid):
        v = g(e)
        if v > best_v:
            best_i, best_v = i, v
    a = grid[max(best_i - 1, 0)]
    b = grid[min(best_i + 1, n - 1)]
    return golden_section_max(g, a, b, tol=1e-12 * (1.0 + hi))


@dataclass(frozen=True)
class DirichletExpansion:
    """Normalized series data: mu, coefficients, growth parameter, horizon."""

    params: ModelParams
    mu: float
    coeffs: tuple[float, ...]
    eps: float
    horizon: float

    @property
    def qbar2(self) -> float:
        return self.coeffs[1]

    def u1(self, t: float) -> float:
        """Upper bound e^{mu t}, valid for all t."""
        return math.exp(self.mu * t)

    def u2(self, t: float) -> float:
        """Lower bound e^{mu t} + qbar_2 e^{2 mu t}, valid for t <= 0."""
        x = math.exp(self.mu * t)
        return x + self.coeffs[1] * x * x

    def evaluate_with_tail(self, t: float) -> tuple[float, float]:
        """Partial sum at t plus the magnitude of the last kept term.

        Refuses t at or beyond the certified horizon.
        """
        if t >= self.horizon:
            raise ValueError(
                f"t = {t} is not below the series horizon {self.horizon}; "
                "the series is not certified there")
        x = math.exp(self.mu * t)
        total = 0.0
        power = x
        last = 0.0
        for q in self.coeffs:
            last = q * power
            total += last
            power *= x
        return total, abs(last)

    def evaluate(self, t: float) -> float:
        """Partial sum of the series at t (t must lie below the horizon)."""
        return self.evaluate_with_tail(t)[0]

    def derivative(self, t: float) -> float:
        """Termwise derivative sum(n mu qbar_n e^{n mu t})."""
        if t >= self.horizon:
            raise ValueError(
                f"t = {t} is not below the series horizon {self.horizon}")
        x = math.exp(self.mu * t)
        total = 0.0
        power = x
        for n, q in enumerate(self.coeffs, start=1):
            total += n * self.mu * q * power
            power *= x
        return total

    def defect(self, t: float) -> float:
        """Residual u'(t) + u(t) - f(u(t - tau)) of the truncated series."""
        u_delayed = self.evaluate(t - self.params.tau)
        return (self.derivative(t) + self.evaluate(t)
                - birth(u_delayed, 0, self.params))


def build(params: ModelParams, n_coeffs: int = 40,
          eps: float | None = None) -> DirichletExpansion:
    """Construct the expansion, choosing eps by horizon maximization if unset."""
    if params.tau <= 0.0:
        raise ValueError("the series requires a positive delay")
    mu = mu_root(params)
    qb = coefficients(params, n_coeffs)
    hi = math.exp(mu * params.tau) - 1.0
    if eps is None:
        eps = _best_eps(mu, params.tau, qb[1])
    elif not 0.0 < eps < hi:
        raise ValueError(
            f"eps must lie in (0, {hi:.6g}), got {eps}")
    T = _horizon_value(mu, params.tau, qb[1], eps)
    return DirichletExpansion(params=params, mu=mu, coeffs=tuple(qb),
                              eps=eps, horizon=T)


def horizon(expansion: DirichletExpansion, eps: float) -> float:
    """Convergence horizon for an explicit growth parameter eps.

    eps must lie in (0, e^{mu tau} - 1).
    """
    hi = math.exp(expansion.mu * expansion.params.tau) - 1.0
    if not 0.0 < eps < hi:
        raise ValueError(f"eps must lie in (0, {hi:.6g}), got {eps}")
    return _horizon_value(expansion.mu, expansion.params.tau,
                          expansion.qbar2, eps)


def zeta(params: ModelParams) -> float:
    """Peak lower bound for the heteroclinic, incomplete-gamma closed form.

    With m = 1/mu and qbar_2 from the series,

        zeta = (1 + qbar_2) e^{-tau}
             + p m [ G(1, m+1) - G(e^{-mu tau}, m+1)
                     + qbar_2 (G(1, m+2) - G(e^{-mu tau}, m+2)) ]

    where G is the lower incomplete gamma function with argument order
    (limit, exponent).
    """
    mu = mu_root(params)
    qb2 = qbar2_closed_form(params)
    m = 1.0 / mu
    emt = math.exp(-mu * params.tau)
    g = lower_incomplete_gamma
    return ((1.0 + qb2) * math.exp(-params.tau)
            + params.p * m * (g(1.0, m + 1.0) - g(emt, m + 1.0)
                              + qb2 * (g(1.0, m + 2.0) - g(emt, m + 2.0))))


def zeta_by_quadrature(params: ModelParams, tol: float = 1e-12) -> float:
    """Peak lower bound via direct quadrature of its defining integral.

    Independent route used to cross-check the closed form:

        zeta = (1 + qbar_2) e^{-tau}
             + p * integral(-tau..0) e^{mu s} e^s (1 + qbar_2 e^{mu s})
                   exp(-e^{mu s}) ds
    """
    mu = mu_root(params)
    qb2 = qbar2_closed_form(params)
    f = lambda s: (math.exp(mu * s) * math.exp(s)
                   * (1.0 + qb2 * math.exp(mu * s))
                   * math.exp(-math.exp(mu * s)))
    integral = integrate_adaptive(f, -params.tau, 0.0, tol=tol)
    return (1.0 + qb2) * math.exp(-params.tau) + params.p * integral


def write_coefficients_csv(expansion: DirichletExpansion, path: str) -> None:
    """Dump (n, qbar_n) rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "qbar_n"])
        for n, q in enumerate(expansion.coeffs, start=1):
            w.writerow([n, repr(q)])


def write_profile_csv(expansion: DirichletExpansion, path: str,
                      ts: Sequence[float]) -> None:
    """Dump (t, u2, u, u1) rows on the supplied grid (t below horizon)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "u2", "u", "u1"])
        for t in ts:
            w.writerow([repr(t), repr(expansion.u2(t)),
                        repr(expansion.evaluate(t)), repr(expansion.u1(t))])
