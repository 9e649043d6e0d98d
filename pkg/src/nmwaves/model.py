"""The blowflies birth nonlinearity f(u) = p*u*exp(-u) and its hypothesis checks.

Holds the model parameters (p, tau) with their derived constants, the
birth function with derivatives up to third order, its Schwarz
derivative, and the two scalar conditions used by the region logic:
the negative-feedback condition around the positive equilibrium and the
global-convergence inequality that guarantees u(+inf) = ln p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ModelParams:
    """Birth amplitude p > 1 and delay tau >= 0.

    Derived constants: kappa = ln p is the positive equilibrium of
    u' = -u + f(u(t-tau)); P = ln p - 1 is minus the slope of f at kappa;
    x_crit = 1 is the unique maximum of f and f_max = p/e its value.
    """

    p: float
    tau: float

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError(f"p must exceed 1, got {self.p}")
        if not self.tau >= 0.0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")

    @property
    def kappa(self) -> float:
        return math.log(self.p)

    @property
    def P(self) -> float:
        return math.log(self.p) - 1.0

    @property
    def x_crit(self) -> float:
        return 1.0

    @property
    def f_max(self) -> float:
        return self.p / math.e


def birth(u: float, order: int, params: ModelParams) -> float:
    """f(u) = p*u*e^{-u} or one of its first three derivatives.

    order 0: p*u*e^{-u}
    order 1: p*(1-u)*e^{-u}
    order 2: p*(u-2)*e^{-u}
    order 3: p*(3-u)*e^{-u}
    """
    e = math.exp(-u)
    p = params.p
    if order == 0:
        return p * u * e
    if order == 1:
        return p * (1.0 - u) * e
    if order == 2:
        return p * (u - 2.0) * e
    if order == 3:
        return p * (3.0 - u) * e
    raise ValueError(f"order must be 0..3, got {order}")


def schwarz(u: float, params: ModelParams) -> float:
    """Schwarz derivative f'''/f' - 1.5*(f''/f')^2 of the birth function.

    For f = p*u*e^{-u} the amplitude p cancels and the value reduces to
    (3-u)/(1-u) - 1.5*((u-2)/(1-u))^2, which is negative on (0,1) and
    (1, inf). Undefined at u = 1 where f' vanishes.
    """
    if not u > 0.0:
        raise ValueError(f"Schwarz derivative evaluated only for u > 0, got {u}")
    if u == 1.0:
        raise ValueError("f'(1) = 0: Schwarz derivative singular at u = 1")
    r = (u - 2.0) / (1.0 - u)
    return (3.0 - u) / (1.0 - u) - 1.5 * r * r


def feedback_holds(params: ModelParams, grid_points: int = 10_000) -> bool:
    """Negative feedback of f around kappa on the invariant interval.

    Checks (f(x) - kappa)*(x - kappa) < 0 for x in the open interval
    (f(f(1)), f(1)) excluding kappa itself. The interval endpoints are
    the second and first iterates of the maximum of f, so f maps the
    interval into itself. Combines a dense grid with the closed-form
    endpoint analysis that the unimodality of f makes conclusive:

    * p >= e (kappa >= 1): the x > kappa side always holds since f is
      decreasing past its maximum; the x < kappa side holds iff
      f(f(f(1))) >= kappa.
    * p < e (kappa < 1): the whole interval lies right of kappa and the
      supremum of f there is f(f(1)), so the condition holds iff
      f(f(1)) <= kappa.

    The interval is empty at p = e (f(1) = kappa = 1) and the condition
    holds vacuously.
    """
    f = lambda x: birth(x, 0, params)
    kappa = params.kappa
    b = f(1.0)
    a = f(b)
    tol = 1e-9 * (1.0 + kappa)

    if b - a <= tol:
        return True  # empty (or pointlike) interval, vacuous

    if kappa >= 1.0 - tol:
        analytic = f(a) >= kappa - tol
    else:
        analytic = a <= kappa + tol

    # dense grid over the open interval, kappa excluded
    ok = True
    for i in range(1, grid_points):
        x = a + (b - a) * i / grid_points
        if abs(x - kappa) <= tol:
            continue
        if (f(x) - kappa) * (x - kappa) >= tol * tol:
            ok = False
            break
    return analytic and ok


def gsc_holds(params: ModelParams) -> bool:
    """Convergence condition for the positive heteroclinic at +infinity.

    For p <= e^2 the condition holds unconditionally. For p > e^2 it is
    the inequality e^{-tau} > P*ln((P^2+P)/(P^2+1)) with P = ln p - 1.
    """
    if params.p <= math.e ** 2:
        return True
    P = params.P
    return math.exp(-params.tau) > P * math.log((P * P + P) / (P * P + 1.0))
