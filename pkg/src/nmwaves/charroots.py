"""Characteristic functions at the equilibria, their real roots, and wave speeds.

Five characteristic functions appear in the analysis, distinguished by
the equilibrium they linearize about and by the frame of the profile
variable:

* AT_ZERO_DDE          z + 1 - p e^{-z tau}               (delay ODE at 0)
* AT_KAPPA_DDE         z + 1 + P e^{-z tau}               (delay ODE at ln p)
* AT_ZERO_PROFILE      eps z^2 - z - 1 + p e^{-z tau}     (profile at 0, eps frame)
* AT_KAPPA_PROFILE_EPS eps z^2 - z - 1 - P e^{-z tau}     (profile at ln p, eps frame)
* AT_KAPPA_PROFILE_C   z^2 - c z - 1 - P e^{-z c tau}     (profile at ln p, wave frame)

with P = ln p - 1. The eps and wave frames are the same function up to
the rescaling z -> c z with eps = c^{-2}. Real negative roots of the
kappa functions decide tail monotonicity of the wave; the smallest c for
which the zero-equilibrium profile function gains a positive real root is
the minimal propagation speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .model import ModelParams
from .numerics import Bracket, solve_bracketed


class CharKind(Enum):
    AT_ZERO_DDE = "at_zero_dde"
    AT_KAPPA_DDE = "at_kappa_dde"
    AT_ZERO_PROFILE = "at_zero_profile"
    AT_KAPPA_PROFILE_EPS = "at_kappa_profile_eps"
    AT_KAPPA_PROFILE_C = "at_kappa_profile_c"


class TailClass(Enum):
    EVENTUALLY_MONOTONE = "eventually_monotone"
    OSCILLATORY_TAIL = "oscillatory_tail"


class BracketingError(RuntimeError):
    """A root bracket could not be established; details in the message."""


@dataclass(frozen=True)
class RootReport:
    """Real roots of one characteristic function inside a certified window.

    Roots are sorted ascending and repeated according to multiplicity;
    a double (tangency) root appears twice.
    """

    kind: CharKind
    real_roots: tuple[float, ...]
    search_window: tuple[float, float]


def char_value(kind: CharKind, z: float, params: ModelParams,
               speed: float | None = None) -> float:
    """Evaluate one of the five characteristic functions at z.

    ``speed`` carries eps for the *_PROFILE_EPS/AT_ZERO_PROFILE kinds and
    c for AT_KAPPA_PROFILE_C; it is required for profile kinds.
    """
    p, tau = params.p, params.tau
    P = params.P
    if kind is CharKind.AT_ZERO_DDE:
        return z + 1.0 - p * math.exp(-z * tau)
    if kind is CharKind.AT_KAPPA_DDE:
        return z + 1.0 + P * math.exp(-z * tau)
    if speed is None:
        raise ValueError(f"{kind.value} requires the speed parameter")
    if kind is CharKind.AT_ZERO_PROFILE:
        eps = speed
        return eps * z * z - z - 1.0 + p * math.exp(-z * tau)
    if kind is CharKind.AT_KAPPA_PROFILE_EPS:
        eps = speed
        return eps * z * z - z - 1.0 - P * math.exp(-z * tau)
    if kind is CharKind.AT_KAPPA_PROFILE_C:
        c = speed
        return z * z - c * z - 1.0 - P * math.exp(-z * c * tau)
    raise ValueError(f"unknown kind {kind}")


def mu_root(params: ModelParams, tol: float = 1e-12) -> float:
    """Unique positive root of z + 1 - p e^{-z tau}.

    The function is strictly increasing (derivative 1 + p tau e^{-z tau})
    and changes sign on [0, p], so bisection always succeeds; a few
    Newton steps polish the root to machine precision, which the series
    recurrence depends on.
    """
    p, tau = params.p, params.tau
    f = lambda z: z + 1.0 - p * math.exp(-z * tau)
    z = solve_bracketed(f, Bracket(0.0, p), tol=tol * (1.0 + p))
    for _ in range(4):
        e = p * math.exp(-z * tau)
        z -= (z + 1.0 - e) / (1.0 + tau * e)
    return z


def _profile_min_over_positive(params: ModelParams, c: float) -> tuple[float, float]:
    """Location and value of the minimum of z^2 - cz - 1 + p e^{-zc tau} on z > 0.

    The function is strictly convex in z, its derivative is negative at 0
    and positive for large z, so the minimizer is unique and interior.
    """
    p, tau = params.p, params.tau
    h = c * tau
    domega = lambda z: 2.0 * z - c - p * h * math.exp(-z * h)
    z_hi = 0.5 * (c + p * h) + 1.0
    z_m = solve_bracketed(domega, Bracket(0.0, z_hi), tol=1e-13 * (1.0 + z_hi))
    val = z_m * z_m - c * z_m - 1.0 + p * math.exp(-z_m * h)
    return z_m, val


def minimal_speed(params: ModelParams, tol: float = 1e-11) -> float:
    """Smallest c > 0 for which z^2 - cz - 1 + p e^{-zc tau} has a positive root.

    At the minimal speed the profile function at the zero equilibrium is
    tangent to the axis: the function and its z-derivative vanish
    simultaneously. Since the function is convex in z and decreases
    pointwise in c, the minimum over z > 0 is a decreasing function of c
    and bisection over c on its sign change yields the tangency point.
    """
    g = lambda c: _profile_min_over_positive(params, c)[1]
    c_hi = 1.0
    grow = 0
    while g(c_hi) > 0.0:
        c_hi *= 2.0
        grow += 1
        if grow > 60:
            raise BracketingError(
                f"no positive-root onset found up to c = {c_hi}; "
                f"min residual {g(c_hi / 2.0)}")
    c_lo = 1e-8
    if g(c_lo) <= 0.0:
        return c_lo
    while c_hi - c_lo > tol * (1.0 + c_hi):
        c_mid = 0.5 * (c_lo + c_hi)
        if g(c_mid) <= 0.0:
            c_hi = c_mid
        else:
            c_lo = c_mid
    return 0.5 * (c_lo + c_hi)


def linear_spreading_speed(params: ModelParams, beta: float,
                           tol: float = 1e-12) -> float:
    """Front speed selected by an initial datum with tail decay rate beta.

    Solves beta^2 - c*beta - 1 + p e^{-beta c tau} = 0 for c; the left
    side is strictly decreasing in c and positive at c = 0, so the root
    is unique.
    """
    if not beta > 0.0:
        raise ValueError(f"decay rate must be positive, got {beta}")
    p, tau = params.p, params.tau
    F = lambda c: beta * beta - c * beta - 1.0 + p * math.exp(-beta * c * tau)
    c_hi = 1.0
    grow = 0
    while F(c_hi) > 0.0:
        c_hi *= 2.0
        grow += 1
        if grow > 60:
            raise BracketingError(f"no spreading speed found up to c = {c_hi}")
    return solve_bracketed(F, Bracket(0.0, c_hi), tol=tol * (1.0 + c_hi))


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def _certified_window(P: float, c: float, h: float) -> float:
    """Left edge z_lo below which P e^{-zh} dominates z^2 - cz - 1.

    Uses the monotonicity of (c - 2z)/(z^2 - cz - 1) on the region where
    the denominator is positive: once the log-derivative of the quadratic
    falls below h and the exponential term exceeds the quadratic at the
    edge, domination (hence constant negative sign of the characteristic
    function) persists for every z below the edge. The smallest certified
    edge found by doubling keeps the exponent arguments moderate.
    """
    # the quadratic's negative root lies in (-1, 0), so any edge below -2
    # keeps its value positive and the log comparisons well defined
    z_lo = -2.0 * max(1.0, c)
    for _ in range(400):
        if math.isfinite(z_lo * z_lo):
            quad = z_lo * z_lo - c * z_lo - 1.0
            log_slope = (c - 2.0 * z_lo) / quad
            dominated = -z_lo * h > math.log(quad) - math.log(P)
            if dominated and log_slope < h:
                return z_lo
        z_lo *= 2.0
    raise BracketingError(f"window certification failed (P={P}, c={c})")


def negative_roots_at_kappa(params: ModelParams, c: float,
                            tangency_tol: float = 1e-9) -> RootReport:
    """All real negative roots of z^2 - cz - 1 - P e^{-zc tau}.

    The root count is 0, 1 or 2:

    * P <= 0 (p <= e): the function is strictly decreasing on z < 0 and
      crosses once.
    * P > 0: the function tends to -infinity on both ends of the negative
      axis (value -ln p at z = 0) and has a single hump in between, giving
      two roots, one double root at tangency, or none.

    The search window's left edge is certified so that the exponential
    term dominates below it. A hump maximum within ``tangency_tol`` of
    zero (where the derivative also vanishes) is reported as a double
    root, so boundary cases count as "root exists".
    """
    if not c > 0.0:
        raise ValueError(f"speed must be positive, got {c}")
    P, tau = params.P, params.tau
    h = c * tau
    kind = CharKind.AT_KAPPA_PROFILE_C

    if tau == 0.0 or P == 0.0:
        # quadratic z^2 - cz - (1+P): 1 + P = ln p > 0 gives one negative root
        z = 0.5 * (c - math.sqrt(c * c + 4.0 * (1.0 + params.P)))
        return RootReport(kind, (z,), (z - 1.0, 0.0))

    chi = lambda z: z * z - c * z - 1.0 - P * _safe_exp(-z * h)
    dchi = lambda z: 2.0 * z - c + P * h * _safe_exp(-z * h)

    def polish(z):
        # bisection tolerances scale with the window; Newton steps bring
        # the residual down to the report contract regardless of |chi'|
        for _ in range(3):
            d = dchi(z)
            if not math.isfinite(d) or d == 0.0:
                break
            step = chi(z) / d
            if not math.isfinite(step):
                break
            z -= step
        return z

    if P < 0.0:
        # strictly decreasing on the negative axis; expand until positive
        z_lo = -max(1.0, c)
        for _ in range(200):
            if chi(z_lo) > 0.0:
                break
            z_lo *= 2.0
        z = solve_bracketed(chi, Bracket(z_lo, 0.0), tol=1e-13 * (1.0 + abs(z_lo)))
        return RootReport(kind, (polish(z),), (z_lo, 0.0))

    z_lo = _certified_window(P, c, h)

    # critical points of chi on [z_lo, 0]: chi'' is increasing with a single
    # zero, so chi' is monotone on each side of it
    crit: list[float] = []
    z_dd = math.log(P * h * h / 2.0) / h  # zero of chi'' = 2 - P h^2 e^{-zh}
    seams = [z_lo]
    if z_lo < z_dd < 0.0:
        seams.append(z_dd)
    seams.append(0.0)
    for a, b in zip(seams[:-1], seams[1:]):
        fa, fb = dchi(a), dchi(b)
        if fa * fb < 0.0:
            crit.append(solve_bracketed(dchi, Bracket(a, b),
                                        tol=1e-13 * (1.0 + abs(a))))

    nodes = [z_lo] + sorted(crit) + [0.0]
    roots: list[float] = []
    for a, b in zip(nodes[:-1], nodes[1:]):
        if b - a <= 0.0:
            continue
        fa, fb = chi(a), chi(b)
        if fa * fb < 0.0:
            z = solve_bracketed(chi, Bracket(a, b),
                                tol=1e-13 * (1.0 + abs(a)))
            roots.append(polish(z))

    if not roots and crit:
        # tangency: the hump maximum touching zero counts as a double root
        z_m = max(crit, key=chi)
        scale = 1.0 + abs(P) + c * c
        if z_m < 0.0 and chi(z_m) >= -tangency_tol * scale:
            roots = [z_m, z_m]

    return RootReport(kind, tuple(sorted(roots)), (z_lo, 0.0))


def classify_tail(params: ModelParams, c: float) -> TailClass:
    """Tail shape of the wave profile at the positive equilibrium.

    Eventually monotone exactly when the wave-frame characteristic
    function at ln p has a real negative root; otherwise the profile
    keeps oscillating around ln p.
    """
    report = negative_roots_at_kappa(params, c)
    if report.real_roots:
        return TailClass.EVENTUALLY_MONOTONE
    return TailClass.OSCILLATORY_TAIL
