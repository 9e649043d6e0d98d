"""Parameter-region logic: necessary conditions, boundary curves, and sweeps.

For a fixed birth amplitude (through P = ln p - 1) the (tau, c) quadrant
splits along two boundary curves:

* T(c): below it the wave-frame characteristic function at ln p has a
  real negative root (region of eventually monotone tails), defined as
  the unique positive root in tau of

      e c^2 tau^2 / (2 + sqrt(c^4 tau^2 + 4 c^2 tau^2 + 4))
        * exp((sqrt(c^4 tau^2 + 4 c^2 tau^2 + 4) - c^2 tau) / 2) = 1/P.

* tau(c): below it Phi(tau, c) >= 1 - 1/P, where
  Phi(tau, c) = (nu - lambda) / (nu e^{-lambda tau} - lambda e^{-nu tau})
  and lambda < 0 < nu are the roots of eps z^2 - z - 1 with eps = c^{-2}.

T(c) < tau(c) for every c; the strict inequality (certified here by
numeric sweeps and by the positivity of the coefficients of an auxiliary
power series) gives the inclusion of the first region in the second.
Both regions are treated as closed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .charroots import negative_roots_at_kappa, _profile_min_over_positive
from .dirichlet import zeta
from .model import ModelParams, feedback_holds
from .numerics import Bracket, PowerSeries, solve_bracketed


class MembershipInconsistency(RuntimeError):
    """The two region-membership computations disagree off the boundary band."""


@dataclass(frozen=True)
class SpeedFrame:
    """Wave speed c with the derived quantities of the profile quadratic.

    lam and nu are the negative and positive roots of eps z^2 - z - 1
    with eps = c^{-2}; their product is -c^2.
    """

    c: float

    def __post_init__(self):
        if not self.c > 0.0:
            raise ValueError(f"speed must be positive, got {self.c}")

    @property
    def eps(self) -> float:
        return self.c ** -2

    @property
    def lam(self) -> float:
        # c(c - sqrt(c^2+4))/2 rewritten to avoid cancellation at large c
        return -2.0 * self.c / (self.c + math.sqrt(self.c * self.c + 4.0))

    @property
    def nu(self) -> float:
        return 0.5 * self.c * (self.c + math.sqrt(self.c * self.c + 4.0))


def tau_star() -> float:
    """Root of tau e^{1+tau} = 1, the universal delay cap for nm-waves."""
    f = lambda t: t * math.exp(1.0 + t) - 1.0
    return solve_bracketed(f, Bracket(0.0, 1.0), tol=1e-14)


@dataclass(frozen=True)
class NecessaryConditions:
    """The necessary conditions for a non-monotone non-oscillating wave.

    overall is the conjunction of the first three; the last two are
    consequences reported for diagnostics.
    """

    p_gt_e2: bool
    growth_product: float        # P tau e^{1+tau}, must be < 1
    growth_product_lt_1: bool
    delay_product: float         # p tau e^{tau-1}, must be > 1
    delay_product_gt_1: bool
    exp_decay_lt_half: bool      # e^{-mu tau} < 0.5
    qbar2_in_unit: bool          # qbar_2 in (-1, 0)
    overall: bool


def nm_necessary(params: ModelParams) -> NecessaryConditions:
    """Evaluate the necessary conditions at (p, tau)."""
    from .charroots import mu_root
    from .dirichlet import qbar2_closed_form

    p, tau = params.p, params.tau
    P = params.P
    growth = P * tau * math.exp(1.0 + tau)
    delay = p * tau * math.exp(tau - 1.0)
    c1 = p > math.e ** 2
    c2 = growth < 1.0
    c3 = delay > 1.0
    mu = mu_root(params)
    emt = math.exp(-mu * tau)
    qb2 = qbar2_closed_form(params)
    return NecessaryConditions(
        p_gt_e2=c1, growth_product=growth, growth_product_lt_1=c2,
        delay_product=delay, delay_product_gt_1=c3,
        exp_decay_lt_half=emt < 0.5, qbar2_in_unit=-1.0 < qb2 < 0.0,
        overall=c1 and c2 and c3)


def Phi(tau: float, frame: SpeedFrame) -> float:
    """(nu - lambda) / (nu e^{-lambda tau} - lambda e^{-nu tau}).

    Equals 1 at tau = 0 and decreases strictly to 0 as tau grows.
    """
    if tau < 0.0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    lam, nu = frame.lam, frame.nu
    return (nu - lam) / (nu * math.exp(-lam * tau) - lam * math.exp(-nu * tau))


def tau_of_c(P: float, c: float, tol: float = 1e-13) -> float:
    """Unique positive root of Phi(tau, c) = 1 - 1/P (requires P > 1)."""
    if not P > 1.0:
        raise ValueError(f"the threshold 1 - 1/P needs P > 1, got {P}")
    frame = SpeedFrame(c)
    target = 1.0 - 1.0 / P
    g = lambda t: Phi(t, frame) - target
    hi = 1.0
    while g(hi) > 0.0:
        hi *= 2.0
        if hi > 1e9:
            raise RuntimeError("Phi failed to fall below the threshold")
    return solve_bracketed(g, Bracket(0.0, hi), tol=tol * (1.0 + hi))


def tau_hat(P: float) -> float:
    """Large-speed limit ln(P/(P-1)) of tau(c) (requires P > 1)."""
    if not P > 1.0:
        raise ValueError(f"tau_hat needs P > 1, got {P}")
    return math.log(P / (P - 1.0))


def _monotone_boundary_lhs(tau: float, c: float) -> float:
    """Left side of the T(c) defining equation, conditioned via h = c tau.

    With X = h^2 (c^2 + 4) + 4 the exponent (sqrt(X) - c h)/2 is
    rewritten as 2 (h^2 + 1)/(sqrt(X) + c h) to avoid cancellation at
    large c.
    """
    h = c * tau
    X = h * h * (c * c + 4.0) + 4.0
    sX = math.sqrt(X)
    expo = 2.0 * (h * h + 1.0) / (sX + c * h)
    return math.e * h * h / (2.0 + sX) * math.exp(expo)


def T_of_c(P: float, c: float, tol: float = 1e-13) -> float:
    """Unique positive root in tau of the monotone-tail boundary equation.

    The left side increases strictly from 0, so bisection on the sign
    change against 1/P always succeeds (requires P > 0).
    """
    if not P > 0.0:
        raise ValueError(f"the boundary needs P > 0, got {P}")
    target = 1.0 / P
    g = lambda t: _monotone_boundary_lhs(t, c) - target
    hi = 1.0
    while g(hi) < 0.0:
        hi *= 2.0
        if hi > 1e9:
            raise RuntimeError("boundary left side failed to reach 1/P")
    return solve_bracketed(g, Bracket(0.0, hi), tol=tol * (1.0 + hi))


def T_star(P: float, tol: float = 1e-14) -> float:
    """Large-speed limit of T(c): the root of P e T e^T = 1 (P > 0)."""
    if not P > 0.0:
        raise ValueError(f"T_star needs P > 0, got {P}")
    g = lambda t: P * math.e * t * math.exp(t) - 1.0
    hi = 1.0
    while g(hi) < 0.0:
        hi *= 2.0
    return solve_bracketed(g, Bracket(0.0, hi), tol=tol * (1.0 + hi))


def membership(params: ModelParams, c: float,
               band: float = 1e-6) -> tuple[bool, bool]:
    """(in the monotone-tail region, in the slow-oscillation region).

    The first flag is computed two independent ways: a direct negative
    root search of the wave-frame characteristic function, and the
    comparison tau <= T(c). Off a ``band``-wide strip around the boundary
    the two must agree or MembershipInconsistency is raised; inside the
    strip the boundary comparison wins (both regions are closed).

    For P <= 1 the slow-oscillation threshold 1 - 1/P is <= 0 < Phi and
    the second flag is True by convention.
    """
    P, tau = params.P, params.tau
    by_roots = len(negative_roots_at_kappa(params, c).real_roots) > 0
    if P <= 0.0:
        in_dm = True
        if not by_roots:
            raise MembershipInconsistency(
                f"P = {P} <= 0 must always give a negative root")
    else:
        T_c = T_of_c(P, c)
        by_boundary = tau <= T_c
        if abs(tau - T_c) <= band:
            in_dm = by_boundary
        else:
            if by_roots != by_boundary:
                raise MembershipInconsistency(
                    f"root search says {by_roots}, boundary says {by_boundary} "
                    f"at (tau={tau}, c={c}, T(c)={T_c})")
            in_dm = by_roots

    if P <= 1.0:
        in_ds = True
    else:
        in_ds = Phi(tau, SpeedFrame(c)) >= 1.0 - 1.0 / P
    return in_dm, in_ds


@dataclass(frozen=True)
class PropositionFlags:
    """Hypotheses of the wavefront existence statement at (p, tau, c)."""

    positive_root_at_zero: bool   # profile function at 0 has a positive root
    ce_threshold: float           # (Gamma^2 + Gamma)/(Gamma^2 + 1), Gamma = -P
    ce_holds: bool                # Phi(tau, c) >= ce_threshold
    feedback: bool                # negative feedback on the invariant interval


def proposition_hypotheses(params: ModelParams, c: float) -> PropositionFlags:
    """Evaluate the three existence hypotheses for the blowflies birth law."""
    P = params.P
    gamma = -P
    threshold = (gamma * gamma + gamma) / (gamma * gamma + 1.0)
    _, min_val = _profile_min_over_positive(params, c)
    return PropositionFlags(
        positive_root_at_zero=min_val <= 0.0,
        ce_threshold=threshold,
        ce_holds=Phi(params.tau, SpeedFrame(c)) >= threshold,
        feedback=feedback_holds(params))


# ---------------------------------------------------------------------------
# inclusion sweep and its positivity certificate
# ---------------------------------------------------------------------------

def inclusion_inequality_margin(tau: float, c: float) -> float:
    """Left minus right side of the strict boundary-separation inequality.

    The inequality (positive margin) states that the T(c) boundary
    expression exceeds 1 - Phi(tau, c) for every tau > 0, c > 0; it is
    what keeps T(c) strictly below tau(c).
    """
    return _monotone_boundary_lhs(tau, c) - (1.0 - Phi(tau, SpeedFrame(c)))


def certificate_coefficient(k: int, w: float) -> float:
    """Closed-form coefficient A_k(w) of the positivity certificate series.

    A(w, sigma) = e^{w sigma}(e sigma^2 (w-1) - (4 + w sigma))
                + e sigma^2 (w-1)^2 + (4 + w sigma)(1 + w(e^sigma - 1))
    expands as w * sum_{k>=2} A_k(w) sigma^k / k!. A_2 has its own form;
    for k >= 3 the general formula applies. Positivity of the A_k on
    w in (1, 2] (k = 3 only up to 1.75) certifies the inequality.
    """
    if k == 2:
        return 2.0 * (math.e - 2.0) * (w - 1.0)
    if k >= 3:
        return (-w ** (k - 1) * (k + 4) + math.e * k * (k - 1) * w ** (k - 2)
                - math.e * k * (k - 1) * w ** (k - 3) + 4.0 + k * w)
    raise ValueError(f"coefficients start at k = 2, got {k}")


def certificate_value(w: float, sigma: float) -> float:
    """The positivity certificate A(w, sigma) evaluated directly.

    A(w, sigma) = e^{w sigma}(e sigma^2 (w-1) - (4 + w sigma))
                + e sigma^2 (w-1)^2 + (4 + w sigma)(1 + w(e^sigma - 1)),
    positive for w in (1, 2] and sigma > 0; its positivity is equivalent
    to the boundary-separation inequality after the substitutions
    w = (1/z)^2 + 1, sigma = h z with h = c tau and z the scaled speed
    variable.
    """
    e = math.e
    return (math.exp(w * sigma) * (e * sigma * sigma * (w - 1.0)
                                   - (4.0 + w * sigma))
            + e * sigma * sigma * (w - 1.0) ** 2
            + (4.0 + w * sigma) * (1.0 + w * math.expm1(sigma)))


def certificate_quadratic_discriminant(w: float) -> float:
    """Discriminant of 12 A_2 + 4 A_3 s + A_4 s^2 (as a polynomial in s).

    Negative on (1, 2], which makes that quadratic positive for every
    s > 0 and covers the region where A_3 itself changes sign.
    """
    a2 = certificate_coefficient(2, w)
    a3 = certificate_coefficient(3, w)
    a4 = certificate_coefficient(4, w)
    return 16.0 * (a3 * a3 - 3.0 * a2 * a4)


def certificate_series(w: float, order: int) -> list[float]:
    """A_k(w) for k = 0..order computed by expanding A(w, sigma) directly.

    Independent of the closed forms: builds the sigma-series of A with
    truncated power-series arithmetic and rescales by k!/w. The k = 0, 1
    entries are zero.
    """
    n = order
    sigma = [0.0] * (n + 1)
    sigma[1] = 1.0
    s = PowerSeries(sigma)
    one = PowerSeries([1.0] + [0.0] * n)

    def const(a):
        return PowerSeries([a] + [0.0] * n)

    e = math.e
    exp_ws = s.scale(w).exp()
    exp_s = s.exp()
    s2 = s * s
    term1 = exp_ws * (s2.scale(e * (w - 1.0)) - (const(4.0) + s.scale(w)))
    term2 = s2.scale(e * (w - 1.0) ** 2)
    term3 = (const(4.0) + s.scale(w)) * (one + (exp_s - one).scale(w))
    A = term1 + term2 + term3
    return [A[k] * math.factorial(k) / w for k in range(n + 1)]


@dataclass(frozen=True)
class SweepReport:
    """Result of the region-inclusion sweep.

    boundary_margins: per (P, c) the gap tau(c) - T(c), all required > 0.
    min_inequality_margin: smallest left-minus-right value of the
        separation inequality over the (tau, c) grid.
    limit_errors: |tau(c_max) - tau_hat| and |T(c_max) - T_star| per P.
    violations: descriptions of any failures (empty on success).
    """

    P_values: tuple[float, ...]
    min_boundary_margin: float
    min_inequality_margin: float
    inequality_argmin: tuple[float, float]
    limit_errors: tuple[tuple[float, float, float], ...]
    violations: tuple[str, ...]
    rows: tuple[tuple[float, float, float, float], ...]  # (P, c, T_c, tau_c)


def verify_inclusion(P_grid: Sequence[float] = (1.1, 2.0, 4.8999, 10.0),
                     n_c: int = 200,
                     c_range: tuple[float, float] = (0.01, 1e3),
                     n_tau_grid: int = 300,
                     tau_range: tuple[float, float] = (1e-3, 10.0),
                     limit_tol: float = 1e-3) -> SweepReport:
    """Sweep T(c) < tau(c) and the separation inequality over grids.

    Any violation is collected rather than raised, so the report can be
    rendered; callers treat a non-empty violation list as failure.
    """
    violations: list[str] = []
    rows: list[tuple[float, float, float, float]] = []
    c_lo, c_hi = c_range
    cs = [c_lo * (c_hi / c_lo) ** (i / (n_c - 1)) for i in range(n_c)]
    min_boundary = math.inf
    limit_errors = []
    for P in P_grid:
        for c in cs:
            T_c = T_of_c(P, c)
            tau_c = tau_of_c(P, c)
            rows.append((P, c, T_c, tau_c))
            margin = tau_c - T_c
            min_boundary = min(min_boundary, margin)
            if margin <= 0.0:
                violations.append(
                    f"T(c) >= tau(c) at P={P}, c={c}: {T_c} vs {tau_c}")
        err_tau = abs(tau_of_c(P, c_hi) - tau_hat(P))
        err_T = abs(T_of_c(P, c_hi) - T_star(P))
        limit_errors.append((P, err_tau, err_T))
        if err_tau > limit_tol:
            violations.append(f"tau(c) limit off by {err_tau} at P={P}")
        if err_T > limit_tol:
            violations.append(f"T(c) limit off by {err_T} at P={P}")

    t_lo, t_hi = tau_range
    taus = [t_lo * (t_hi / t_lo) ** (i / (n_tau_grid - 1))
            for i in range(n_tau_grid)]
    min_margin = math.inf
    argmin = (taus[0], cs[0])
    cs_ineq = [c_lo * (c_hi / c_lo) ** (i / (n_tau_grid - 1))
               for i in range(n_tau_grid)]
    for t in taus:
        for c in cs_ineq:
            m = inclusion_inequality_margin(t, c)
            if m < min_margin:
                min_margin = m
                argmin = (t, c)
            if m <= 0.0:
                violations.append(
                    f"separation inequality non-positive at tau={t}, c={c}")

    return SweepReport(P_values=tuple(P_grid),
                       min_boundary_margin=min_boundary,
                       min_inequality_margin=min_margin,
                       inequality_argmin=argmin,
                       limit_errors=tuple(limit_errors),
                       violations=tuple(violations),
                       rows=tuple(rows))


# ---------------------------------------------------------------------------
# (tau, p) region map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionReport:
    """Full per-point region flags at (p, tau), optionally at a speed c."""

    params: ModelParams
    c: float | None
    in_p_window: bool
    zeta_value: float
    zeta_gt_lnp: bool
    nm_necessary: NecessaryConditions
    gsc: bool
    in_dm: bool | None
    in_ds: bool | None
    T_c: float | None
    tau_c: float | None
    tau_hat: float | None
    T_star: float | None
    tau_star: float


def region_report(params: ModelParams, c: float | None = None) -> RegionReport:
    """Assemble every region flag for one parameter point."""
    from .heteroclinic import p_window
    from .model import gsc_holds

    nec = nm_necessary(params)
    z = zeta(params)
    in_dm = in_ds = T_c = tau_c = th = ts = None
    if c is not None:
        in_dm, in_ds = membership(params, c)
        if params.P > 0.0:
            T_c = T_of_c(params.P, c)
            ts = T_star(params.P)
        if params.P > 1.0:
            tau_c = tau_of_c(params.P, c)
            th = tau_hat(params.P)
    return RegionReport(params=params, c=c, in_p_window=p_window(params),
                        zeta_value=z, zeta_gt_lnp=z > params.kappa,
                        nm_necessary=nec, gsc=gsc_holds(params),
                        in_dm=in_dm, in_ds=in_ds, T_c=T_c, tau_c=tau_c,
                        tau_hat=th, T_star=ts, tau_star=tau_star())


def region_grid(tau_values: Sequence[float], p_values: Sequence[float],
                threads: int = 1) -> list[tuple[float, float, bool]]:
    """(tau, ln ln p, flag) rows over a (tau, p) grid.

    The flag marks points satisfying both nm-wave criteria: p inside the
    admissible window and zeta > ln p. The window test is cheap and
    short-circuits the zeta evaluation.
    """
    from .heteroclinic import p_window
    from .util import parallel_map

    points = [(t, p) for t in tau_values for p in p_values]

    def one(point):
        t, p = point
        params = ModelParams(p=p, tau=t)
        flag = False
        if p_window(params):
            flag = zeta(params) > params.kappa
        return (t, math.log(math.log(p)), flag)

    return parallel_map(one, points, threads)
