"""Extends the heteroclinic solution past the series horizon by the method of steps.

The delay equation u' = -u + p u(t-tau) e^{-u(t-tau)} is integrated with
the classical 4-stage Runge-Kutta method on a uniform grid whose step
divides the delay exactly. Delayed values fall on stored grid nodes for
whole-step stage times and on half-nodes for the two middle stages, where
a cubic Hermite interpolant built from stored (u, u') keeps the scheme at
fourth order. The history on [t0 - tau, t0] is seeded from the series
expansion, which represents the exact solution there, so no derivative
discontinuities propagate from the handoff.

Also here: level-crossing extraction (crossings of ln p), the discrete
sign-change count used to detect slow oscillation, and the combined
verdict for existence of a non-monotone non-oscillating wave.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .dirichlet import DirichletExpansion, zeta
from .model import ModelParams
from .numerics import hermite_cubic, hermite_cubic_deriv


class BlowUpError(RuntimeError):
    """The integration left the physical range (|u| > 1e6)."""


class InconclusiveTail(RuntimeError):
    """Neither convergence nor oscillation was established by t_end."""


class TrajectoryTail(Enum):
    MONOTONE_TAIL = "monotone_tail"
    OSCILLATING = "oscillating"


@dataclass(frozen=True)
class Trajectory:
    """Dense-output record at uniform step h = tau / K.

    Samples cover [t0 - tau, t_end]; u' is the equation right-hand side
    evaluated on the grid. provenance carries the series metadata the
    history was seeded from.
    """

    t: np.ndarray
    u: np.ndarray
    du: np.ndarray
    t0: float
    h: float
    params: ModelParams
    provenance: dict

    def interpolate(self, t: float) -> float:
        """Cubic Hermite evaluation anywhere inside the sample range."""
        i = self._segment(t)
        return hermite_cubic(self.t[i], self.t[i + 1], self.u[i], self.u[i + 1],
                             self.du[i], self.du[i + 1], t)

    def interpolate_deriv(self, t: float) -> float:
        i = self._segment(t)
        return hermite_cubic_deriv(self.t[i], self.t[i + 1], self.u[i],
                                   self.u[i + 1], self.du[i], self.du[i + 1], t)

    def _segment(self, t: float) -> int:
        if t < self.t[0] or t > self.t[-1]:
            raise ValueError(f"t = {t} outside sampled range")
        i = int((t - self.t[0]) / self.h)
        return min(max(i, 0), len(self.t) - 2)


@dataclass(frozen=True)
class CrossingReport:
    """Crossings of a level by the trajectory, with shape diagnostics.

    crossings: (time, slope sign) pairs, slope sign +1 for upward.
    gaps: consecutive crossing-time differences.
    first_max: (time, value) of the first interior maximum, None if the
        trajectory is monotone over the sampled range.
    global_max: largest sampled value (Hermite-refined).
    tail_class: MONOTONE_TAIL or OSCILLATING.
    anomalies: human-readable violations (a gap <= tau, or a first
        crossing that is not upward).
    """

    level: float
    crossings: tuple[tuple[float, int], ...]
    gaps: tuple[float, ...]
    first_max: tuple[float, float] | None
    global_max: float
    tail_class: TrajectoryTail
    anomalies: tuple[str, ...]


def default_t_end(params: ModelParams, t0: float) -> float:
    """Default integration end: t0 + max(10, 20 tau, 5).

    Time is already measured in units of the linear decay rate, so a
    fixed budget covers both the excursion and the settling tail.
    """
    return t0 + max(10.0, 20.0 * params.tau, 5.0)


def integrate(expansion: DirichletExpansion, t_end: float | None = None,
              K: int = 64) -> Trajectory:
    """Integrate forward from the series handoff time.

    The handoff t0 = min(0, horizon - 0.5/mu) keeps a safety margin
    inside the certified horizon; the history on [t0 - tau, t0] is
    evaluated from the series directly.
    """
    if K < 20:
        raise ValueError(f"need at least 20 steps per delay interval, got {K}")
    params = expansion.params
    tau = params.tau
    if tau <= 0.0:
        raise ValueError("method of steps requires a positive delay")
    p = params.p
    t0 = min(0.0, expansion.horizon - 0.5 / expansion.mu)
    if t_end is None:
        t_end = default_t_end(params, t0)
    if not t_end > t0:
        raise ValueError(f"t_end = {t_end} must exceed the handoff t0 = {t0}")

    h = tau / K
    n_steps = int(math.ceil((t_end - t0) / h - 1e-12))
    n_total = K + n_steps + 1  # history nodes + integrated nodes
    t = np.empty(n_total)
    u = np.empty(n_total)
    du = np.empty(n_total)
    for i in range(K + 1):
        ti = t0 - tau + i * h
        t[i] = ti
        u[i] = expansion.evaluate(ti)
        du[i] = expansion.derivative(ti)

    exp_ = math.exp
    f = lambda x: p * x * exp_(-x)

    def delayed_half(j):
        # value at t[j] + h/2 via Hermite on [t[j], t[j+1]]
        um, up = u[j], u[j + 1]
        dm, dp_ = du[j], du[j + 1]
        return 0.5 * (um + up) + 0.125 * h * (dm - dp_)

    for n in range(K, K + n_steps):
        un = u[n]
        d0 = u[n - K]          # u(t_n - tau)
        dh = delayed_half(n - K)   # u(t_n + h/2 - tau)
        d1 = u[n - K + 1]      # u(t_n + h - tau)
        fb0 = f(d0)
        fbh = f(dh)
        fb1 = f(d1)
        k1 = -un + fb0
        k2 = -(un + 0.5 * h * k1) + fbh
        k3 = -(un + 0.5 * h * k2) + fbh
        k4 = -(un + h * k3) + fb1
        u_next = un + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if abs(u_next) > 1e6:
            raise BlowUpError(f"|u| exceeded 1e6 at t = {t[n] + h}")
        u[n + 1] = u_next
        t[n + 1] = t0 + (n + 1 - K) * h
        du[n + 1] = -u_next + fb1

    provenance = {
        "mu": expansion.mu,
        "eps": expansion.eps,
        "horizon": expansion.horizon,
        "n_coeffs": len(expansion.coeffs),
        "t0": t0,
        "K": K,
    }
    return Trajectory(t=t, u=u, du=du, t0=t0, h=h, params=params,
                      provenance=provenance)


def _refine_crossing(traj: Trajectory, i: int, level: float) -> tuple[float, int]:
    """Bisection on the Hermite interpolant within sample segment i."""
    a, b = traj.t[i], traj.t[i + 1]
    fa = traj.u[i] - level
    for _ in range(80):
        m = 0.5 * (a + b)
        fm = traj.interpolate(m) - level
        if fa * fm <= 0.0:
            b = m
        else:
            a, fa = m, fm
    tc = 0.5 * (a + b)
    slope = traj.interpolate_deriv(tc)
    return tc, (1 if slope >= 0.0 else -1)


def crossings(traj: Trajectory, level: float | None = None) -> CrossingReport:
    """Crossings of the level (default ln p) with tail classification.

    Raises InconclusiveTail when the run is too short to establish either
    a settling monotone tail or persistent oscillation.
    """
    params = traj.params
    if level is None:
        level = params.kappa
    tau = params.tau
    s = traj.u - level
    found: list[tuple[float, int]] = []
    for i in range(len(s) - 1):
        if s[i] == 0.0:
            if 0 < i and s[i - 1] * s[i + 1] < 0.0:
                found.append((float(traj.t[i]), 1 if s[i + 1] > 0 else -1))
        elif s[i] * s[i + 1] < 0.0:
            found.append(_refine_crossing(traj, i, level))

    gaps = tuple(b[0] - a[0] for a, b in zip(found[:-1], found[1:]))
    anomalies = [f"crossing gap {g:.6g} <= tau" for g in gaps if g <= tau]
    if found and found[0][1] != 1:
        anomalies.append("first crossing is not upward")
    for (_, s1), (_, s2) in zip(found[:-1], found[1:]):
        if s1 == s2:
            anomalies.append("consecutive crossings with equal slope sign")
            break

    # first interior maximum: first + -> - sign change of u'
    first_max = None
    for i in range(len(traj.du) - 1):
        if traj.du[i] > 0.0 and traj.du[i + 1] < 0.0:
            a, b = traj.t[i], traj.t[i + 1]
            for _ in range(80):
                m = 0.5 * (a + b)
                if traj.interpolate_deriv(m) > 0.0:
                    a = m
                else:
                    b = m
            tm = 0.5 * (a + b)
            first_max = (tm, traj.interpolate(tm))
            break

    i_max = int(np.argmax(traj.u))
    global_max = float(traj.u[i_max])
    if 0 < i_max < len(traj.u) - 1:
        lo = traj.t[i_max] - traj.h
        hi = traj.t[i_max] + traj.h
        for tt in np.linspace(lo, hi, 41):
            global_max = max(global_max, traj.interpolate(float(tt)))

    tail = _classify_tail(traj, found, level)
    return CrossingReport(level=level, crossings=tuple(found), gaps=gaps,
                          first_max=first_max, global_max=global_max,
                          tail_class=tail, anomalies=tuple(anomalies))


def _classify_tail(traj: Trajectory, found, level: float) -> TrajectoryTail:
    tau = traj.params.tau
    t_end = float(traj.t[-1])
    window = traj.t >= t_end - 2.0 * tau
    tail_u = traj.u[window]
    dev_end = abs(float(traj.u[-1]) - level)
    scale = 1e-12 * (1.0 + abs(level))
    diffs = np.diff(tail_u)
    monotone = bool(np.all(diffs >= -scale) or np.all(diffs <= scale))

    if found:
        t_last = found[-1][0]
        after = traj.t >= t_last
        amp = float(np.max(np.abs(traj.u[after] - level)))
        if monotone and (dev_end <= amp / 1e3 or dev_end < 1e-6):
            return TrajectoryTail.MONOTONE_TAIL
        t_quarter = traj.t0 + 0.75 * (t_end - traj.t0)
        if any(tc >= t_quarter for tc, _ in found):
            return TrajectoryTail.OSCILLATING
        raise InconclusiveTail(
            f"tail not settled by t_end = {t_end}: deviation {dev_end:.3e}, "
            f"post-crossing amplitude {amp:.3e}")

    # no crossings: a monotone approach with shrinking deviation is a tail
    i_ref = int(0.75 * (len(traj.u) - 1))
    dev_ref = abs(float(traj.u[i_ref]) - level)
    if monotone and dev_end < dev_ref:
        return TrajectoryTail.MONOTONE_TAIL
    raise InconclusiveTail(
        f"no crossings and no trend by t_end = {t_end}")


def sign_change_count(window: Sequence[float], kappa: float = 0.0) -> int:
    """Discrete sign-change count of a history window plus derivative slot.

    The window holds samples of u(t+s) for s in [-tau, 0] followed by
    u'(t) in the final slot; kappa is subtracted from every entry except
    that final slot. Zeros are dropped; the count is the number of strict
    sign alternations in what remains (0 for a single-signed window).
    A value of 1 or 2 characterizes slow oscillation; 3 or more rules
    it out.
    """
    if len(window) < 2:
        raise ValueError("window needs the history part plus the derivative slot")
    shifted = [v - kappa for v in window[:-1]] + [window[-1]]
    signs = [1 if v > 0 else -1 for v in shifted if v != 0.0]
    count = 0
    for a, b in zip(signs[:-1], signs[1:]):
        if a != b:
            count += 1
    return count


@dataclass(frozen=True)
class NmVerdict:
    """Combined criterion for a non-monotone non-oscillating wave.

    in_p_window: e^2 < p < exp(1 + exp(-1-tau)/tau).
    zeta_gt_lnp: the peak lower bound exceeds the equilibrium.
    verdict: conjunction of the two.
    Empirical confirmation from a run (when requested): the largest value
    of the heteroclinic and its tail class.
    """

    params: ModelParams
    in_p_window: bool
    zeta_value: float
    zeta_gt_lnp: bool
    verdict: bool
    max_u: float | None = None
    tail_class: TrajectoryTail | None = None
    crossing_count: int | None = None


def p_window(params: ModelParams) -> bool:
    """e^2 < p < exp(1 + exp(-1-tau)/tau).

    The upper bound is equivalent to P tau e^{1+tau} < 1.
    """
    if params.tau <= 0.0:
        return False
    upper = math.exp(1.0 + math.exp(-1.0 - params.tau) / params.tau)
    return math.e ** 2 < params.p < upper


def nm_verdict(params: ModelParams, run: bool = True, K: int = 64,
               t_end: float | None = None, n_coeffs: int = 40) -> NmVerdict:
    """Evaluate the nm-wave criteria, optionally confirming with a run.

    For p close to 1 the normalized series coefficients grow and long
    expansions trip the overflow guard; the confirmation run then falls
    back to shorter expansions (the handoff time respects the certified
    horizon for any truncation length).
    """
    from . import dirichlet as _d

    in_window = p_window(params)
    z = zeta(params)
    z_gt = z > params.kappa
    max_u = tail = n_cross = None
    if run and params.tau > 0.0:
        expansion = None
        for n in (n_coeffs, 12, 6, 3):
            if n > n_coeffs:
                continue
            try:
                expansion = _d.build(params, n_coeffs=max(n, 2))
                break
            except _d.CoefficientOverflow:
                continue
        if expansion is not None:
            traj = integrate(expansion, t_end=t_end, K=K)
            report = crossings(traj)
            max_u = report.global_max
            tail = report.tail_class
            n_cross = len(report.crossings)
    return NmVerdict(params=params, in_p_window=in_window, zeta_value=z,
                     zeta_gt_lnp=z_gt, verdict=in_window and z_gt,
                     max_u=max_u, tail_class=tail, crossing_count=n_cross)


def write_trajectory_csv(traj: Trajectory, path: str) -> None:
    """Dump (t, u, du) rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "u", "du"])
        for ti, ui, dui in zip(traj.t, traj.u, traj.du):
            w.writerow([repr(float(ti)), repr(float(ui)), repr(float(dui))])
