"""Tests for the method-of-steps integrator and shape diagnostics."""

import math

import numpy as np
import pytest

from nmwaves.dirichlet import build, zeta
from nmwaves.heteroclinic import (Trajectory, TrajectoryTail, crossings,
                                  integrate, nm_verdict, p_window,
                                  sign_change_count)
from nmwaves.model import ModelParams

EXAMPLE = ModelParams(p=365.0, tau=0.07)


def _example_run(t_end=None, K=64):
    expansion = build(EXAMPLE)
    return integrate(expansion, t_end=t_end, K=K)


def test_example_shape():
    # rises through ln p, peaks above the zeta bound, settles monotonically
    traj = _example_run()
    report = crossings(traj)
    lnp = EXAMPLE.kappa
    z = zeta(EXAMPLE)
    assert report.global_max > z > lnp
    assert report.tail_class is TrajectoryTail.MONOTONE_TAIL
    assert len(report.crossings) >= 1
    assert report.crossings[0][1] == 1
    assert abs(float(traj.u[-1]) - lnp) <= 1e-6
    assert report.anomalies == ()
    assert report.first_max is not None
    assert report.first_max[1] == pytest.approx(report.global_max, rel=1e-6)


def test_example_peak_bound_at_tau():
    # series-anchored normalization makes the bound u(tau) > zeta testable
    traj = _example_run()
    assert traj.interpolate(EXAMPLE.tau) > zeta(EXAMPLE)


def test_crossing_gaps_exceed_delay():
    report = crossings(_example_run())
    for g in report.gaps:
        assert g > EXAMPLE.tau


def test_positivity():
    traj = _example_run()
    assert np.all(traj.u > 0.0)


def test_upper_bound_by_leading_exponential():
    traj = _example_run()
    for t, u in zip(traj.t, traj.u):
        e = traj.provenance["mu"] * t
        if e < math.log(1e6):
            assert u < math.exp(e) or t > 0.0 and math.exp(e) > 1e6
    # explicit check for t <= 0
    sel = traj.t <= 0.0
    bound = np.exp(traj.provenance["mu"] * traj.t[sel])
    assert np.all(traj.u[sel] < bound)


def test_monotone_case_small_p():
    params = ModelParams(p=2.0, tau=0.1)
    expansion = build(params)
    traj = integrate(expansion)
    report = crossings(traj)
    assert report.crossings == ()
    assert report.first_max is None
    assert report.tail_class is TrajectoryTail.MONOTONE_TAIL
    assert np.all(np.diff(traj.u) > 0.0)
    assert traj.u[-1] < math.log(2.0)


def test_oscillating_case():
    # beyond the necessary-conditions region the tail keeps crossing ln p
    params = ModelParams(p=365.0, tau=0.2)
    expansion = build(params)
    traj = integrate(expansion)
    report = crossings(traj)
    assert report.tail_class is TrajectoryTail.OSCILLATING
    assert len(report.crossings) >= 5
    for g in report.gaps:
        assert g > params.tau
    # slopes alternate starting upward
    signs = [s for _, s in report.crossings]
    assert signs[0] == 1
    for a, b in zip(signs[:-1], signs[1:]):
        assert a != b


def test_fourth_order_self_convergence():
    expansion = build(EXAMPLE)
    vals = {}
    for K in (32, 64, 128):
        traj = integrate(expansion, t_end=14 * EXAMPLE.tau, K=K)
        vals[K] = float(traj.u[-1])
    ratio = (vals[32] - vals[64]) / (vals[64] - vals[128])
    assert 12.0 <= ratio <= 20.0


def test_history_seeded_from_series():
    expansion = build(EXAMPLE)
    traj = integrate(expansion, t_end=1.0)
    t0 = traj.t0
    for i in range(5):
        t = t0 - EXAMPLE.tau + i * EXAMPLE.tau / 4.0
        j = int(round((t - traj.t[0]) / traj.h))
        assert abs(traj.u[j] - expansion.evaluate(traj.t[j])) <= 1e-12


def test_integrate_validations():
    expansion = build(EXAMPLE)
    with pytest.raises(ValueError):
        integrate(expansion, K=8)
    with pytest.raises(ValueError):
        integrate(expansion, t_end=-100.0)


def test_crossings_synthetic_sine():
    # classifier-level unit test: a damped cosine crossing the level 5 times
    params = ModelParams(p=math.e ** 3, tau=0.5)  # kappa = 3
    h = 0.5 / 32
    t = np.arange(0.0, 16.0, h)
    u = 3.0 + np.exp(-0.2 * t) * np.cos(t)
    du = np.gradient(u, h)
    traj = Trajectory(t=t, u=u, du=du, t0=0.0, h=h, params=params,
                      provenance={})
    report = crossings(traj, level=3.0)
    assert len(report.crossings) == 5
    signs = [s for _, s in report.crossings]
    assert signs == [-1, 1, -1, 1, -1]
    assert report.tail_class is TrajectoryTail.OSCILLATING


def test_sign_change_count():
    assert sign_change_count([1.0, 2.0, 0.5, 3.0]) == 0
    assert sign_change_count([1.0, -1.0, 1.0]) == 2
    assert sign_change_count([1.0, -1.0, 1.0, -1.0]) == 3
    # zeros are dropped
    assert sign_change_count([1.0, 0.0, -1.0]) == 1
    # kappa shifts everything except the derivative slot
    assert sign_change_count([4.0, 2.0, 4.0, -1.0], kappa=3.0) == 3
    assert sign_change_count([4.0, 2.0, 4.0, 1.0], kappa=3.0) == 2
    with pytest.raises(ValueError):
        sign_change_count([1.0])


def test_sign_change_beyond_slow_oscillation():
    # (+,-,+,-) exceeds the slow-oscillation bound of two
    assert sign_change_count([1.0, -1.0, 1.0, -1.0]) > 2


def test_p_window():
    assert p_window(EXAMPLE) is True
    assert p_window(ModelParams(p=0.9 * math.e ** 2 + 1e-9, tau=0.07)) is False
    assert p_window(ModelParams(p=365.0, tau=0.073)) is False


def test_p_window_matches_growth_product():
    # upper bound of the window is P tau e^{1+tau} < 1 in disguise
    import random
    rng = random.Random(31)
    for _ in range(100):
        p = rng.uniform(7.5, 5000.0)
        tau = rng.uniform(0.005, 0.4)
        params = ModelParams(p=p, tau=tau)
        lhs = p_window(params)
        rhs = (p > math.e ** 2
               and params.P * tau * math.exp(1.0 + tau) < 1.0)
        assert lhs == rhs, (p, tau)


def test_nm_verdict_example():
    verdict = nm_verdict(EXAMPLE)
    assert verdict.verdict is True
    assert verdict.in_p_window is True
    assert verdict.zeta_gt_lnp is True
    assert verdict.max_u is not None and verdict.max_u >= verdict.zeta_value
    assert verdict.tail_class is TrajectoryTail.MONOTONE_TAIL


def test_nm_verdict_negative_cases():
    low = nm_verdict(ModelParams(p=0.9 * math.e ** 2, tau=0.1), run=False)
    assert low.verdict is False
    late = nm_verdict(ModelParams(p=365.0, tau=0.073), run=False)
    assert late.verdict is False
    assert late.in_p_window is False


def test_nm_verdict_small_amplitude_falls_back_to_short_series():
    # near p = 1 the normalized coefficients grow; the confirmation run
    # still happens through a shorter expansion
    verdict = nm_verdict(ModelParams(p=1.5, tau=0.3))
    assert verdict.verdict is False
    assert verdict.tail_class is TrajectoryTail.MONOTONE_TAIL
    assert verdict.crossing_count == 0


def test_trajectory_csv(tmp_path):
    from nmwaves.heteroclinic import write_trajectory_csv

    traj = _example_run(t_end=0.5)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "t,u,du"
    assert len(lines) == len(traj.t) + 1
