"""Command-line entry point.

Subcommands map one-to-one onto the library surface: analyze, series,
heteroclinic, atlas, boundaries, simulate, diagnose, verify. Data files
carry no timestamps so byte-identical reruns are possible; wall time and
resolved configuration go into a sibling run manifest.

Exit codes: 0 success, 1 domain error, 2 verification failure, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Sequence

USAGE_EXIT = 64


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(USAGE_EXIT)


def _parse_range(text: str) -> list[float]:
    """LO:HI:N inclusive linear range."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be LO:HI:N, got {text!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1:
        raise ValueError("range count must be >= 1")
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _manifest(subcommand: str, config: dict, outputs: list[str],
              started: float) -> None:
    if not outputs:
        return
    from . import __version__
    payload = {
        "subcommand": subcommand,
        "config": config,
        "version": __version__,
        "wall_time_s": time.time() - started,
        "outputs": outputs,
    }
    path = outputs[0] + ".manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_analyze(args) -> int:
    from .atlas import region_report
    from .charroots import classify_tail, minimal_speed, mu_root
    from .dirichlet import qbar2_closed_form, zeta, zeta_by_quadrature
    from .heteroclinic import nm_verdict
    from .model import ModelParams

    started = time.time()
    params = ModelParams(p=args.p, tau=args.tau)
    verdict = nm_verdict(params, run=params.tau > 0.0)
    report = region_report(params, c=args.c)
    nec = report.nm_necessary
    payload = {
        "p": params.p,
        "tau": params.tau,
        "lnp": params.kappa,
        "P": params.P,
        "mu": mu_root(params),
        "qbar2": qbar2_closed_form(params),
        "zeta": report.zeta_value,
        "zeta_quadrature": zeta_by_quadrature(params),
        "in_p_window": verdict.in_p_window,
        "zeta_gt_lnp": verdict.zeta_gt_lnp,
        "nm_verdict": verdict.verdict,
        "nm_necessary": {
            "p_gt_e2": nec.p_gt_e2,
            "growth_product": nec.growth_product,
            "delay_product": nec.delay_product,
            "overall": nec.overall,
        },
        "gsc": report.gsc,
        "heteroclinic": None,
        "metadata": {
            "frames": "times in units of the linear decay rate; "
                      "u dimensionless; series normalized to leading "
                      "coefficient 1",
            "mu": "decay-rate root, 1/time",
            "zeta": "dimensionless population level",
        },
    }
    if verdict.max_u is not None:
        payload["heteroclinic"] = {
            "max_u": verdict.max_u,
            "crossings": verdict.crossing_count,
            "tail": verdict.tail_class.value,
        }
    if args.c is not None:
        payload["c"] = args.c
        payload["c_star"] = minimal_speed(params)
        payload["tail_class"] = classify_tail(params, args.c).value
        payload["in_dm"] = report.in_dm
        payload["in_ds"] = report.in_ds
    _write_json(args.out, payload)
    if args.out:
        _manifest("analyze", {"p": args.p, "tau": args.tau, "c": args.c},
                  [args.out], started)
    return 0


def _cmd_series(args) -> int:
    from .dirichlet import build, write_coefficients_csv, write_profile_csv
    from .model import ModelParams

    started = time.time()
    params = ModelParams(p=args.p, tau=args.tau)
    expansion = build(params, n_coeffs=args.n, eps=args.eps)
    coeffs_path, profile_path = args.out.split(",")
    write_coefficients_csv(expansion, coeffs_path)
    t_hi = min(0.0, expansion.horizon - 0.5 / expansion.mu)
    t_lo = t_hi - 8.0 / expansion.mu
    ts = [t_lo + (t_hi - t_lo) * i / 199 for i in range(200)]
    write_profile_csv(expansion, profile_path, ts)
    _manifest("series",
              {"p": args.p, "tau": args.tau, "n": args.n,
               "eps": expansion.eps, "horizon": expansion.horizon},
              [coeffs_path, profile_path], started)
    return 0


def _cmd_heteroclinic(args) -> int:
    from .dirichlet import build
    from .heteroclinic import crossings, integrate, write_trajectory_csv
    from .model import ModelParams

    started = time.time()
    params = ModelParams(p=args.p, tau=args.tau)
    expansion = build(params)
    traj = integrate(expansion, t_end=args.t_end, K=args.k)
    report = crossings(traj)
    traj_path, cross_path = args.out.split(",")
    write_trajectory_csv(traj, traj_path)
    payload = {
        "level": report.level,
        "crossings": [{"t": t, "slope_sign": s} for t, s in report.crossings],
        "gaps": list(report.gaps),
        "first_max": (None if report.first_max is None
                      else {"t": report.first_max[0], "u": report.first_max[1]}),
        "global_max": report.global_max,
        "tail_class": report.tail_class.value,
        "anomalies": list(report.anomalies),
    }
    with open(cross_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _manifest("heteroclinic",
              {"p": args.p, "tau": args.tau, "t_end": args.t_end, "k": args.k},
              [traj_path, cross_path], started)
    return 0


def _cmd_atlas(args) -> int:
    from .atlas import region_grid
    from .util import resolve_threads

    started = time.time()
    taus = _parse_range(args.tau)
    ps = _parse_range(args.p)
    rows = region_grid(taus, ps, threads=resolve_threads(args.threads))
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        fh.write("tau,lnlnp,flag\n")
        for tau, lnlnp, flag in rows:
            fh.write(f"{tau!r},{lnlnp!r},{int(flag)}\n")
    _manifest("atlas", {"tau": args.tau, "p": args.p}, [args.out], started)
    return 0


def _cmd_boundaries(args) -> int:
    from .atlas import T_of_c, T_star, tau_hat, tau_of_c

    started = time.time()
    P = args.P
    cs = _parse_range(args.c)
    th = tau_hat(P) if P > 1.0 else math.nan
    ts = T_star(P) if P > 0.0 else math.nan
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        fh.write("c,T_of_c,tau_of_c,tau_hat,T_star\n")
        for c in cs:
            T_c = T_of_c(P, c) if P > 0.0 else math.nan
            tau_c = tau_of_c(P, c) if P > 1.0 else math.nan
            fh.write(f"{c!r},{T_c!r},{tau_c!r},{th!r},{ts!r}\n")
    _manifest("boundaries", {"P": P, "c": args.c}, [args.out], started)
    return 0


def _cmd_simulate(args) -> int:
    from .pde import (config_from_dict, preset, simulate, write_front_csv,
                      write_metadata_json, write_snapshots_csv)

    started = time.time()
    if (args.preset is None) == (args.config is None):
        raise ValueError("exactly one of --preset / --config is required")
    if args.preset is not None:
        config = preset(args.preset)
    else:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = config_from_dict(json.load(fh))
    record = simulate(config)
    snaps_path, front_path, meta_path = args.out.split(",")
    write_snapshots_csv(record, snaps_path)
    write_front_csv(record, front_path)
    write_metadata_json(record, meta_path)
    _manifest("simulate", record.config.to_dict(),
              [snaps_path, front_path, meta_path], started)
    return 0


def _cmd_diagnose(args) -> int:
    from .diagnostics import classify_profile, estimate_speed, front_position
    from .model import ModelParams
    from .pde import read_snapshots_csv

    started = time.time()
    params = ModelParams(p=args.p, tau=args.tau)
    x, snaps = read_snapshots_csv(args.infile)
    if not snaps:
        raise ValueError(f"no snapshots in {args.infile}")
    level = 0.5 * params.kappa
    times, positions = [], []
    if args.front:
        with open(args.front, "r", encoding="utf-8") as fh:
            fh.readline()
            for line in fh:
                cells = line.strip().split(",")
                if len(cells) == 2:
                    times.append(float(cells[0]))
                    positions.append(float(cells[1]))
    else:
        for t, u in snaps:
            times.append(t)
            try:
                positions.append(front_position(x, u, level))
            except ValueError:
                positions.append(math.nan)
    payload: dict = {"tracking_level": level}
    try:
        est = estimate_speed(times, positions)
        t_last, u_last = snaps[-1]
        xi = x - est.slope * t_last
        shape = classify_profile(xi, u_last, params, speed=est.speed)
        payload.update({
            "speed": est.speed, "speed_stderr": est.stderr,
            "direction": est.direction, "shape": shape.value,
            "overshoot": float(max(u_last)) - params.kappa,
        })
    except ValueError as exc:
        t_last, u_last = snaps[-1]
        shape = classify_profile(x, u_last, params)
        payload.update({"speed": None, "speed_error": str(exc),
                        "shape": shape.value,
                        "overshoot": float(max(u_last)) - params.kappa})
    _write_json(args.out, payload)
    if args.out:
        _manifest("diagnose", {"in": args.infile, "p": args.p, "tau": args.tau},
                  [args.out], started)
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_suite

    started = time.time()
    ok, margins = run_suite(args.suite, grid=args.grid,
                            threads=args.threads)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write("check,margin,threshold,status\n")
            for name, margin, threshold, passed in margins:
                fh.write(f"{name},{margin!r},{threshold!r},"
                         f"{'pass' if passed else 'FAIL'}\n")
        _manifest("verify", {"suite": args.suite, "grid": args.grid},
                  [args.out], started)
    for name, margin, threshold, passed in margins:
        status = "pass" if passed else "FAIL"
        sys.stdout.write(f"{status:4s}  {name}: margin {margin:.6g} "
                         f"(threshold {threshold:.6g})\n")
    return 0 if ok else 2


def build_parser() -> CliParser:
    parser = CliParser(prog="nmwaves",
                       description="Delayed reaction-diffusion wavefront "
                                   "analysis for the Nicholson blowflies "
                                   "equation")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for sweeps (NW_THREADS overrides)")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="scalar analysis at one (p, tau)")
    a.add_argument("--p", type=float, required=True)
    a.add_argument("--tau", type=float, required=True)
    a.add_argument("--c", type=float, default=None)
    a.add_argument("--out", default=None)
    a.set_defaults(func=_cmd_analyze)

    s = sub.add_parser("series", help="series coefficients and bounds profile")
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--n", type=int, default=40)
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--out", required=True,
                   help="coeffs.csv,profile.csv")
    s.set_defaults(func=_cmd_series)

    h = sub.add_parser("heteroclinic", help="integrate past the horizon")
    h.add_argument("--p", type=float, required=True)
    h.add_argument("--tau", type=float, required=True)
    h.add_argument("--t-end", dest="t_end", type=float, default=None)
    h.add_argument("--k", type=int, default=64,
                   help="steps per delay interval")
    h.add_argument("--out", required=True, help="traj.csv,crossings.json")
    h.set_defaults(func=_cmd_heteroclinic)

    g = sub.add_parser("atlas", help="(tau, p) region map")
    g.add_argument("--tau", required=True, help="LO:HI:N")
    g.add_argument("--p", required=True, help="LO:HI:N")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_atlas)

    b = sub.add_parser("boundaries", help="boundary curves over c")
    b.add_argument("--P", type=float, required=True)
    b.add_argument("--c", required=True, help="LO:HI:N")
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_boundaries)

    m = sub.add_parser("simulate", help="run a reaction-diffusion simulation")
    m.add_argument("--preset",
                   choices=["minimal-front", "fast-front", "fast-front-smoke"],
                   default=None)
    m.add_argument("--config", default=None, help="JSON config file")
    m.add_argument("--out", required=True,
                   help="snaps.csv,front.csv,meta.json")
    m.set_defaults(func=_cmd_simulate)

    d = sub.add_parser("diagnose", help="front diagnostics from snapshots")
    d.add_argument("--in", dest="infile", required=True)
    d.add_argument("--p", type=float, required=True)
    d.add_argument("--tau", type=float, required=True)
    d.add_argument("--front", default=None,
                   help="optional dense front-track CSV for the speed fit")
    d.add_argument("--out", default=None)
    d.set_defaults(func=_cmd_diagnose)

    v = sub.add_parser("verify", help="certified sweeps and property suites")
    v.add_argument("--suite", choices=["regions", "series", "model"],
                   required=True)
    v.add_argument("--grid", type=int, default=None,
                   help="override sweep grid resolution")
    v.add_argument("--out", default=None, help="margins CSV")
    v.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
