"""Command-line surface: prob, expect, classify, fit, simulate, verify.

Every command prints one JSON object (sorted keys) to stdout or to
``--output``; ``fit`` and ``expect`` can emit CSV curves instead.  With
``--deterministic`` the timestamp field is omitted, making repeated runs
byte-identical.  Exit codes: 0 success, 1 verification failure, 2 invalid
input, 3 numerical budget failure.
"""

import argparse
import csv
import io
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import analysis, bessel, montecarlo, verify
from .analysis import FitQualityError
from .quadrature import QuadratureBudgetError, adaptive_quadrature
from .walks import SeedSpec, simulate_continuous_pair, simulate_discrete_pair

ENV_SEED = "WALKCOLLIDE_SEED"
DEFAULT_SEED = verify.DEFAULT_SEED

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_BUDGET = 3


def _default_seed():
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        return DEFAULT_SEED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="walkcollide",
        description="Collision statistics of two independent simple random "
                    "walks on Z^d.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=False):
        p.add_argument("--output", default=None, metavar="PATH",
                       help="write to a file instead of stdout")
        p.add_argument("--deterministic", action="store_true",
                       help="omit wall-clock metadata for golden-file runs")
        if fmt:
            p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("prob", help="exact coordinate and collision "
                                    "probabilities at one time")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--time", type=float, required=True)
    common(p)

    p = sub.add_parser("expect", help="integral of the collision probability "
                                      "over [0, t-max]")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t-max", type=float, required=True)
    common(p, fmt=True)

    p = sub.add_parser("classify", help="finite/infinite collision verdict "
                                        "with growth diagnostics")
    p.add_argument("--dim", type=int, required=True)
    common(p)

    p = sub.add_parser("fit", help="extrapolate the leading constant of the "
                                   "collision probability decay")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t-max", type=float, default=1e6)
    p.add_argument("--t-grid", default=None, metavar="T1,T2,...",
                   help="explicit grid (overrides --t-max)")
    common(p, fmt=True)

    p = sub.add_parser("simulate", help="Monte Carlo mean collision count")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--mode", choices=("discrete", "continuous"),
                   required=True)
    p.add_argument("--steps", type=int, default=None,
                   help="step horizon (discrete mode)")
    p.add_argument("--horizon", type=float, default=None,
                   help="time horizon (continuous mode)")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    common(p)

    p = sub.add_parser("verify", help="run invariant suites; nonzero exit on "
                                      "any failure")
    p.add_argument("--suite", default="all",
                   choices=("all", *verify.SUITES))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    common(p)

    return parser


def _emit(args, payload, csv_rows=None):
    """Write the command result; returns the exit code."""
    if getattr(args, "format", "json") == "csv":
        if csv_rows is None:
            raise ValueError(f"--format csv is not available for "
                             f"{args.command}")
        buf = io.StringIO()
        writer = csv.writer(buf)
        for row in csv_rows:
            writer.writerow(row)
        text = buf.getvalue()
    else:
        out = {"command": args.command, "result": payload}
        if not args.deterministic:
            out["timestamp"] = datetime.now(timezone.utc).isoformat()
        text = json.dumps(out, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_prob(args):
    p_coord = bessel.coordinate_return_prob(args.time, args.dim)  # validates
    kern = bessel.i0_scaled(2.0 * args.time / args.dim)
    detail = bessel.collision_prob_detail(args.time, args.dim)
    payload = {
        "d": args.dim,
        "t": args.time,
        "p_coordinate": p_coord,
        "p_collision": detail.value,
        "log_p_collision": detail.log_value,
        "err_bound": detail.err_bound,
        "underflowed": detail.underflowed,
        "regime": kern.regime,
    }
    return _emit(args, payload)


def _cmd_expect(args):
    res = analysis.expected_occupation(args.dim, args.t_max)
    payload = res.to_dict()
    payload["d"] = args.dim
    if res.tail_bound is not None:
        payload["value_plus_tail"] = res.value + res.tail_bound
    rows = None
    if args.format == "csv":
        rows = [("t", "cumulative_value")]
        grid = np.geomspace(max(args.t_max * 1e-4, 1e-3), args.t_max, 33)
        cum = 0.0
        prev = 0.0
        for t in grid:
            seg = adaptive_quadrature(
                lambda x: bessel.collision_prob(x, args.dim), prev, float(t),
                atol=1e-11, rtol=1e-8)
            cum += seg.value
            prev = float(t)
            rows.append((f"{t!r}", f"{cum!r}"))
    return _emit(args, payload, rows)


def _cmd_classify(args):
    verdict = analysis.classify_dimension(args.dim)
    return _emit(args, verdict.to_dict())


def _cmd_fit(args):
    if args.t_grid is not None:
        grid = [float(x) for x in args.t_grid.split(",")]
    else:
        grid = analysis.default_fit_grid(args.t_max)
    fit = analysis.fit_leading_constant(args.dim, grid)
    rows = None
    if args.format == "csv":
        rows = [("t", "scaled_value")]
        rows.extend((f"{t!r}", f"{g!r}")
                    for t, g in zip(fit.t_grid, fit.scaled_values))
    return _emit(args, fit.to_dict(), rows)


def _cmd_simulate(args):
    seed = SeedSpec(args.seed if args.seed is not None else _default_seed())
    if args.mode == "discrete":
        if args.steps is None:
            raise ValueError("discrete mode requires --steps")
        horizon = args.steps
    else:
        if args.horizon is None:
            raise ValueError("continuous mode requires --horizon")
        horizon = args.horizon
    est = montecarlo.mc_expected_count(args.dim, args.mode, horizon,
                                       args.trials, seed, args.workers)
    payload = est.to_dict()
    payload.update({"d": args.dim, "mode": args.mode, "horizon": horizon})
    return _emit(args, payload)


def _cmd_verify(args):
    seed = args.seed if args.seed is not None else _default_seed()
    results, ok = verify.run_suites(args.suite, seed, args.workers)
    payload = {
        "seed": seed,
        "all_passed": ok,
        "suites": [r.to_dict() for r in results],
    }
    code = _emit(args, payload)
    return code if ok else EXIT_VERIFY_FAILED


_DISPATCH = {
    "prob": _cmd_prob,
    "expect": _cmd_expect,
    "classify": _cmd_classify,
    "fit": _cmd_fit,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (QuadratureBudgetError, FitQualityError) as exc:
        print(f"numerical budget failure: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
