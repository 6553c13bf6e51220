"""Command line entry point ``caustic-bench``."""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import List, Optional

import numpy as np

from . import exponents
from .harness import (SweepError, make_config, read_config_file, reports_json, run_sweep, suite_configs,
                      sweep_csv, verify, write_text)
from .phases import NAMED_PHASES, classify_caustic, make_model_phase, parse_phase
from .scenarios import SCENARIOS

THEOREMS = {
    "3.7": "lp-lq", "lp-lq": "lp-lq",
    "3.9": "hardy", "hardy": "hardy",
    "6.2": "halfwave", "halfwave": "halfwave",
}


def _csv_floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _dyadic(text: str) -> float:
    """``2^a``, ``2**a`` or a positive number; returns the log2 exponent."""
    m = re.fullmatch(r"\s*2\s*(?:\^|\*\*)\s*\(?\s*(-?\d+(?:\.\d+)?)\s*\)?\s*", text)
    if m:
        return float(m.group(1))
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("ladder bounds must be positive")
    return float(np.log2(v))


def _phase(text: str):
    key = text.strip().lower()
    if key in NAMED_PHASES:
        return make_model_phase(NAMED_PHASES[key])
    if re.fullmatch(r"a\d+", key):
        return make_model_phase(int(key[1:]) - 1)
    return parse_phase(text)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_classify(args) -> int:
    phase = _phase(args.phase)
    x = _csv_floats(args.x)
    alpha = _csv_floats(args.alpha)
    point = (x, alpha[0] if len(alpha) == 1 else alpha)
    profile = classify_caustic(phase, point)
    _emit(profile.to_dict())
    return 0


def cmd_regions(args) -> int:
    regions = exponents.region_vertices(args.m)
    out = {
        "m": args.m,
        "q_m": str(exponents.q_threshold(args.m)),
        "p_m": str(exponents.p_threshold(args.m)),
        "kappa": str(exponents.kappa(args.m)),
        "regions": {k: r.to_dict() for k, r in regions.items()},
    }
    point = None
    if (args.p is None) != (args.q is None):
        raise SystemExit("regions: --p and --q go together")
    if args.p is not None:
        point = (exponents.reciprocal(args.p), exponents.reciprocal(args.q))
        out["point"] = [str(point[0]), str(point[1])]
        out["region"] = exponents.classify_pq(args.p, args.q, args.m)
    if args.svg:
        from .diagram import write_regions_svg

        write_regions_svg(args.svg, args.m, point)
        out["svg"] = args.svg
    _emit(out)
    return 0


def cmd_integrate(args) -> int:
    from .oscillatory import BumpAmplitude, u_tau_many

    phase = _phase(args.phase)
    res = u_tau_many(phase, [_csv_floats(args.x)], args.tau, BumpAmplitude(args.amplitude_scale), tol=args.tol)
    v = complex(res.value[0])
    _emit({"value": [v.real, v.imag], "abs": abs(v), "err_estimate": res.abs_error_estimate,
           "panels": res.panels_used, "converged": res.converged})
    return 0


def _overrides(args) -> dict:
    out = {}
    for key in ("q", "m", "l"):
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


def cmd_sweep(args) -> int:
    ladder = None
    if args.min is not None or args.max is not None:
        sc = SCENARIOS[args.scenario]
        lo = sc.ladder[0] if args.min is None else args.min
        hi = sc.ladder[1] if args.max is None else args.max
        ladder = (lo, hi)
    config = make_config(args.scenario, _overrides(args), ladder=ladder, seed=args.seed)
    try:
        fit, points = run_sweep(config)
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = sweep_csv(points)
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    print(f"# {args.scenario}: slope={fit.slope:.6f} r2={fit.r_squared:.6f}", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    try:
        configs = suite_configs(args.suite, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    reports = []
    failed_runs = []
    for config in configs:
        try:
            r = verify(config)
        except SweepError as exc:
            print(f"ERROR {config.scenario}: {exc}", file=sys.stderr)
            failed_runs.append(config.scenario)
            continue
        reports.append(r)
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.label}: fitted {r.fitted.slope:+.4f} predicted {r.predicted} "
              f"(tol {r.tolerance}) r2={r.fitted.r_squared:.4f}")
    if args.out and reports:
        write_text(args.out, reports_json(reports, args.reproducible))
    if failed_runs:
        return 1
    return 0 if all(r.passed for r in reports) else 1


def cmd_orders(args) -> int:
    kind = THEOREMS[args.theorem]
    try:
        if kind == "lp-lq":
            if args.p is None or args.q is None:
                raise SystemExit("orders: --p and --q are required for this theorem")
            res = exponents.sobolev_order(args.p, args.q, args.m, args.n, args.mu)
            _emit(res.to_dict())
        elif kind == "hardy":
            res = exponents.hardy_order(args.q, args.m, args.n, args.mu)
            _emit(res.to_dict())
        else:
            _emit(exponents.halfwave_orders(args.q, args.n, args.m).to_dict())
    except exponents.OrderError as exc:
        _emit({"error": str(exc)})
        return 1
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="caustic-bench",
                                     description="Caustic orders of oscillatory integrals: measure and predict.")
    parser.add_argument("--config", help="key = value file; command line flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="caustic profile at a point")
    p.add_argument("--phase", help="fold, cusp, swallowtail, butterfly, A<k> or a polynomial")
    p.add_argument("--x", help="base point, comma separated")
    p.add_argument("--alpha", help="angle(s), comma separated")
    p.set_defaults(func=cmd_classify, required=("phase", "x", "alpha"))

    p = sub.add_parser("regions", help="exponent regions, membership and diagram")
    p.add_argument("--m", type=int)
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--svg", help="write the region diagram here")
    p.set_defaults(func=cmd_regions, required=("m",))

    p = sub.add_parser("integrate", help="u_tau at one base point")
    p.add_argument("--phase")
    p.add_argument("--x")
    p.add_argument("--tau", type=float)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--amplitude-scale", type=float, default=1.0)
    p.set_defaults(func=cmd_integrate, required=("phase", "x", "tau"))

    p = sub.add_parser("sweep", help="one scenario over a dyadic ladder, CSV output")
    p.add_argument("--scenario", choices=sorted(SCENARIOS))
    p.add_argument("--min", type=_dyadic, help="smallest ladder value, e.g. 2^6")
    p.add_argument("--max", type=_dyadic, help="largest ladder value, e.g. 2^16")
    p.add_argument("--q")
    p.add_argument("--m", type=int)
    p.add_argument("--l", type=int, help="log2 lambda for piece scenarios")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep, required=("scenario",))

    p = sub.add_parser("verify", help="run scenarios against their predicted exponents")
    p.add_argument("--suite", default="all", help="all or a scenario name")
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reproducible", action="store_true", help="write runtime_s as 0 for byte-identical reports")
    p.set_defaults(func=cmd_verify, required=())

    p = sub.add_parser("orders", help="Sobolev orders from the exponent calculus")
    p.add_argument("--theorem", choices=sorted(THEOREMS))
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--mu", default="0")
    p.set_defaults(func=cmd_orders, required=("theorem", "q", "n", "m"))
    return parser


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    values = read_config_file(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in subparser._actions}
    for key, raw in values.items():
        if key not in actions or key in ("help", "func", "required"):
            parser.error(f"unknown config key {key!r} for {args.command}")
        action = actions[key]
        if getattr(args, key) != action.default:
            continue  # flag given on the command line
        if isinstance(action, argparse._StoreTrueAction):
            value = raw.lower() in ("1", "true", "yes", "on")
        else:
            value = action.type(raw) if action.type else raw
        setattr(args, key, value)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        _apply_config(parser, args)
    missing = [k for k in args.required if getattr(args, k) is None]
    if missing:
        parser.error(f"{args.command}: missing " + ", ".join("--" + k.replace("_", "-") for k in missing))
    if getattr(args, "scenario", None) is not None and args.scenario not in SCENARIOS:
        parser.error(f"unknown scenario {args.scenario!r}")
    if getattr(args, "theorem", None) is not None and args.theorem not in THEOREMS:
        parser.error(f"unknown theorem {args.theorem!r}")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
