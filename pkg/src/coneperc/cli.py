"""Command-line front end: single computations, sweeps, simulation campaigns.

Exit codes: 0 success, 1 usage error (bad flags, malformed specs, invalid
parameters; the grammar is printed, nothing else is emitted), 2 computation
error (e.g. fixed-point non-convergence, certification window too small).
Floats are printed with 10 significant digits; identical argv + seed give
byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .bounds import classify_plus, survival_bounds_full, survival_bounds_plus
from .distributions import parse_dist
from .hetero import certify_survival, certify_survival_sweep, load_environment
from .sim import StopPolicy, estimate_survival

_DIST_GRAMMAR = (
    "distribution spec grammar: family ':' key '=' value (',' key '=' value)*\n"
    "  families: bernoulli:p=<x> | geometric:p=<x> | binomial:n=<int>,p=<x>\n"
    "            | pmf:<w0>,<w1>,...   (weights for R=0,1,2,...)\n"
    "  examples: binomial:n=4,p=0.25   pmf:0.1,0.9"
)

# Shipped JSON schema descriptions (jsonschema dialect); the README
# documents them and the test suite validates emitted reports against them.
_NUMBER_OR_INF = {"oneOf": [{"type": "number"}, {"const": "inf"}]}
_VERDICT_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["survives", "dies_out", "inconclusive"]},
        "criterion": {"type": "string"},
        "mean_d_power": _NUMBER_OR_INF,
        "survive_threshold": {"type": "number"},
        "die_threshold": {"type": "number"},
    },
    "required": ["kind", "criterion", "mean_d_power",
                 "survive_threshold", "die_threshold"],
}
REPORT_SCHEMAS = {
    "bounds": {
        "type": "object",
        "properties": {
            "command": {"const": "bounds"},
            "graph": {"enum": ["td", "tdplus"]},
            "d": {"type": "integer"},
            "dist": {"type": "string"},
            "verdict": _VERDICT_SCHEMA,
            "rho": {"type": "number"},
            "psi": {"type": "number"},
            "lower": {"type": "number"},
            "upper": {"type": "number"},
        },
        "required": ["command", "graph", "d", "dist", "verdict",
                     "rho", "psi", "lower", "upper"],
    },
    "simulate": {
        "type": "object",
        "properties": {
            "command": {"const": "simulate"},
            "graph": {"enum": ["td", "tdplus"]},
            "d": {"type": "integer"},
            "dist": {"type": "string"},
            "depth": {"type": "integer"},
            "gens": {"type": "integer"},
            "node_cap": {"type": "integer"},
            "runs": {"type": "integer"},
            "seed": {"type": "integer"},
            "point": {"type": "number"},
            "ci_low": {"type": "number"},
            "ci_high": {"type": "number"},
            "cap_hits": {"type": "integer"},
        },
        "required": ["command", "graph", "d", "dist", "depth", "gens",
                     "node_cap", "runs", "seed", "point", "ci_low",
                     "ci_high", "cap_hits"],
    },
    "hetero_check": {
        "type": "object",
        "properties": {
            "command": {"const": "hetero_check"},
            "d": {"type": "integer"},
            "n": {"type": "integer"},
            "j_max": {"type": "integer"},
            "c_values": {"type": "array", "items": {"type": "number"}},
            "liminf": {"type": "number"},
            "certified": {"type": "boolean"},
            "first_certifying_n": {"type": ["integer", "null"]},
        },
        "required": ["command", "d", "n", "j_max", "c_values",
                     "liminf", "certified"],
    },
}

SWEEP_COLUMNS = {
    "bounds": ("verdict", "rho", "psi", "lower", "upper"),
    "simulate": ("point", "ci_low", "ci_high", "n_runs", "cap_hits"),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems as exit code 1."""

    def error(self, message):
        raise _UsageError(f"{self.format_usage()}error: {message}")


def _fmt(value):
    """Round floats to 10 significant digits for stable, readable output."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return float(f"{value:.10g}")
    if isinstance(value, dict):
        return {k: _fmt(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_fmt(v) for v in value]
    return value


def _verdict_dict(verdict):
    return {
        "kind": verdict.kind,
        "criterion": verdict.criterion,
        "mean_d_power": verdict.mean_d_power,
        "survive_threshold": verdict.survive_threshold,
        "die_threshold": verdict.die_threshold,
    }


def _build_parser() -> _Parser:
    parser = _Parser(prog="coneperc", description=__doc__, epilog=_DIST_GRAMMAR,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--graph", choices=("td", "tdplus"), required=True)
        p.add_argument("--d", type=int, required=True,
                       help="branching number (vertices have d+1 neighbours)")
        p.add_argument("--dist", required=True, help="radius law spec")
        p.add_argument("--out", default=None, help="write the report here "
                       "instead of stdout")

    p_bounds = sub.add_parser("bounds", help="mean criteria and survival "
                              "probability bounds", epilog=_DIST_GRAMMAR,
                              formatter_class=argparse.RawDescriptionHelpFormatter)
    add_common(p_bounds)

    p_sim = sub.add_parser("simulate", help="Monte Carlo survival estimate",
                           epilog=_DIST_GRAMMAR,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
    add_common(p_sim)
    _add_sim_flags(p_sim)

    p_het = sub.add_parser("hetero-check", help="depth-heterogeneous "
                           "supercriticality certificate")
    p_het.add_argument("--d", type=int, required=True)
    p_het.add_argument("--env-file", required=True,
                       help="one distribution spec per line; optional final "
                       "'tail: constant' or 'tail: periodic=<k>'")
    p_het.add_argument("--n", type=int, default=1, help="block length")
    p_het.add_argument("--n-max", type=int, default=None,
                       help="also sweep n=1..n_max for the first certifying "
                       "block length")
    p_het.add_argument("--j-max", type=int, default=64)
    p_het.add_argument("--out", default=None)

    p_sweep = sub.add_parser("sweep", help="vary one parameter, emit CSV",
                             epilog=_DIST_GRAMMAR,
                             formatter_class=argparse.RawDescriptionHelpFormatter)
    p_sweep.add_argument("--graph", choices=("td", "tdplus"), required=True)
    p_sweep.add_argument("--d", type=int, required=True)
    p_sweep.add_argument("--dist", required=True,
                         help="spec template with '?' as the placeholder, "
                         "e.g. geometric:p=?")
    p_sweep.add_argument("--axis", required=True,
                         help="name:start:stop:steps (inclusive grid)")
    p_sweep.add_argument("--mode", choices=("bounds", "simulate"),
                         default="bounds")
    p_sweep.add_argument("--out", default=None)
    _add_sim_flags(p_sweep)
    return parser


def _add_sim_flags(p):
    p.add_argument("--depth", type=int, default=40,
                   help="depth target standing in for survival")
    p.add_argument("--gens", type=int, default=None,
                   help="generation cap (default 4x depth)")
    p.add_argument("--node-cap", type=int, default=2**22)
    p.add_argument("--runs", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: available parallelism)")
    p.add_argument("--engine", choices=("auto", "compiled", "python"),
                   default="auto")


def _policy_from(args) -> StopPolicy:
    gens = args.gens if args.gens is not None else 4 * args.depth
    return StopPolicy(depth_target=args.depth, generation_cap=gens,
                      node_cap=args.node_cap)


def _threads_from(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise _UsageError("--threads must be >= 1")
        return args.threads
    return max(1, os.cpu_count() or 1)


def _cmd_bounds(args) -> str:
    dist = parse_dist(args.dist)
    bounds = (survival_bounds_full if args.graph == "td"
              else survival_bounds_plus)(dist, args.d)
    report = {
        "command": "bounds",
        "graph": args.graph,
        "d": args.d,
        "dist": dist.spec(),
        "verdict": _verdict_dict(bounds.verdict),
        "rho": bounds.rho,
        "psi": bounds.psi,
        "lower": bounds.lower,
        "upper": bounds.upper,
    }
    return json.dumps(_fmt(report), indent=2) + "\n"


def _cmd_simulate(args) -> str:
    dist = parse_dist(args.dist)
    policy = _policy_from(args)
    estimate = estimate_survival(
        args.graph, args.d, dist, policy,
        n_runs=args.runs, master_seed=args.seed,
        workers=_threads_from(args), impl=args.engine,
    )
    report = {
        "command": "simulate",
        "graph": args.graph,
        "d": args.d,
        "dist": dist.spec(),
        "depth": policy.depth_target,
        "gens": policy.generation_cap,
        "node_cap": policy.node_cap,
        "runs": estimate.n_runs,
        "seed": args.seed,
        "point": estimate.point,
        "ci_low": estimate.ci_low,
        "ci_high": estimate.ci_high,
        "cap_hits": estimate.cap_hits,
    }
    return json.dumps(_fmt(report), indent=2) + "\n"


def _cmd_hetero(args) -> str:
    env = load_environment(args.env_file)
    report_n = certify_survival(env, args.d, args.n, args.j_max)
    payload = {
        "command": "hetero_check",
        "d": args.d,
        "n": report_n.n,
        "j_max": report_n.j_max,
        "c_values": list(report_n.c_values),
        "liminf": report_n.liminf_estimate,
        "certified": report_n.certified,
    }
    if args.n_max is not None:
        best = certify_survival_sweep(env, args.d, args.n_max, args.j_max)
        payload["first_certifying_n"] = None if best is None else best.n
    return json.dumps(_fmt(payload), indent=2) + "\n"


def _parse_axis(text: str):
    parts = text.split(":")
    if len(parts) != 4:
        raise _UsageError("--axis must be name:start:stop:steps")
    name, start_s, stop_s, steps_s = parts
    try:
        start, stop, steps = float(start_s), float(stop_s), int(steps_s)
    except ValueError:
        raise _UsageError(f"bad axis numbers in {text!r}") from None
    if steps < 1:
        raise _UsageError("axis steps must be >= 1")
    if steps == 1:
        values = [start]
    else:
        # round grid points to the printed precision so boundary values
        # (e.g. 0.25) are hit exactly
        values = [float(f"{v:.10g}") for v in np.linspace(start, stop, steps)]
    return name, values


def _cmd_sweep(args) -> str:
    if "?" not in args.dist:
        raise _UsageError("sweep --dist template needs a '?' placeholder")
    axis_name, values = _parse_axis(args.axis)
    columns = (axis_name,) + SWEEP_COLUMNS[args.mode]
    rows = [",".join(columns)]
    for index, value in enumerate(values):
        spec = args.dist.replace("?", f"{value:.10g}")
        dist = parse_dist(spec)
        if args.mode == "bounds":
            bounds = (survival_bounds_full if args.graph == "td"
                      else survival_bounds_plus)(dist, args.d)
            cells = (bounds.verdict.kind, bounds.rho, bounds.psi,
                     bounds.lower, bounds.upper)
        else:
            estimate = estimate_survival(
                args.graph, args.d, dist, _policy_from(args),
                n_runs=args.runs, master_seed=(args.seed, index),
                workers=_threads_from(args), impl=args.engine,
            )
            cells = (estimate.point, estimate.ci_low, estimate.ci_high,
                     estimate.n_runs, estimate.cap_hits)
        rows.append(",".join(_csv_cell(c) for c in (value,) + cells))
    return "\n".join(rows) + "\n"


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return "inf" if math.isinf(value) else f"{value:.10g}"
    return str(value)


_COMMANDS = {
    "bounds": _cmd_bounds,
    "simulate": _cmd_simulate,
    "hetero-check": _cmd_hetero,
    "sweep": _cmd_sweep,
}


def run_command(argv) -> int:
    """Parse argv, run one subcommand, emit exactly one report on success."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        report = _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        print(_DIST_GRAMMAR, file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except (ValueError, TypeError, FileNotFoundError) as exc:  # bad input
        print(f"error: {exc}", file=sys.stderr)
        print(_DIST_GRAMMAR, file=sys.stderr)
        return 1
    except (RuntimeError, OSError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(report)
    else:
        sys.stdout.write(report)
    return 0


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
