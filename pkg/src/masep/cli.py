"""Command-line entry point: ``masep <subcommand> ...``.

Exit codes: 0 success, 1 invalid input, 2 failed verification or
comparison, 3 quadrature did not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import algebra
from .amplitudes import amplitude_column, permutations
from .contour import (ContourSpec, QuadratureNotConverged, TransitionQuery, default_contour,
                      evaluate_probability, full_distribution, sector_words,
                      window_configurations)
from .model import InvalidState, MarkovState, state_from_json
from .montecarlo import SimulationPlan, empirical_distribution
from .oracle import StateBudgetExceeded, UniformizationParams, uniformized_distribution
from .table import read_csv
from .verify import run_all

EXIT_OK, EXIT_INVALID, EXIT_VERIFY, EXIT_NOCONV = 0, 1, 2, 3

# defaults applied after merging the optional JSON config
DEFAULTS = {
    "t": None,
    "p": None,
    "nodes": 64,
    "tol": 1e-10,
    "max_refinements": 6,
    "radii": None,
    "tail_tol": 1e-12,
    "paths": 10000,
    "seed": 0,
    "n": 5,
    "trials": 100,
    "output": None,
}
COMMAND_DEFAULTS = {"tables": {"n": 2}}


class UsageError(ValueError):
    pass


def _number(text: str):
    """Rational if possible (keeps table output exact), else complex."""
    try:
        return Fraction(text)
    except ValueError:
        return complex(text.replace(" ", ""))


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"window must look like lo:hi, got {text!r}")
    if lo > hi:
        raise UsageError(f"empty window {text!r}")
    return lo, hi


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(" ", "").split(","))


def _common(p: argparse.ArgumentParser, *, final=False, window=False, contour=False):
    p.add_argument("--config", help="JSON file with default values for these flags")
    p.add_argument("--initial", help='state literal, e.g. \'{"positions":[0,1],"species":[2,1]}\'')
    if final:
        p.add_argument("--final", help="final state literal")
    p.add_argument("--t", type=float, help="time")
    p.add_argument("--p", type=float, help="right-jump probability")
    if window:
        p.add_argument("--window", help="position bounds lo:hi (write --window=-12:12)")
        p.add_argument("--output", "-o", help="CSV output path (default stdout)")
    if contour:
        p.add_argument("--radii", help="comma-separated radii 1 < R_1 < ... < R_N")
        p.add_argument("--nodes", type=int, help="starting nodes per circle (power of two)")
        p.add_argument("--tol", type=float, help="absolute refinement tolerance")
        p.add_argument("--max-refinements", type=int, dest="max_refinements")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="masep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("exact", help="one transition probability by contour quadrature"),
            final=True, contour=True)
    _common(sub.add_parser("distribution", help="exact distribution over a window"),
            window=True, contour=True)
    orc = sub.add_parser("oracle", help="distribution by uniformization")
    _common(orc, window=True)
    orc.add_argument("--tail-tol", type=float, dest="tail_tol")
    sim = sub.add_parser("simulate", help="Monte Carlo frequencies")
    _common(sim, window=True)
    sim.add_argument("--paths", type=int)
    sim.add_argument("--seed", type=int)

    ver = sub.add_parser("verify", help="run the algebraic identity suites")
    ver.add_argument("--config")
    ver.add_argument("--n", type=int, help="largest alphabet size for the R-matrix checks")
    ver.add_argument("--trials", type=int)
    ver.add_argument("--seed", type=int)

    tab = sub.add_parser("tables", help="dump B, B1, B2 and R as CSV")
    tab.add_argument("--config")
    tab.add_argument("--n", type=int)
    tab.add_argument("--xi-beta", dest="xi_beta", default="3")
    tab.add_argument("--xi-alpha", dest="xi_alpha", default="2")
    tab.add_argument("--matrix", choices=["B", "B1", "B2", "R"], action="append")

    amp = sub.add_parser("amplitudes", help="amplitude entries (A_sigma)_(pi,nu) as CSV")
    amp.add_argument("--config")
    amp.add_argument("--nu", required=True, help="initial word, e.g. 2,1,3")
    amp.add_argument("--xi", required=True, help="spectral parameters, e.g. 2,3,5/2")

    cmp_ = sub.add_parser("compare", help="max/mean absolute deviation of two CSV tables")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.add_argument("--tol", type=float, default=1e-8)
    cmp_.add_argument("--window", help="restrict both tables to lo:hi before comparing")
    return parser


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
    defaults = {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}
    for key, val in vars(args).items():
        if val is None and key in cfg:
            val = cfg[key]
            if key in ("initial", "final") and isinstance(val, dict):
                val = json.dumps(val)
        if val is None and key in defaults:
            val = defaults[key]
        setattr(args, key, val)
    return args


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")
    if hasattr(args, "p") and args.p is not None and not 0.0 <= args.p <= 1.0:
        raise UsageError(f"--p must lie in [0, 1], got {args.p}")
    if hasattr(args, "t") and args.t is not None and args.t < 0:
        raise UsageError(f"--t must be >= 0, got {args.t}")


def _contour(args, n: int) -> ContourSpec:
    if args.radii:
        radii = tuple(float(r) for r in str(args.radii).split(","))
        return ContourSpec(radii, args.nodes, args.max_refinements, args.tol)
    return default_contour(n, args.nodes, args.max_refinements, args.tol)


def _workers() -> int:
    env = os.environ.get("MASEP_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _emit(dist, args, out):
    if args.output:
        with open(args.output, "w", newline="") as fh:
            dist.write_csv(fh)
    else:
        dist.write_csv(out)


def _cmd_exact(args, out):
    _require(args, "initial", "final", "t", "p")
    q = TransitionQuery(state_from_json(args.initial), state_from_json(args.final), args.t, args.p)
    res = evaluate_probability(q, _contour(args, q.initial.n))
    print(f"probability {res.probability!r}", file=out)
    print(f"error_estimate {res.error:.3e}", file=out)
    print(f"refinements {res.refinements}", file=out)
    print(f"nodes {res.nodes}", file=out)
    return EXIT_OK


def _cmd_distribution(args, out):
    _require(args, "initial", "t", "p", "window")
    init = state_from_json(args.initial)
    dist = full_distribution(init, args.t, args.p, _window(args.window), _contour(args, init.n))
    _emit(dist, args, out)
    info = dist.info
    print(f"total {info['total']!r} leaked {info['leaked']:.3e} nodes {info['nodes']} "
          f"delta {info['delta']:.3e}", file=sys.stderr)
    return EXIT_OK


def _cmd_oracle(args, out):
    _require(args, "initial", "t", "p", "window")
    init = state_from_json(args.initial)
    lo, hi = _window(args.window)
    dist = uniformized_distribution(init, args.t, args.p, UniformizationParams(tail_tol=args.tail_tol))
    info = dist.info
    dist = dist.restrict(lo, hi)
    # same cell set as `distribution`, so files diff line for line
    for pi in sector_words(init.species):
        for row in window_configurations(init.n, lo, hi):
            dist.probs.setdefault(MarkovState(tuple(int(v) for v in row), pi), 0.0)
    _emit(dist, args, out)
    print(f"window_total {dist.total()!r} poisson_tail {info['poisson_tail']:.3e} "
          f"depth {info['depth']} states {info['states']}", file=sys.stderr)
    return EXIT_OK


def _cmd_simulate(args, out):
    _require(args, "initial", "t", "p")
    init = state_from_json(args.initial)
    plan = SimulationPlan(init, args.t, args.p, args.paths, args.seed)
    dist = empirical_distribution(plan, workers=_workers())
    if args.window:
        dist = dist.restrict(*_window(args.window))
    _emit(dist, args, out)
    return EXIT_OK


def _cmd_verify(args, out):
    results = run_all(n_max=args.n, trials=args.trials, seed=args.seed)
    for r in results:
        print(r.line(), file=out)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} identities hold", file=out)
    return EXIT_VERIFY if failed else EXIT_OK


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return repr(v.real) if v.imag == 0 else repr(v)
    return str(v)


def _cmd_tables(args, out):
    n = args.n
    xb, xa = _number(args.xi_beta), _number(args.xi_alpha)
    mats = {
        "B": lambda: algebra.build_B(n),
        "B1": lambda: algebra.build_B1(n),
        "B2": lambda: algebra.build_B2(n),
        "R": lambda: algebra.build_R(n, xb, xa),
    }
    labels = algebra.pairs(n)
    w = csv.writer(out, delimiter=";", lineterminator="\n")
    for name in args.matrix or list(mats):
        m = mats[name]()
        w.writerow([name] + [f"{i}{j}" for i, j in labels])
        for row in labels:
            w.writerow([f"{row[0]}{row[1]}"] + [_fmt(m[row, col]) for col in labels])
    return EXIT_OK


def _cmd_amplitudes(args, out):
    nu = _ints(args.nu)
    xis = [_number(v) for v in args.xi.split(",")]
    if len(xis) != len(nu):
        raise UsageError("--xi needs one value per letter of --nu")
    w = csv.writer(out, delimiter=";", lineterminator="\n")
    w.writerow(["sigma", "pi", "nu", "value"])
    for sigma in permutations(len(nu)):
        col = amplitude_column(sigma, nu, xis)
        for pi in sector_words(nu):
            w.writerow([",".join(map(str, sigma)), ",".join(map(str, pi)),
                        ",".join(map(str, nu)), _fmt(col[pi])])
    return EXIT_OK


def _cmd_compare(args, out):
    with open(args.a) as fa, open(args.b) as fb:
        a, b = read_csv(fa), read_csv(fb)
    if args.window:
        lo, hi = _window(args.window)
        a, b = a.restrict(lo, hi), b.restrict(lo, hi)
    mx, mean = a.max_abs_diff(b), a.mean_abs_diff(b)
    ok = mx <= args.tol
    print(f"max_abs_dev {mx:.3e} mean_abs_dev {mean:.3e} cells {len(set(a.probs) | set(b.probs))} "
          f"tol {args.tol:.0e} {'OK' if ok else 'EXCEEDED'}", file=out)
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "exact": _cmd_exact,
    "distribution": _cmd_distribution,
    "oracle": _cmd_oracle,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "tables": _cmd_tables,
    "amplitudes": _cmd_amplitudes,
    "compare": _cmd_compare,
}


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        args = _merge_config(args)
        return COMMANDS[args.command](args, out)
    except QuadratureNotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except (UsageError, InvalidState, ValueError, StateBudgetExceeded, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
