"""Command-line interface: ``conekit {verify,find-cone,simulate,pf-cycles}``.

Exit codes
  verify:    0 strictly path positive, 2 path positive, 1 not path positive
  find-cone: 0 gamma-contracting cone, 3 delta-invariant cone, 1 no, 4 inconclusive
  any:       64 usage or problem-file error
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .automaton import arbitrary_switching
from .cone import DEFAULT_STRICT_EPS, DEFAULT_TOL
from .errors import ConeKitError
from .problem import Problem, ProblemError, load_problem
from .search import SearchConfig, SearchStatus, find_contracting_cone
from .sim import simulate_pair, traces_csv
from .verify import Verdict, check_path_positive, cycle_pf

EX_USAGE = 64

VERIFY_EXIT = {
    Verdict.STRICTLY_PATH_POSITIVE: 0,
    Verdict.PATH_POSITIVE: 2,
    Verdict.NOT_PATH_POSITIVE: 1,
}
SEARCH_EXIT = {
    SearchStatus.FOUND_GAMMA: 0,
    SearchStatus.FOUND_DELTA: 3,
    SearchStatus.NO: 1,
    SearchStatus.INCONCLUSIVE: 4,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _open_gamma(text: str) -> float:
    g = float(text)
    if not 0.0 < g < 1.0:
        raise argparse.ArgumentTypeError("gamma must lie in the open interval (0, 1)")
    return g


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="conekit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"conekit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("problem", type=Path, help="problem JSON file")
        sp.add_argument("--tol", type=float, default=None, help=f"membership tolerance (default {DEFAULT_TOL})")
        sp.add_argument(
            "--strict-eps", type=float, default=None,
            help=f"interior margin (default {DEFAULT_STRICT_EPS})",
        )
        sp.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")

    v = sub.add_parser("verify", help="check (strict) path-complete positivity")
    common(v)

    f = sub.add_parser("find-cone", help="search for a common gamma-contracting cone")
    common(f)
    f.add_argument("--gamma", type=_open_gamma, default=None)
    f.add_argument("--max-iters", type=_nonneg_int, default=None)
    f.add_argument("--seed-depth", type=_nonneg_int, default=None)
    f.add_argument("--trace", type=Path, default=None, help="per-iteration CSV trace")

    s = sub.add_parser("simulate", help="simulate trajectory pairs, CSV output")
    common(s)
    s.add_argument("--steps", type=_nonneg_int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--pairs", type=_nonneg_int, default=1)

    c = sub.add_parser("pf-cycles", help="dominant eigenpairs along automaton cycles")
    common(c)
    c.add_argument("--max-len", type=_nonneg_int, default=6)
    return p


def _setting(args, prob: Problem, name: str, default):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return prob.config.get(name, default)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _automaton_for(prob: Problem):
    if prob.automaton is not None:
        return prob.automaton
    if prob.cones is not None and len(prob.cones) == 1:
        return arbitrary_switching(prob.system.symbols, state=next(iter(prob.cones)))
    return arbitrary_switching(prob.system.symbols)


def cmd_verify(args, prob: Problem) -> int:
    if not prob.cones:
        raise UsageError("verify needs a 'cones' section")
    if prob.automaton is None and len(prob.cones) != 1:
        raise UsageError("verify without an automaton needs exactly one (common) cone")
    tol = float(_setting(args, prob, "tol", DEFAULT_TOL))
    eps = float(_setting(args, prob, "strict_eps", DEFAULT_STRICT_EPS))
    cert = check_path_positive(prob.system, _automaton_for(prob), prob.cones, tol, eps)
    _emit(_dump(cert.to_dict()), args.out)
    return VERIFY_EXIT[cert.verdict]


def cmd_find_cone(args, prob: Problem) -> int:
    gamma = _setting(args, prob, "gamma", None)
    if gamma is None:
        raise UsageError("find-cone needs --gamma (or config.gamma)")
    try:
        cfg = SearchConfig(
            gamma=float(gamma),
            seed_depth=int(_setting(args, prob, "seed_depth", 2)),
            max_iters=int(_setting(args, prob, "max_iters", 200)),
            tol=float(_setting(args, prob, "tol", DEFAULT_TOL)),
            eps_strict=float(_setting(args, prob, "strict_eps", DEFAULT_STRICT_EPS)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    outcome = find_contracting_cone(prob.system.matrices, cfg)
    _emit(_dump(outcome.to_dict()), args.out)
    if args.trace is not None:
        args.trace.write_text(outcome.trace_csv())
    return SEARCH_EXIT[outcome.status]


def _interior_sample(K, rng) -> np.ndarray:
    c = rng.uniform(0.1, 1.0, size=len(K.generators))
    return c @ K.generators


def cmd_simulate(args, prob: Problem) -> int:
    a = _automaton_for(prob)
    rng = np.random.default_rng(args.seed)
    start = prob.initial.get("start")
    if start is None:
        start = a.states[0]
    if start not in a.states:
        raise UsageError(f"unknown start state {start!r}")
    pairs = []
    for _ in range(args.pairs):
        x0, y0 = prob.initial.get("x0"), prob.initial.get("y0")
        if x0 is None or y0 is None:
            if prob.cones is None or start not in prob.cones:
                raise UsageError("simulate needs initial.x0/y0 or a cone for the start state")
            x0 = _interior_sample(prob.cones[start], rng) if x0 is None else x0
            y0 = _interior_sample(prob.cones[start], rng) if y0 is None else y0
        pairs.append(
            simulate_pair(prob.system, a, prob.cones, x0, y0, args.steps, start=start, rng=rng)
        )
    _emit(traces_csv(pairs), args.out)
    return 0


def cmd_pf_cycles(args, prob: Problem) -> int:
    a = _automaton_for(prob)
    tol = float(_setting(args, prob, "tol", DEFAULT_TOL))
    cycles = cycle_pf(prob.system, a, args.max_len, prob.cones, tol)
    _emit(_dump([c.to_dict() for c in cycles]), args.out)
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "find-cone": cmd_find_cone,
    "simulate": cmd_simulate,
    "pf-cycles": cmd_pf_cycles,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    try:
        prob = load_problem(args.problem, tol)
        return COMMANDS[args.command](args, prob)
    except (ProblemError, UsageError, ConeKitError) as exc:
        print(f"conekit {args.command}: {exc}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
