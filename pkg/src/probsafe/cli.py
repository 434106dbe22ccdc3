"""Command-line front end.

Exit codes: 0 success / property holds, 1 property fails or NotIn,
2 Unknown verdict, 3 input error, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .counterexample import DEFAULT_DEPTH_BUDGET, find_counterexample, verify_counterexample
from .errors import (
    DepthBudgetExceeded,
    InvalidChain,
    NotFlat,
    ParseError,
    ProbSafeError,
    SizeLimitExceeded,
    TreeError,
    UnsupportedShape,
)
from .formula import DEFAULT_CNF_BUDGET, Prob, to_pnf
from .markov import GenParams, disjoint_union, load_mc, random_mc, save_mc
from .modelcheck import ctl_check, path_probabilities, sat_states
from .parser import parse_ctl, parse_formula, parse_formula_file, print_formula
from .rational import parse_rational
from .simulation import strong_simulation, weight_function_exists
from .taxonomy import SearchConfig, classify, decompose_flat
from .trees import ExtensionFamily, NoWitnessInFamily, extension_oracle, load_tree

OK, FAILS, UNKNOWN, INPUT_ERROR, BUDGET = 0, 1, 2, 3, 4

_VERDICT_CODE = {"In": OK, "NotIn": FAILS, "Unknown": UNKNOWN}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _formula_arg(args):
    if getattr(args, "file", None):
        text = _read(args.file)
        formulas = parse_formula_file(text)
        if len(formulas) != 1:
            raise UsageError(f"{args.file}: expected exactly one formula, found {len(formulas)}")
        return formulas[0]
    if not args.formula:
        raise UsageError("a formula is required (positional or --file)")
    return parse_formula(args.formula)


def _emit(args, out, text, data):
    if args.format == "structured":
        out.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        out.write(text)


# -- subcommands --------------------------------------------------------------------


def cmd_parse(args, out):
    formulas = parse_formula_file(_read(args.path))
    shown = [print_formula(to_pnf(f)) for f in formulas]
    _emit(args, out, "".join(s + "\n" for s in shown), {"formulas": shown})
    return OK


def _search(args):
    return SearchConfig(seed=args.seed)


def cmd_classify(args, out):
    phi = _formula_arg(args)
    report = classify(phi, _search(args))
    _emit(args, out, report.to_text(), report.to_dict())
    if args.fragment:
        return _VERDICT_CODE[getattr(report, args.fragment).kind]
    return OK


def cmd_decompose(args, out):
    phi = _formula_arg(args)
    budget = args.budget if args.budget is not None else DEFAULT_CNF_BUDGET
    res = decompose_flat(phi, budget)
    lines = [f"safe: {print_formula(res.safe_part)}", f"live: {print_formula(res.live_part)}"]
    for i, (c, s, l) in enumerate(res.conjunct_trace, start=1):
        lines.append(f"conjunct {i}: {print_formula(c)}")
        lines.append(f"  safe {i}: {print_formula(s)}")
        lines.append(f"  live {i}: {print_formula(l)}")
    data = {
        "safe": print_formula(res.safe_part),
        "live": print_formula(res.live_part),
        "conjuncts": [
            {"conjunct": print_formula(c), "safe": print_formula(s), "live": print_formula(l)}
            for c, s, l in res.conjunct_trace
        ],
    }
    _emit(args, out, "\n".join(lines) + "\n", data)
    return OK


def cmd_check(args, out):
    mc = load_mc(_read(args.mc))
    phi = _formula_arg(args)
    cache = {}
    holds = mc.init in sat_states(mc, phi, cache)
    text = "true" if holds else "false"
    data = {"holds": holds}
    if isinstance(phi, Prob):
        prob = path_probabilities(mc, phi.path, cache)[mc.init]
        text += f" (prob = {prob})"
        data["prob"] = str(prob)
    _emit(args, out, text + "\n", data)
    return OK if holds else FAILS


def cmd_ctl(args, out):
    mc = load_mc(_read(args.mc))
    sat = ctl_check(mc, parse_ctl(args.query))
    holds = mc.init in sat
    text = f"{'true' if holds else 'false'}\nstates: {' '.join(str(s) for s in sorted(sat))}\n"
    _emit(args, out, text, {"holds": holds, "states": sorted(sat)})
    return OK if holds else FAILS


def _parse_pair(text, n):
    try:
        s, t = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--pair expects 's,t', got {text!r}") from None
    if not (0 <= s < n and 0 <= t < n):
        raise UsageError(f"--pair states out of range 0..{n - 1}")
    return s, t


def cmd_simulate(args, out):
    mc = load_mc(_read(args.mc))
    if args.against:
        mc = disjoint_union(mc, load_mc(_read(args.against)))
    rel = strong_simulation(mc)
    if args.pair:
        s, t = _parse_pair(args.pair, mc.n)
        related = (s, t) in rel
        text = f"{s} ≾ {t}: {'true' if related else 'false'}\n"
        data = {"pair": [s, t], "related": related}
        if related:
            delta = weight_function_exists(mc.dist(s), mc.dist(t), rel.pairs)
            data["weights"] = [[u, v, str(p)] for (u, v), p in sorted(delta.items())]
        _emit(args, out, text, data)
        return OK if related else FAILS
    _emit(args, out, rel.to_text(), {"pairs": [list(p) for p in rel]})
    return OK


def cmd_counterexample(args, out):
    mc = load_mc(_read(args.mc))
    phi = _formula_arg(args)
    depth = args.budget if args.budget is not None else DEFAULT_DEPTH_BUDGET
    ce = find_counterexample(mc, phi, depth_budget=depth)
    if ce is None:
        _emit(args, out, "holds: no counterexample\n", {"holds": True})
        return OK
    data = {"holds": False, "verified": verify_counterexample(mc, ce), **ce.to_dict()}
    _emit(args, out, ce.to_text(), data)
    return FAILS


def cmd_oracle(args, out):
    tree = load_tree(_read(args.tree))
    phi = parse_formula(args.formula)
    grid = tuple(parse_rational(g) for g in args.grid.split(","))
    fam_kwargs = {"max_states": args.max_states, "grid": grid}
    if args.budget is not None:
        fam_kwargs["limit"] = args.budget
    result = extension_oracle(tree, phi, ExtensionFamily(**fam_kwargs))
    if isinstance(result, NoWitnessInFamily):
        text = f"no witness in family ({result.examined} continuations examined)\n"
        _emit(args, out, text, {"witness": None, "examined": result.examined})
        return FAILS
    text = f"witness ({result.examined} continuations examined)\n" + save_mc(result.continuation)
    _emit(args, out, text, {"witness": save_mc(result.continuation), "examined": result.examined})
    return OK


def cmd_gen(args, out):
    if args.states is None:
        raise UsageError("gen requires --states")
    params = GenParams(
        state_count=args.states,
        max_out_degree=args.degree,
        ap=tuple(a for a in args.ap.split(",") if a),
        seed=args.seed,
    )
    mc = random_mc(params)
    _emit(args, out, save_mc(mc), {"mc": save_mc(mc)})
    return OK


# -- argument parsing -------------------------------------------------------------


def _global_flags(p, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=default(0), help="seed for random search and generation")
    p.add_argument("--budget", type=int, default=default(None),
                   help="CNF node budget (decompose), depth budget (counterexample) or family limit (oracle)")
    p.add_argument("--format", choices=("text", "structured"), default=default("text"))


def build_parser():
    parser = _Parser(prog="probsafe", description="Safety and liveness analysis for PCTL.")
    _global_flags(parser, suppress=False)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(fn=fn)
        return p

    def formula_args(p):
        p.add_argument("formula", nargs="?")
        p.add_argument("--file", help="read the formula from a file")

    p = add("parse", cmd_parse, "parse a formula file and print positive normal forms")
    p.add_argument("path")
    p = add("classify", cmd_classify, "report fragment membership")
    formula_args(p)
    p.add_argument("--fragment", choices=("safe", "ssafe", "live_lt", "live_gt", "live_gt_guarded", "alive"),
                   help="set the exit code from this fragment's verdict")
    p = add("decompose", cmd_decompose, "split a flat formula into safety and liveness parts")
    formula_args(p)
    p = add("check", cmd_check, "model-check a formula at the initial state")
    p.add_argument("--mc", required=True)
    formula_args(p)
    p = add("ctl", cmd_ctl, "evaluate a qualitative CTL query")
    p.add_argument("--mc", required=True)
    p.add_argument("query")
    p = add("simulate", cmd_simulate, "compute the strong simulation preorder")
    p.add_argument("--mc", required=True)
    p.add_argument("--against", help="second chain; its states follow the first chain's")
    p.add_argument("--pair", help="decide a single pair 's,t'")
    p = add("counterexample", cmd_counterexample, "finite counterexample for a violated safety formula")
    p.add_argument("--mc", required=True)
    formula_args(p)
    p = add("oracle", cmd_oracle, "search for an extension of a finite tree satisfying a formula")
    p.add_argument("--tree", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--max-states", type=int, default=3)
    p.add_argument("--grid", default="1,1/2")
    p = add("gen", cmd_gen, "emit a random Markov chain")
    p.add_argument("--states", type=int)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--ap", default="a,b")
    return parser


def run(argv, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        return args.fn(args, out)
    except UsageError as exc:
        err.write(f"probsafe: {exc}\n")
        return INPUT_ERROR
    except (SizeLimitExceeded, DepthBudgetExceeded) as exc:
        err.write(f"probsafe: budget exceeded: {exc}\n")
        return BUDGET
    except (ParseError, InvalidChain, NotFlat, UnsupportedShape, TreeError, ValueError) as exc:
        err.write(f"probsafe: {exc}\n")
        return INPUT_ERROR
    except ProbSafeError as exc:
        err.write(f"probsafe: {exc}\n")
        return INPUT_ERROR


def main(argv=None):
    code = run(sys.argv[1:] if argv is None else argv)
    sys.exit(code)


__all__ = ["run", "main", "build_parser"]
