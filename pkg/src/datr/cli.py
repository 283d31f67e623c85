"""Command-line front end.

Exit status: 0 success, 1 failed assertions or oracle mismatches,
2 input errors, 3 step budget exhausted.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import evaluator, oracle
from .evaluator import DEFAULT, STRICT, EvalConfig, LimitExceeded, Undefined, Value, format_outcome
from .model import Theory
from .parser import (
    ParseError, parse_goals, parse_query, parse_theory, render_location, render_sentence,
    render_value,
)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3

MAX_STEPS_ENV = "DATR_MAX_STEPS"


class _InputError(Exception):
    pass


def _read(filename: str) -> str:
    try:
        with open(filename, encoding="utf-8", newline=None) as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise _InputError(f"{filename}: {exc}") from None


def _report(filename: str, diagnostics) -> None:
    for d in diagnostics:
        print(f"{filename}:{d}", file=sys.stderr)


def _load_theory(filename: str) -> Theory:
    text = _read(filename)
    try:
        theory, diags = parse_theory(text)
    except ParseError as exc:
        _report(filename, exc.diagnostics)
        raise _InputError(f"{filename}: {len(exc.diagnostics)} diagnostic(s)") from None
    _report(filename, diags)
    return theory


def _default_max_steps() -> int:
    raw = os.environ.get(MAX_STEPS_ENV)
    if raw is None:
        return evaluator.DEFAULT_MAX_STEPS
    try:
        value = int(raw)
    except ValueError:
        raise _InputError(f"{MAX_STEPS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise _InputError(f"{MAX_STEPS_ENV} must be positive")
    return value


def cmd_check(args: argparse.Namespace) -> int:
    theory = _load_theory(args.theory)
    print(f"{len(theory.node_order)} nodes, {len(theory)} sentences")
    return EXIT_OK


def cmd_query(args: argparse.Namespace) -> int:
    theory = _load_theory(args.theory)
    try:
        node, path = parse_query(args.query)
    except ParseError as exc:
        _report("<query>", exc.diagnostics)
        return EXIT_INPUT
    cfg = EvalConfig(mode=STRICT if args.strict else DEFAULT, max_steps=args.max_steps,
                     trace_enabled=args.trace)
    outcome, events = evaluator.evaluate_query(theory, node, path, cfg)
    for event in events:
        print(event.format(), file=sys.stderr)
    if args.format == "machine":
        print(f"result\t{render_location(node, path)}\t{format_outcome(outcome)}")
    else:
        print(format_outcome(outcome))
    return EXIT_LIMIT if isinstance(outcome, LimitExceeded) else EXIT_OK


def cmd_test(args: argparse.Namespace) -> int:
    theory = _load_theory(args.theory)
    goals, diags = parse_goals(_read(args.goals))
    _report(args.goals, diags)
    if any(d.severity == "error" for d in diags):
        return EXIT_INPUT
    cfg = EvalConfig(max_steps=args.max_steps)
    passed = failed = limits = 0
    for g in goals:
        outcome, _ = evaluator.evaluate_query(theory, g.node, g.path, cfg)
        where = render_location(g.node, g.path)
        if isinstance(outcome, LimitExceeded):
            limits += 1
            print(f"LIMIT\t{where}\t{format_outcome(outcome)}")
            continue
        if not g.is_assertion:
            print(f"QUERY\t{where}\t{format_outcome(outcome)}")
            continue
        expected = "UNDEFINED" if g.expect_undefined else render_value(g.expected)
        if g.expect_undefined:
            ok = isinstance(outcome, Undefined)
        else:
            ok = isinstance(outcome, Value) and outcome.value == g.expected
        if ok:
            passed += 1
            print(f"PASS\t{where} = {expected}")
        else:
            failed += 1
            status = "UNDEFINED" if isinstance(outcome, Undefined) else "FAIL"
            print(f"{status}\t{where} = {expected}\t(actual: {format_outcome(outcome)})")
    summary = f"{len(goals)} goals: {passed} passed, {failed} failed"
    if limits:
        summary += f", {limits} over budget"
    print(summary)
    if failed:
        return EXIT_FAILURES
    return EXIT_LIMIT if limits else EXIT_OK


def cmd_dump(args: argparse.Namespace) -> int:
    theory = _load_theory(args.theory)
    alphabet = frozenset(args.alphabet.split()) | {oracle.PAD} if args.alphabet else None
    params = oracle.ClosureParams(depth=args.depth, alphabet=alphabet)
    rank = {n: i for i, n in enumerate(theory.node_order)}
    for s in sorted(oracle.closure_sentences(theory, params),
                    key=lambda s: (rank[s.node], s.lhs_path)):
        print(render_sentence(s))
    return EXIT_OK


def cmd_oracle_check(args: argparse.Namespace) -> int:
    if args.theory is None and not args.random:
        raise _InputError("nothing to check: give a theory file and/or --random N")
    horizon = args.depth + 1 if args.horizon is None else args.horizon
    params = oracle.ClosureParams(depth=args.depth, step_budget=args.max_steps, horizon=horizon)
    total = oracle.CrossCheckReport()
    if args.theory is not None:
        report = oracle.cross_check(_load_theory(args.theory), params)
        for line in report.lines(args.theory):
            print(line)
        total.merge(report)
    for seed, theory in oracle.random_theories(args.seed, args.random):
        report = oracle.cross_check(theory, params)
        if not report.ok:
            for line in report.lines(f"random:{seed}"):
                print(line)
        total.merge(report)
    if args.random:
        print(total.lines("total")[0])
    return EXIT_OK if total.ok else EXIT_FAILURES


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser(max_steps: int) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="datr", description="Evaluate DATR theories.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse a theory and report diagnostics")
    p.add_argument("theory")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("query", help="evaluate one Node:<path> query")
    p.add_argument("theory")
    p.add_argument("query", help="e.g. 'Walk:<mor past>'")
    p.add_argument("--strict", action="store_true", help="exact paths only, no defaults")
    p.add_argument("--trace", action="store_true", help="write evaluation events to stderr")
    p.add_argument("--max-steps", type=_positive, default=max_steps)
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("test", help="run the goals in a .dtg file")
    p.add_argument("theory")
    p.add_argument("goals")
    p.add_argument("--max-steps", type=_positive, default=max_steps)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("dump", help="print the implicit sentences up to a suffix length")
    p.add_argument("theory")
    p.add_argument("--depth", type=_non_negative, default=1)
    p.add_argument("--alphabet", help="space-separated suffix atoms (default: theory atoms)")
    p.set_defaults(func=cmd_dump)

    p = sub.add_parser("oracle-check", help="compare the evaluator with the closure oracle")
    p.add_argument("theory", nargs="?")
    p.add_argument("--depth", type=_non_negative, default=2)
    p.add_argument("--horizon", type=_non_negative, default=None,
                   help="closure suffix length (default: depth + 1)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--random", type=_non_negative, default=0, metavar="N")
    p.add_argument("--max-steps", type=_positive, default=max_steps)
    p.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        max_steps = _default_max_steps()
    except _InputError as exc:
        print(f"datr: {exc}", file=sys.stderr)
        return EXIT_INPUT
    ap = build_parser(max_steps)
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"datr: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
