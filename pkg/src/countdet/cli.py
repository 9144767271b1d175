"""Command-line interface.

Exit codes: 0 success, 1 other errors, 2 pattern or input syntax errors,
3 input is not monadic, 4 budget or timeout exhausted, 5 internal invariant
violated.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import bench as bench_mod
from .alphabet import BYTE_ALPHABET
from .automaton import CountingAutomaton, accepts
from .config import Limits
from .errors import (BoundViolation, BudgetExceeded, NonMonadicCounting, NotMonadic, RegexSyntaxError,
                     StuckUnexpected)
from .explore import DcaStepper, DfaStepper
from .frontend import compile_pattern
from .naive import Dfa
from .serialize import dumps, loads, to_dot

EXIT_OTHER, EXIT_SYNTAX, EXIT_NOT_MONADIC, EXIT_BUDGET, EXIT_INVARIANT = 1, 2, 3, 4, 5


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("pattern", nargs="?", help="regex (basic dialect)")
    p.add_argument("-f", "--file", help="read the pattern from a file")
    p.add_argument("--ca", help="read a CA from a JSON file instead of a pattern")
    p.add_argument("--alphabet-size", type=int, default=BYTE_ALPHABET)
    p.add_argument("--search", action="store_true", help="substring semantics: wrap as .*(R).*")


def _add_method(p: argparse.ArgumentParser, default: str = "monadic") -> None:
    p.add_argument("--method", default=default, choices=bench_mod.METHODS)
    p.add_argument("--timeout-ms", type=int, default=None)
    p.add_argument("--state-budget", type=int, default=None, help="cap on DFA/NFA states")
    p.add_argument("--k-budget", type=int, default=None, help="cap on spheres")
    p.add_argument("--trace", action="store_true", help="print construction trace to stderr")
    p.add_argument("--prune-infeasible", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="countdet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="regex to CA JSON")
    _add_input(p)
    p.add_argument("-o", "--output")

    p = sub.add_parser("determinise", help="determinise a regex or CA")
    _add_input(p)
    _add_method(p)
    p.add_argument("-o", "--output")

    p = sub.add_parser("match", help="run a determinised machine over input lines")
    _add_input(p)
    _add_method(p)
    p.add_argument("--oracle", action="store_true", help="use the CA configuration-set semantics")
    p.add_argument("--input", help="file of words, one per line (default: stdin)")

    p = sub.add_parser("stats", help="sizes and times as CSV")
    _add_input(p)
    p.add_argument("--methods", default="dfa-min,monadic")
    p.add_argument("--timeout-ms", type=int, default=60_000)

    p = sub.add_parser("dot", help="Graphviz export of the CA or a determinised machine")
    _add_input(p)
    _add_method(p, default=None)
    p.add_argument("-o", "--output")

    p = sub.add_parser("bench", help="statistics over a file of regexes")
    p.add_argument("rules", help="file with one regex per line")
    p.add_argument("--methods", default="dfa,monadic")
    p.add_argument("--timeout-ms", type=int, default=60_000)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--alphabet-size", type=int, default=BYTE_ALPHABET)
    p.add_argument("--search", action="store_true")
    p.add_argument("-o", "--output")
    return parser


def _pattern(args) -> str:
    if args.file:
        return Path(args.file).read_text().rstrip("\n")
    if args.pattern is None:
        raise SystemExit("a pattern, --file or --ca is required")
    return args.pattern


def _load_ca(args) -> CountingAutomaton:
    if args.ca:
        obj = loads(Path(args.ca).read_text())
        if not isinstance(obj, CountingAutomaton):
            raise ValueError(f"{args.ca} does not hold a CA")
        return obj
    return compile_pattern(_pattern(args), args.alphabet_size, args.search)


def _limits(args) -> Limits:
    kw = {}
    if getattr(args, "state_budget", None):
        kw["max_states"] = args.state_budget
    if getattr(args, "k_budget", None):
        kw["max_spheres"] = args.k_budget
    ms = getattr(args, "timeout_ms", None)
    return Limits.with_timeout(ms / 1000.0 if ms else None, **kw)


def _determinise(args, a: CountingAutomaton):
    trace = [] if args.trace else None
    try:
        return bench_mod.run_method(a, args.method, _limits(args), trace, args.prune_infeasible,
                                    sphere_budget=args.k_budget)
    finally:
        if trace:
            sys.stderr.write("\n".join(trace) + "\n")


def _write(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_compile(args) -> int:
    _write(dumps(_load_ca(args)), args.output)
    return 0


def cmd_determinise(args) -> int:
    a = _load_ca(args)
    machine = _determinise(args, a)
    d = machine.to_dca(args.method) if isinstance(machine, Dfa) else machine
    _write(dumps(d), args.output)
    return 0


def cmd_match(args) -> int:
    a = _load_ca(args)
    if args.oracle:
        decide = lambda w: accepts(a, w)  # noqa: E731
    else:
        machine = _determinise(args, a)
        stepper = DfaStepper(machine) if isinstance(machine, Dfa) else DcaStepper(machine, strict=True)
        decide = stepper.accepts
    stream = open(args.input, encoding="latin-1") if args.input else sys.stdin
    with stream:
        for line in stream:
            word = line.rstrip("\n").rstrip("\r")
            print("accept" if decide(word) else "reject")
    return 0


def cmd_stats(args) -> int:
    pattern = _pattern(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    records = bench_mod.bench([pattern], methods, args.timeout_ms / 1000.0,
                              alphabet_size=args.alphabet_size, search=args.search)
    bench_mod.write_csv(records, sys.stdout)
    return 0


def cmd_dot(args) -> int:
    a = _load_ca(args)
    if args.method is None:
        _write(to_dot(a), args.output)
        return 0
    machine = _determinise(args, a)
    d = machine.to_dca(args.method) if isinstance(machine, Dfa) else machine
    _write(to_dot(d), args.output)
    return 0


def cmd_bench(args) -> int:
    patterns = bench_mod.read_patterns(Path(args.rules).read_text(encoding="latin-1").splitlines())
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in bench_mod.METHODS:
            raise ValueError(f"unknown method {m!r}")
    records = bench_mod.bench(patterns, methods, args.timeout_ms / 1000.0, args.repeat,
                              args.workers, args.alphabet_size, args.search)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            bench_mod.write_csv(records, fh)
    else:
        bench_mod.write_csv(records, sys.stdout)
    return 0


COMMANDS = {
    "compile": cmd_compile,
    "determinise": cmd_determinise,
    "match": cmd_match,
    "stats": cmd_stats,
    "dot": cmd_dot,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (RegexSyntaxError, NonMonadicCounting, json.JSONDecodeError) as e:
        print(f"countdet: syntax error: {e}", file=sys.stderr)
        return EXIT_SYNTAX
    except NotMonadic as e:
        print(f"countdet: not monadic: {e}", file=sys.stderr)
        return EXIT_NOT_MONADIC
    except BudgetExceeded as e:
        print(f"countdet: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (StuckUnexpected, BoundViolation, AssertionError) as e:
        print(f"countdet: invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, OSError) as e:
        print(f"countdet: {e}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
