#!/usr/bin/env python3
"""Sizes of every construction on the family .*a.{k}.

Prints one CSV row per (k, method).  The general construction grows quickly,
so it only runs up to --general-max.
"""
import argparse
import csv
import sys
import time

from countdet.bench import run_method, sizes
from countdet.config import Limits
from countdet.frontend import compile_pattern


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--general-max", type=int, default=4)
    args = p.parse_args(argv)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["k", "method", "states", "transitions", "params", "ms"])
    for k in range(1, args.kmax + 1):
        a = compile_pattern(f".*a.{{{k}}}")
        methods = ["dfa", "dfa-min", "monadic"]
        if k <= args.general_max:
            methods += ["general", "general-reach"]
        for m in methods:
            start = time.perf_counter()
            machine = run_method(a, m, Limits())
            ms = (time.perf_counter() - start) * 1000
            out.writerow([k, m, *sizes(machine), f"{ms:.1f}"])


if __name__ == "__main__":
    main()
