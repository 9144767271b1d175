#!/usr/bin/env python3
"""Minimal DFA versus monadic DCA on the industrial regex."""
import argparse
import time

from countdet.library import INDUSTRIAL_PATTERN
from countdet.frontend import compile_pattern
from countdet.monadicdet import determinise_monadic
from countdet.naive import minimise, subset, unfold


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--pattern", default=INDUSTRIAL_PATTERN)
    args = p.parse_args(argv)

    t0 = time.perf_counter()
    a = compile_pattern(args.pattern)
    print(f"CA: {a.summary()}")
    nfa = unfold(a)
    print(f"unfolded NFA: {len(nfa.states)} states, {len(nfa.blocks)} minterms")
    dfa = subset(nfa)
    print(f"subset DFA: {dfa.num_states} states ({time.perf_counter() - t0:.1f}s)")
    mdfa = minimise(dfa)
    print(f"minimal DFA: {mdfa.num_states} states ({time.perf_counter() - t0:.1f}s)")
    t1 = time.perf_counter()
    dca = determinise_monadic(a)
    print(f"monadic DCA: {dca.num_states} states, {dca.num_transitions} transitions, "
          f"{dca.num_params} params ({(time.perf_counter() - t1) * 1000:.1f}ms)")
    print(f"ratio minimal DFA / DCA: {mdfa.num_states / dca.num_states:.0f}")


if __name__ == "__main__":
    main()
