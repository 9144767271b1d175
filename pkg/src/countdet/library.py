"""Hand-built reference automata and patterns used by tests and scripts."""
from __future__ import annotations

from .alphabet import BYTE_ALPHABET, CharClass
from .automaton import TRUE_DNF, CountingAutomaton, Transition
from .logic import EQ, LE, Atom, Term

INDUSTRIAL_PATTERN = ".*A[^AB]{0,800}C[D-G]{43,53}DFG[^D-H]"


def running_example(k: int, alphabet_size: int = BYTE_ALPHABET) -> CountingAutomaton:
    """CA for ``.*a.{k}``: states ``q`` and ``r``, counter ``c`` counting in ``r``.

    The counter is dead in ``q`` and starts at 0 there.
    """
    any_ = CharClass.full(alphabet_size)
    a = CharClass.symbol(ord("a"), alphabet_size)
    c = Term("c")
    return CountingAutomaton(
        states=("q", "r"),
        counters={"c": k},
        initial=(("q", {"c": 0}),),
        final={"r": ((Atom(EQ, c, Term.const(k)),),)},
        transitions=(
            Transition.make("q", any_, "q"),
            Transition.make("q", a, "r", assign={"c": Term.const(0)}),
            Transition.make("r", any_, "r", [Atom(LE, c, Term.const(k - 1))], {"c": c.shift(1)}),
        ),
        alphabet_size=alphabet_size,
    )


def nfa(states, initial, final, edges, alphabet_size: int = BYTE_ALPHABET) -> CountingAutomaton:
    """Counterless CA from ``(src, class, dst)`` triples."""
    return CountingAutomaton(
        states=tuple(states),
        counters={},
        initial=tuple((q, {}) for q in initial),
        final={q: TRUE_DNF for q in final},
        transitions=tuple(Transition.make(s, cls, d) for s, cls, d in edges),
        alphabet_size=alphabet_size,
    )


_CLASSES = ("a", "b", "c", "[ab]", "[bc]", "[^a]", ".")


def random_monadic_pattern(rng, depth: int = 5, max_bound: int = 5) -> str:
    """Random pattern over ``a``, ``b``, ``c`` whose counting applies to
    classes only."""
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice(_CLASSES)
    kind = rng.randrange(7)
    if kind == 0:
        return random_monadic_pattern(rng, depth - 1, max_bound) + random_monadic_pattern(rng, depth - 1, max_bound)
    if kind == 1:
        return ("(" + random_monadic_pattern(rng, depth - 1, max_bound) + "|"
                + random_monadic_pattern(rng, depth - 1, max_bound) + ")")
    if kind == 2:
        return "(" + random_monadic_pattern(rng, depth - 1, max_bound) + ")" + rng.choice("*+?")
    cls = rng.choice(_CLASSES)
    lo = rng.randint(0, max_bound)
    form = rng.randrange(3)
    if form == 0:
        return f"{cls}{{{lo}}}"
    if form == 1:
        return f"{cls}{{{lo},}}"
    return f"{cls}{{{lo},{rng.randint(lo, max_bound)}}}"
