"""Determinisation specialised to monadic CAs, with multiset spheres.

A sphere maps each state to the number of tracked variants of its counter
(1 for a present simple state).  Variant ``i`` of counter ``c`` is the
parameter ``c[i]``; for exact counting states variant values stay strictly
increasing in ``i``, so only the highest variant is ever tested.

The ``c < max`` guard of every increment self-loop is kept as a minterm atom
on the highest variant.  A minterm that negates it (written ``c = max``) drops
that variant; exit guards ``c = max`` are the same atom.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

from .alphabet import CharClass, minterms
from .automaton import (CountingAutomaton, Dca, DcaTransition, McaShape, Transition,
                        validate_mca)
from .config import DEFAULT_LIMITS, Limits
from .errors import StateBudgetExceeded
from .logic import EQ, GE, LE, Atom, Term, make_atom
from .naive import global_blocks
from .solver import distinct, satisfiable


@dataclass(frozen=True)
class MultisetSphere:
    counts: tuple[tuple[str, int], ...]

    def __getitem__(self, q: str) -> int:
        return dict(self.counts).get(q, 0)

    def label(self) -> str:
        return "{" + ", ".join(f"{q}↦{n}" for q, n in self.counts) + "}"

    def is_empty(self) -> bool:
        return not self.counts

    def __str__(self) -> str:
        return self.label()


def variant(counter: str, i: int) -> str:
    return f"{counter}[{i}]"


class _Builder:
    def __init__(self, a: CountingAutomaton, shape: McaShape, limits: Limits, trace: Optional[list]):
        self.a = a
        self.shape = shape
        self.limits = limits
        self.trace = trace
        self.rank = {q: i for i, q in enumerate(a.states)}
        self.spheres: list[MultisetSphere] = []
        self.index: dict[MultisetSphere, int] = {}
        self.transitions: list[DcaTransition] = []
        self.discarded = 0

    def log(self, line: str) -> None:
        if self.trace is not None:
            self.trace.append(line)

    def sphere(self, counts: dict[str, int]) -> int:
        s = MultisetSphere(tuple(sorted(((q, n) for q, n in counts.items() if n > 0),
                                        key=lambda qn: self.rank[qn[0]])))
        i = self.index.get(s)
        if i is None:
            if len(self.spheres) >= self.limits.max_spheres:
                raise StateBudgetExceeded(f"more than {self.limits.max_spheres} spheres")
            i = self.index[s] = len(self.spheres)
            self.spheres.append(s)
        return i

    def high(self, q: str, psi: MultisetSphere) -> str:
        return variant(self.shape.counting[q].counter, psi[q] - 1)

    def expand(self, src: int) -> None:
        psi = self.spheres[src]
        self.log(f"pop {psi.label()}")
        counting = self.shape.counting
        active = [q for q, _ in psi.counts]
        delta = [t for q in active for t in self.a.outgoing[q]]
        loop_atom: dict[str, Atom] = {}
        for q in active:
            if q in counting:
                info = counting[q]
                loop_atom[q] = make_atom(LE, Term(self.high(q, psi)), Term.const(info.bound - 1))
        groups: dict[tuple, CharClass] = {}
        outcome: dict[tuple, Optional[tuple]] = {}
        for block in minterms([t.sym for t in delta], self.a.alphabet_size):
            enabled = [t for t in delta if block.issubset(t.sym)]
            relevant = sorted({t.src for t in enabled if t.src in counting
                               and (t.assign and t.src == t.dst and t == counting[t.src].increment
                                    or counting[t.src].exact)}, key=self.rank.get)
            for signs in product((True, False), repeat=len(relevant)):
                below = dict(zip(relevant, signs))
                guard = tuple(loop_atom[q] if below[q] else
                              Atom(EQ, Term(self.high(q, psi)), Term.const(counting[q].bound))
                              for q in relevant)
                chosen = frozenset(t for t in enabled if self._compatible(t, below))
                key = (guard, chosen)
                if key not in outcome:
                    outcome[key] = self._successor(psi, enabled, chosen, below)
                groups[key] = groups[key] | block if key in groups else block
        for key, sym in groups.items():
            guard, _ = key
            result = outcome[key]
            text = " & ".join(str(g) for g in guard) or "true"
            if result is None:
                self.discarded += 1
                self.log(f"  {sym} {text}: discarded")
                continue
            counts, assign = result
            dst = self.sphere(counts)
            f = tuple(sorted(assign.items()))
            self.transitions.append(DcaTransition(src, sym, guard, f, dst))
            self.log(f"  {sym} {text} -> {self.spheres[dst].label()} "
                     + ", ".join(f"{p}'={t}" for p, t in f))

    def _compatible(self, t: Transition, below: dict[str, bool]) -> bool:
        info = self.shape.counting.get(t.src)
        if info is None:
            return True
        if t == info.increment:
            return below[t.src]
        if t.guard:  # exit of an exact state
            return not below[t.src]
        return True

    def _successor(self, psi: MultisetSphere, enabled, chosen, below):
        """Steps 1-3; ``None`` when the transition must be discarded.

        ``enabled`` holds the transitions whose class covers the block and
        ``chosen`` those whose counter guard also holds.  Increment loops are
        taken from ``enabled``: the lower variants keep counting even when the
        highest one has saturated.
        """
        counting = self.shape.counting
        new: dict[str, int] = {}
        assign: dict[str, Term] = {}
        increments: dict[str, int] = {}
        # step 1: simple targets
        for t in chosen:
            if t.dst not in counting:
                new[t.dst] = 1
        # step 2: increment self-loops
        for t in enabled:
            info = counting.get(t.src)
            if info is None or t != info.increment:
                continue
            q = t.src
            n = psi[q]
            keep = n if below[q] else n - 1
            if not info.exact:
                keep = min(keep, 1)
            increments[q] = keep
            new[q] = keep
            for i in range(keep):
                assign[variant(info.counter, i)] = Term(variant(info.counter, i), 1)
        # step 3: entry transitions
        for q in sorted({t.dst for t in chosen if t.assign and t.dst in counting
                         and t != counting[t.dst].increment}, key=self.rank.get):
            info = counting[q]
            kept = increments.get(q, 0)
            if info.exact:
                if kept + 1 > info.bound + 1:
                    return None
                for i in reversed(range(kept)):
                    assign[variant(info.counter, i + 1)] = assign.pop(variant(info.counter, i))
                new[q] = kept + 1
            else:
                new[q] = 1
            assign[variant(info.counter, 0)] = Term.const(0)
        return new, assign


def determinise_monadic(a: CountingAutomaton, limits: Limits = DEFAULT_LIMITS,
                        trace: Optional[list] = None, prune_infeasible: bool = False) -> Dca:
    shape = validate_mca(a)
    b = _Builder(a, shape, limits, trace)
    init_counts = {q: 1 for q, _ in a.initial}
    b.sphere(init_counts)
    valuation = {variant(shape.counting[q].counter, 0): 0 for q in init_counts if q in shape.counting}
    i = 0
    while i < len(b.spheres):
        limits.check_time()
        b.expand(i)
        i += 1

    transitions = b.transitions
    if prune_infeasible:
        transitions = [t for t in transitions if _feasible(t, b.spheres[t.src], shape)]
    final = {}
    for idx, psi in enumerate(b.spheres):
        conj = []
        for q, n in psi.counts:
            if q not in a.final:
                continue
            info = shape.counting.get(q)
            if info is None or not info.exact:
                conj = [()]
                break
            conj.append((Atom(EQ, Term(variant(info.counter, n - 1)), Term.const(info.bound)),))
        if conj:
            final[idx] = tuple(conj)
    order = {c: i for i, c in enumerate(a.counters)}
    used = {p for t in transitions for p, _ in t.assign} | set(valuation)
    params = tuple(sorted(used, key=lambda p: (order[p.split("[")[0]], int(p.split("[")[1][:-1]))))
    d = Dca(b.spheres, params, 0, valuation, transitions, final, a.alphabet_size, "monadic")
    d.stats.update(discarded=b.discarded, pruned=len(b.transitions) - len(transitions))
    return d


def _feasible(t: DcaTransition, psi: MultisetSphere, shape: McaShape) -> bool:
    """Is the guard satisfiable together with the variant invariants of ``psi``?"""
    atoms = list(t.guard)
    top = 0
    for q, n in psi.counts:
        info = shape.counting.get(q)
        if info is None:
            continue
        top = max(top, info.bound)
        names = [variant(info.counter, i) for i in range(n)]
        atoms += distinct(names)
        for i, p in enumerate(names):
            lo = i if info.exact else 0
            hi = info.bound - (n - 1 - i) if info.exact else info.bound
            atoms += [x for x in (make_atom(GE, Term(p), Term.const(lo)),
                                  make_atom(LE, Term(p), Term.const(hi))) if isinstance(x, Atom)]
    return satisfiable(atoms, top)


def bound_check(d: Dca, a: CountingAutomaton) -> dict:
    """Size bounds for monadic output, with ``max(1, maxA)`` in place of maxA.

    The transition bound is evaluated with both the number of global minterms
    and the raw alphabet size standing in for the alphabet.
    """
    m = max(1, a.max_a)
    nq = len(a.states)
    state_bound = (m + 1) ** nq
    sigma = len(global_blocks(a))
    per = (4 * (m + 1)) ** nq
    return {
        "states": d.num_states,
        "state_bound": state_bound,
        "transitions": d.num_transitions,
        "transition_bound_minterms": sigma * per,
        "transition_bound_alphabet": a.alphabet_size * per,
        "ok": d.num_states <= state_bound and d.num_transitions <= sigma * per,
    }
