"""Sphere-based determinisation of general CAs.

A sphere is a set of clauses ``(state, counter -> parameter)``; it stands for
the configurations obtained by instantiating its parameters.  Three modes:

* ``terminating``: successor terms are merged according to every feasible
  equivalence, so spheres never hold more distinct values than counters can
  take; spheres equal up to parameter renaming are shared.
* ``basic``: every distinct successor term gets its own parameter.  This need
  not terminate and runs under a sphere budget.
* reachability (:func:`determinise_reachable`): successors are generated only
  for configurations reached by concrete runs, checked against the subset DFA.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from math import factorial
from typing import Iterable, Optional

from .alphabet import CharClass, minterms
from .automaton import CountingAutomaton, Dca, DcaTransition, freeze_env, validate_mca
from .config import DEFAULT_LIMITS, Limits
from .errors import (Diverged, NotMonadic, PartitionBudgetExceeded, StateBudgetExceeded,
                     StuckUnexpected)
from .logic import EQ, GE, LE, NE, Atom, Term, make_atom, rename_conj
from .naive import normalise, subset, unfold
from .solver import distinct, satisfiable

Binding = tuple[tuple[str, str], ...]
Clause = tuple[str, Binding]

PERMUTATION_CAP = 5040


@dataclass(frozen=True)
class GeneralSphere:
    clauses: tuple[Clause, ...]

    def params(self) -> list[str]:
        seen = {p for _, b in self.clauses for _, p in b}
        return sorted(seen, key=_param_index)

    def label(self) -> str:
        parts = []
        for q, b in self.clauses:
            parts.append(q if not b else f"{q}[" + ",".join(f"{c}={p}" for c, p in b) + "]")
        return "{" + ", ".join(parts) + "}"

    def is_empty(self) -> bool:
        return not self.clauses

    def __str__(self) -> str:
        return self.label()


def _param_index(p: str) -> int:
    return int(p[1:])


def canonicalise(clauses: Iterable[tuple[str, dict]], rank: dict[str, int]):
    """Canonical sphere for clauses whose bindings map counters to arbitrary
    keys; also returns the map from key to canonical parameter name.

    Keys are coloured by where they occur, ties are broken by trying all
    orderings inside tie groups (up to a cap), and the lexicographically
    smallest clause list wins.
    """
    cl = sorted({(q, tuple(sorted(b.items()))) for q, b in clauses},
                key=lambda x: (rank[x[0]], x[0], repr(x[1])))
    keys = sorted({k for _, b in cl for _, k in b}, key=repr)
    colour = {k: 0 for k in keys}
    ncol = 1 if keys else 0
    while True:
        sig = {k: [] for k in keys}
        for q, b in cl:
            shape = (rank[q], tuple((c, colour[k]) for c, k in b))
            for c, k in b:
                sig[k].append((shape, c))
        table = {k: (colour[k], tuple(sorted(sig[k]))) for k in keys}
        ids = {s: i for i, s in enumerate(sorted(set(table.values())))}
        new = {k: ids[table[k]] for k in keys}
        if len(ids) == ncol:
            break
        colour, ncol = new, len(ids)
    groups: dict[int, list] = {}
    for k in keys:
        groups.setdefault(colour[k], []).append(k)
    ordered = [groups[c] for c in sorted(groups)]
    total = 1
    for g in ordered:
        total *= factorial(len(g))
    choices = product(*(permutations(g) for g in ordered)) if total <= PERMUTATION_CAP else [tuple(ordered)]
    best = None
    for choice in choices:
        order = [k for g in choice for k in g]
        idx = {k: i for i, k in enumerate(order)}
        form = tuple(sorted((rank[q], q, tuple((c, idx[k]) for c, k in b)) for q, b in cl))
        if best is None or form < best[0]:
            best = (form, idx)
    if best is None:
        return GeneralSphere(()), {}
    form, idx = best
    sphere = GeneralSphere(tuple((q, tuple((c, f"p{i}") for c, i in b)) for _, q, b in form))
    return sphere, {k: f"p{i}" for k, i in idx.items()}


def equal_up_to_renaming(x: GeneralSphere, y: GeneralSphere) -> Optional[dict[str, str]]:
    """A parameter bijection mapping ``x`` onto ``y``, if one exists."""
    states = sorted({q for q, _ in x.clauses} | {q for q, _ in y.clauses})
    rank = {q: i for i, q in enumerate(states)}
    cx, nx = canonicalise([(q, dict(b)) for q, b in x.clauses], rank)
    cy, ny = canonicalise([(q, dict(b)) for q, b in y.clauses], rank)
    if cx != cy:
        return None
    back = {v: k for k, v in ny.items()}
    return {p: back[c] for p, c in nx.items()}


@dataclass(frozen=True)
class Factor:
    sym: CharClass
    guard: tuple[Atom, ...]
    update: frozenset  # of (dst, ((counter, Term), ...))

    def terms(self) -> list[Term]:
        return sorted({t for _, b in self.update for _, t in b}, key=lambda t: (t.var or "", t.off))


def _predicate(a: Atom) -> Atom:
    """Representative of the pair {a, not a}."""
    if a.op == NE:
        return Atom(EQ, a.lhs, a.rhs)
    if a.op == GE:
        return make_atom(LE, a.lhs, a.rhs.shift(-1))
    return a


def _iter_sign_vectors(preds: tuple, domain_max: int):
    """Satisfiable conjunctions choosing each predicate or its negation,
    produced depth first."""
    def rec(i: int, conj: list):
        if i == len(preds):
            yield list(conj)
            return
        p = preds[i]
        for choice in (p, p.negate()):
            if choice is False:
                continue
            if choice is True:
                yield from rec(i + 1, conj)
                continue
            conj.append(choice)
            if satisfiable(conj, domain_max):
                yield from rec(i + 1, conj)
            conj.pop()

    yield from rec(0, [])


@lru_cache(maxsize=1 << 14)
def _sign_vectors(preds: tuple, domain_max: int) -> list[list[Atom]]:
    return list(_iter_sign_vectors(preds, domain_max))


def _rows(sphere: GeneralSphere, a: CountingAutomaton) -> list:
    """Transitions of the sphere's clauses with counters replaced by the
    clause's parameters: ``(class, guard, (target, binding))``."""
    rows = []
    for q, bind in sphere.clauses:
        gamma = {c: Term(p) for c, p in bind}
        for t in a.outgoing[q]:
            guard = rename_conj(t.guard, gamma)
            if guard is None:
                continue
            assign = {c: term.rename(gamma) for c, term in t.assign}
            target = tuple((c, assign[c] if c in assign else gamma[c])
                           for c in sorted(a.live[t.dst]))
            rows.append((t.sym, guard, (t.dst, target)))
    return rows


def iter_factors(sphere: GeneralSphere, a: CountingAutomaton, domain_max: int, lazy: bool = False):
    """Factors for each symbol minterm separately.  With ``lazy`` the sign
    vectors are produced on demand instead of being cached, and the minterms
    take turns."""
    rows = _rows(sphere, a)

    def per_block(block):
        enabled = [r for r in rows if block.issubset(r[0])]
        preds = tuple(sorted({_predicate(x) for r in enabled for x in r[1]}))
        signs = _iter_sign_vectors(preds, domain_max) if lazy else _sign_vectors(preds, domain_max)
        for conj in signs:
            holds = set(conj)
            update = frozenset(r[2] for r in enabled if all(x in holds for x in r[1]))
            yield Factor(block, tuple(sorted(conj)), update)

    blocks = minterms([r[0] for r in rows], a.alphabet_size)
    if not lazy:
        for block in blocks:
            yield from per_block(block)
        return
    # round robin so that one block with many sign vectors cannot starve the rest
    gens = deque(per_block(b) for b in blocks)
    while gens:
        g = gens.popleft()
        f = next(g, None)
        if f is not None:
            yield f
            gens.append(g)


def factorise(sphere: GeneralSphere, a: CountingAutomaton, domain_max: int) -> list[Factor]:
    """Split the successor relation of ``sphere`` into factors with pairwise
    exclusive guards (symbol minterm plus a sign choice for each relevant
    parameter atom); minterms with equal guard and update share a factor."""
    factors: dict[tuple, CharClass] = {}
    for f in iter_factors(sphere, a, domain_max):
        key = (f.guard, f.update)
        factors[key] = factors[key] | f.sym if key in factors else f.sym
    return [Factor(sym, guard, update) for (guard, update), sym in factors.items()]


def set_partitions(n: int):
    """Restricted-growth strings of length ``n``."""
    if n == 0:
        yield ()
        return
    a = [0] * n

    def rec(i: int, m: int):
        if i == n:
            yield tuple(a)
            return
        for v in range(m + 2):
            a[i] = v
            yield from rec(i + 1, max(m, v))

    a[0] = 0
    yield from rec(1, 0)


def enumerate_merges(terms: list[Term], max_a: int, context: list[Atom] = (),
                     params: Iterable[str] = (), class_bound=None, log=None):
    """Equivalences on ``terms`` that may describe reachable successor values.

    Yields ``(blocks, equalities, disequalities, representatives)`` for each
    partition whose formula is satisfiable, has at most ``max_a + 1`` classes,
    and is consistent with ``context`` and pairwise distinct ``params``.
    ``class_bound`` optionally lists ``(limit, terms)`` pairs capping the
    classes met by a subset of the terms.

    Partitions are built term by term; two terms that cannot be equal under
    the context never share a class, which cuts most of the search.
    """
    base = distinct(params) + list(context)
    n = len(terms)
    apart = set()
    for i in range(n):
        for j in range(i + 1, n):
            x = make_atom(EQ, terms[i], terms[j])
            if x is False or (x is not True and not satisfiable(base + [x], max_a)):
                apart.add((i, j))
                if log:
                    log(f"    apart {terms[i]} {terms[j]}")
    groups = []
    if class_bound:
        index = {t: i for i, t in enumerate(terms)}
        groups = [(limit, sorted({index[t] for t in ts})) for limit, ts in class_bound]
    blocks = [0] * n
    members: list[list[int]] = []

    def bounded(i: int) -> bool:
        for limit, idx in groups:
            if i in idx and len({blocks[j] for j in idx if j <= i}) > limit + 1:
                return False
        return True

    def leaf():
        key = tuple(blocks)
        eqs, neqs, reps = merge_atoms(terms, key)
        if not satisfiable(eqs + neqs, max_a):
            if log:
                log(f"    reject {_partition_text(terms, key)}: unsat")
            return None
        if not satisfiable(base + eqs + neqs, max_a):
            if log:
                log(f"    reject {_partition_text(terms, key)}: infeasible under distinctness")
            return None
        if log:
            log(f"    accept {_partition_text(terms, key)}")
        return key, eqs, neqs, reps

    def rec(i: int):
        if i == n:
            hit = leaf()
            if hit is not None:
                yield hit
            return
        for b, mem in enumerate(members):
            if all((m, i) not in apart for m in mem):
                blocks[i] = b
                if bounded(i):
                    mem.append(i)
                    yield from rec(i + 1)
                    mem.pop()
        if len(members) < max_a + 1:
            blocks[i] = len(members)
            if bounded(i):
                members.append([i])
                yield from rec(i + 1)
                members.pop()

    yield from rec(0)


def merge_atoms(terms: list[Term], blocks: tuple[int, ...]):
    """The formula of an equivalence over ``terms``; ``None`` when it is
    syntactically false.  Returns (equalities, disequalities, representatives)."""
    reps: dict[int, Term] = {}
    eqs, neqs = [], []
    for t, b in zip(terms, blocks):
        if b not in reps:
            reps[b] = t
            continue
        x = make_atom(EQ, t, reps[b])
        if x is False:
            return None
        if x is not True:
            eqs.append(x)
    rl = [reps[b] for b in sorted(reps)]
    for i, r1 in enumerate(rl):
        for r2 in rl[i + 1:]:
            x = make_atom(NE, r1, r2)
            if x is False:
                return None
            if x is not True:
                neqs.append(x)
    return eqs, neqs, reps


class _Construction:
    def __init__(self, a: CountingAutomaton, mode: str, limits: Limits, trace: Optional[list],
                 sphere_budget: Optional[int]):
        self.a = a
        self.mode = mode
        self.limits = limits
        self.trace = trace
        self.rank = {q: i for i, q in enumerate(a.states)}
        self.domain_max = a.max_a
        self.budget = sphere_budget if sphere_budget is not None else limits.max_spheres
        self.spheres: list[GeneralSphere] = []
        self.index: dict[GeneralSphere, int] = {}
        self.transitions: dict[tuple, CharClass] = {}
        self.factor_cache: dict[int, list[Factor]] = {}
        try:
            validate_mca(a)
            self.per_counter = dict(a.counters)
        except NotMonadic:
            self.per_counter = None

    def log(self, line: str) -> None:
        if self.trace is not None:
            self.trace.append(line)

    def add_sphere(self, sphere: GeneralSphere) -> int:
        i = self.index.get(sphere)
        if i is None:
            if len(self.spheres) >= self.budget:
                if self.mode == "basic":
                    raise Diverged(f"sphere budget {self.budget} exhausted", list(self.spheres))
                raise StateBudgetExceeded(f"more than {self.budget} spheres")
            i = self.index[sphere] = len(self.spheres)
            self.spheres.append(sphere)
            self.log(f"new {sphere.label()}")
        return i

    def initial(self) -> tuple[int, dict[str, int]]:
        values = sorted({v for q, vals in self.a.initial for c, v in vals if c in self.a.live[q]})
        key = {v: ("init", v) for v in values}
        clauses = [(q, {c: key[v] for c, v in vals if c in self.a.live[q]}) for q, vals in self.a.initial]
        sphere, names = canonicalise(clauses, self.rank)
        return self.add_sphere(sphere), {names[key[v]]: v for v in values}

    def factors(self, i: int) -> list[Factor]:
        f = self.factor_cache.get(i)
        if f is None:
            f = self.factor_cache[i] = factorise(self.spheres[i], self.a, self.domain_max)
        return f

    def _class_bound(self, factor: Factor):
        """Per-counter class limits for MCA inputs: the classes of terms bound
        to counter ``c`` can number at most ``max_c + 1``."""
        if self.per_counter is None:
            return None
        return [(self.per_counter[c], [t for _, b in factor.update for c2, t in b if c2 == c])
                for c in self.per_counter]

    def emit(self, src: int, factor: Factor, terms: list[Term], blocks: tuple[int, ...],
             eqs: list[Atom], neqs: list[Atom], reps: dict[int, Term]) -> tuple[int, dict[str, Term]]:
        """Add the transition for one accepted equivalence; returns the target
        sphere and the assignment to its parameters."""
        cls_of = dict(zip(terms, blocks))
        clauses = [(q, {c: cls_of[t] for c, t in b}) for q, b in factor.update]
        sphere, names = canonicalise(clauses, self.rank)
        dst = self.add_sphere(sphere)
        assign = {names[b]: reps[b] for b in names}
        guard = list(factor.guard) + eqs
        if self.mode != "basic":
            for x in neqs:
                # keep a disequality only if the guard does not already exclude equality
                if satisfiable(guard + [Atom(EQ, x.lhs, x.rhs)], self.domain_max):
                    guard.append(x)
        guard_t = tuple(dict.fromkeys(guard))
        assign_t = tuple(sorted(assign.items(), key=lambda kv: _param_index(kv[0])))
        key = (src, guard_t, assign_t, dst)
        old = self.transitions.get(key)
        self.transitions[key] = factor.sym if old is None else old | factor.sym
        return dst, assign

    def expand(self, i: int) -> None:
        sphere = self.spheres[i]
        self.log(f"pop {sphere.label()}")
        for factor in self.factors(i):
            terms = factor.terms()
            self.log(f"  factor {factor.sym} {_conj_text(factor.guard)} -> "
                     + _update_text(factor.update))
            if len(terms) > self.limits.max_partition_terms:
                raise PartitionBudgetExceeded(
                    f"{len(terms)} assignment terms exceed the cap {self.limits.max_partition_terms}")
            for blocks, eqs, neqs, reps in enumerate_merges(
                    terms, self.domain_max, list(factor.guard), sphere.params(),
                    self._class_bound(factor), self.log):
                self.emit(i, factor, terms, blocks, eqs, neqs, reps)

    def emit_discrete(self, src: int, factor: Factor) -> None:
        """Each distinct term gets its own parameter; no merging."""
        self.log(f"  factor {factor.sym} {_conj_text(factor.guard)} -> " + _update_text(factor.update))
        terms = factor.terms()
        blocks = tuple(range(len(terms)))
        self.emit(src, factor, terms, blocks, [], [], {b: t for b, t in zip(blocks, terms)})

    def run_basic(self) -> None:
        """Expand depth first, one factor at a time: a freshly created sphere
        is expanded before its parent's remaining factors.  The result does
        not depend on the order, but on diverging inputs new spheres surface
        after a few factors instead of after exponentially many."""
        stack = [(0, iter_factors(self.spheres[0], self.a, self.domain_max, lazy=True))]
        self.log(f"pop {self.spheres[0].label()}")
        while stack:
            self.limits.check_time()
            src, gen = stack[-1]
            factor = next(gen, None)
            if factor is None:
                stack.pop()
                continue
            before = len(self.spheres)
            self.emit_discrete(src, factor)
            for j in range(before, len(self.spheres)):
                self.log(f"pop {self.spheres[j].label()}")
                stack.append((j, iter_factors(self.spheres[j], self.a, self.domain_max, lazy=True)))

    def finish(self, initial: int, valuation: dict[str, int], ground: bool, method: str) -> Dca:
        params = sorted({p for s in self.spheres for p in s.params()}, key=_param_index)
        final = {}
        for i, s in enumerate(self.spheres):
            dnf = []
            for q, bind in s.clauses:
                for conj in self.a.final.get(q, ()):
                    r = rename_conj(conj, {c: Term(p) for c, p in bind})
                    if r is not None:
                        dnf.append(r)
            if dnf:
                if () in dnf:
                    dnf = [()]
                final[i] = tuple(dict.fromkeys(dnf))
        transitions = [DcaTransition(src, sym, guard, assign, dst)
                       for (src, guard, assign, dst), sym in self.transitions.items()]
        if ground:
            transitions, final = _ground(self.spheres, transitions, final, params)
        d = Dca(list(self.spheres), tuple(params), initial, valuation, transitions, final,
                self.a.alphabet_size, method)
        return d


def _ground(spheres, transitions, final, params):
    """Pin parameters that a sphere does not use to 0 in its guards and final
    condition.  Resets of unassigned parameters are implicit in :class:`Dca`."""
    own = [set(s.params()) for s in spheres]
    out = []
    for t in transitions:
        pins = tuple(Atom(EQ, Term(p), Term.const(0)) for p in params
                     if p not in own[t.src] and not any(p in x.vars() for x in t.guard))
        out.append(DcaTransition(t.src, t.sym, t.guard + pins, t.assign, t.dst))
    fin = {}
    for i, dnf in final.items():
        pins = tuple(Atom(EQ, Term(p), Term.const(0)) for p in params if p not in own[i])
        fin[i] = tuple(conj + tuple(x for x in pins if not any(x.lhs.var in y.vars() for y in conj))
                       for conj in dnf)
    return out, fin


def _conj_text(atoms) -> str:
    return " & ".join(str(x) for x in atoms) or "true"


def _update_text(update) -> str:
    rows = sorted(f"{q}" + ("[" + ",".join(f"{c}={t}" for c, t in b) + "]" if b else "")
                  for q, b in update)
    return "{" + ", ".join(rows) + "}"


def _partition_text(terms, blocks) -> str:
    groups: dict[int, list[str]] = {}
    for t, b in zip(terms, blocks):
        groups.setdefault(b, []).append(str(t))
    return "|".join("{" + ",".join(g) + "}" for g in groups.values())


def sphere_bound_holds(d: Dca, a: CountingAutomaton) -> bool:
    """``|spheres| <= 2^(|Q| * (maxA+1)^|C|)``."""
    exponent = len(a.states) * (a.max_a + 1) ** len(a.counters)
    return (d.num_states - 1).bit_length() <= exponent


def determinise(a: CountingAutomaton, mode: str = "terminating", limits: Limits = DEFAULT_LIMITS,
                trace: Optional[list] = None, sphere_budget: Optional[int] = None,
                ground: bool = True) -> Dca:
    if mode not in ("terminating", "basic"):
        raise ValueError(f"unknown mode {mode!r}")
    b = _Construction(a, mode, limits, trace, sphere_budget)
    init, valuation = b.initial()
    if mode == "basic":
        b.run_basic()
    else:
        i = 0
        while i < len(b.spheres):
            limits.check_time()
            b.expand(i)
            i += 1
    d = b.finish(init, valuation, ground, "general" if mode == "terminating" else "general-basic")
    if mode == "terminating":
        assert sphere_bound_holds(d, a), "sphere count exceeds 2^(|Q|*(maxA+1)^|C|)"
    return d


def instance(sphere: GeneralSphere, env: dict[str, int], a: CountingAutomaton) -> frozenset:
    """Configurations denoted by ``sphere`` under ``env`` (dead counters read 0)."""
    from .automaton import Configuration

    out = set()
    for q, bind in sphere.clauses:
        vals = {c: 0 for c in a.counters}
        for c, p in bind:
            vals[c] = env.get(p, 0)
        out.add(normalise(a, Configuration(q, tuple(sorted(vals.items())))))
    return frozenset(out)


def determinise_reachable(a: CountingAutomaton, limits: Limits = DEFAULT_LIMITS,
                          trace: Optional[list] = None, ground: bool = True) -> Dca:
    """Sphere construction driven by concrete runs.

    Explores triples (DFA state, sphere, valuation).  Each step takes the one
    factor enabled at the valuation, merges successor terms whose values
    coincide, and checks that the new sphere instantiates exactly the DFA's
    macrostate.  Only spheres and transitions met this way are kept.
    """
    nfa = unfold(a, limits)
    dfa = subset(nfa, limits)
    b = _Construction(a, "reachable", limits, trace, None)
    init, valuation = b.initial()
    if dfa.initial is None:
        return b.finish(init, valuation, ground, "general-reach")
    macro = [frozenset(nfa.states[x] for x in m) for m in _macro_sets(dfa, nfa)]
    if instance(b.spheres[init], valuation, a) != macro[dfa.initial]:
        raise StuckUnexpected("initial sphere does not match the initial macrostate")
    start = (dfa.initial, init, freeze_env(valuation))
    seen = {start}
    stack = [start]
    steps = 0
    while stack:
        steps += 1
        if steps % 1024 == 0:
            limits.check_time()
        m, s, env_t = stack.pop()
        env = dict(env_t)
        factors = b.factors(s)
        for bi, block in enumerate(dfa.blocks.blocks):
            hit = [f for f in factors if block.issubset(f.sym)
                   and all(x.holds(env) for x in f.guard)]
            if len(hit) != 1:
                raise StuckUnexpected(f"{len(hit)} factors enabled in {b.spheres[s].label()}")
            factor = hit[0]
            m2 = dfa.delta[m].get(bi)
            if not factor.update:
                if m2 is not None:
                    raise StuckUnexpected("empty update but the DFA moves")
                continue
            if m2 is None:
                # every successor configuration is dead: the DFA leaves it implicit
                continue
            terms = factor.terms()
            values = [t.value(env) for t in terms]
            order = {v: i for i, v in enumerate(dict.fromkeys(values))}
            blocks = tuple(order[v] for v in values)
            eqs, neqs, reps = merge_atoms(terms, blocks)
            dst, assign = b.emit(s, factor, terms, blocks, eqs, neqs, reps)
            env2 = {p: t.value(env) for p, t in assign.items()}
            if instance(b.spheres[dst], env2, a) != macro[m2]:
                raise StuckUnexpected(f"sphere {b.spheres[dst].label()} does not instantiate "
                                      f"DFA state {m2}")
            nxt = (m2, dst, freeze_env(env2))
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return b.finish(init, valuation, ground, "general-reach")


def _macro_sets(dfa, nfa):
    index = {c: i for i, c in enumerate(nfa.states)}
    return [[index[c] for c in m] for m in dfa.macrostates]
