"""Counting automata, their configuration-set semantics, and deterministic CAs.

Transition guards are conjunctions of atoms; a disjunctive guard is written as
several transitions.  Counters not assigned by a transition keep their value.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

from .alphabet import BYTE_ALPHABET, CharClass
from .errors import BoundViolation, NotMonadic, StuckUnexpected
from .logic import EQ, LE, Atom, Term, conj_holds

Word = Union[str, bytes, Sequence[int]]
Dnf = tuple[tuple[Atom, ...], ...]
TRUE_DNF: Dnf = ((),)


def to_codes(word: Word) -> list[int]:
    if isinstance(word, str):
        return [ord(ch) for ch in word]
    return list(word)


def dnf_holds(dnf: Dnf, env: Mapping[str, int]) -> bool:
    return any(conj_holds(conj, env) for conj in dnf)


def dnf_vars(dnf: Dnf) -> set[str]:
    return {v for conj in dnf for a in conj for v in a.vars()}


@dataclass(frozen=True)
class Transition:
    src: str
    sym: CharClass
    guard: tuple[Atom, ...]
    assign: tuple[tuple[str, Term], ...]
    dst: str

    @classmethod
    def make(cls, src: str, sym: CharClass, dst: str,
             guard: Iterable[Atom] = (), assign: Optional[Mapping[str, Term]] = None) -> Transition:
        return cls(src, sym, tuple(guard), tuple(sorted((assign or {}).items())), dst)

    @property
    def assigned(self) -> dict[str, Term]:
        return dict(self.assign)

    def used(self) -> set[str]:
        out = {v for a in self.guard for v in a.vars()}
        out |= {t.var for _, t in self.assign if t.var is not None}
        return out


@dataclass(frozen=True, order=True)
class Configuration:
    state: str
    counters: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, state: str, **values: int) -> Configuration:
        return cls(state, tuple(sorted(values.items())))

    @property
    def env(self) -> dict[str, int]:
        return dict(self.counters)

    def __str__(self) -> str:
        vals = ",".join(f"{c}={v}" for c, v in self.counters)
        return f"({self.state}{',' if vals else ''}{vals})"


@dataclass
class CountingAutomaton:
    """A nondeterministic CA.

    ``counters`` maps each counter to its declared maximum; ``initial`` lists
    concrete initial configurations; ``final`` maps states to a DNF over
    counter atoms (``((),)`` is true, states absent from the map are not final).
    """

    states: tuple[str, ...]
    counters: dict[str, int]
    initial: tuple[tuple[str, tuple[tuple[str, int], ...]], ...]
    final: dict[str, Dnf]
    transitions: tuple[Transition, ...]
    alphabet_size: int = BYTE_ALPHABET

    def __post_init__(self):
        self.states = tuple(self.states)
        self.transitions = tuple(self.transitions)
        self.initial = tuple((q, tuple(sorted(dict(v).items()))) for q, v in self.initial)
        self.final = {q: tuple(tuple(c) for c in d) for q, d in self.final.items() if d}
        known = set(self.states)
        if len(known) != len(self.states):
            raise ValueError("duplicate state names")
        for q, vals in self.initial:
            if q not in known:
                raise ValueError(f"unknown initial state {q}")
            if set(dict(vals)) != set(self.counters):
                raise ValueError(f"initial configuration of {q} must value every counter")
        for q, d in self.final.items():
            if q not in known:
                raise ValueError(f"unknown final state {q}")
            if not dnf_vars(d) <= set(self.counters):
                raise ValueError(f"final condition of {q} uses unknown counters")
        for t in self.transitions:
            if t.src not in known or t.dst not in known:
                raise ValueError(f"transition between unknown states: {t}")
            if t.sym.size != self.alphabet_size:
                raise ValueError("transition class over wrong alphabet")
            names = {c for c, _ in t.assign} | t.used()
            if not names <= set(self.counters):
                raise ValueError(f"transition uses unknown counters: {sorted(names - set(self.counters))}")

    @property
    def max_a(self) -> int:
        return max(self.counters.values(), default=0)

    @cached_property
    def outgoing(self) -> dict[str, list[Transition]]:
        out: dict[str, list[Transition]] = {q: [] for q in self.states}
        for t in self.transitions:
            out[t.src].append(t)
        return out

    @cached_property
    def live(self) -> dict[str, frozenset[str]]:
        """Counters whose value at a state may still influence a guard,
        an assignment, or the final condition."""
        live = {q: set(dnf_vars(self.final.get(q, ()))) for q in self.states}
        changed = True
        while changed:
            changed = False
            for t in self.transitions:
                need = t.used() | (live[t.dst] - {c for c, _ in t.assign})
                if not need <= live[t.src]:
                    live[t.src] |= need
                    changed = True
        return {q: frozenset(v) for q, v in live.items()}

    def is_final(self, config: Configuration) -> bool:
        d = self.final.get(config.state)
        return bool(d) and dnf_holds(d, config.env)

    def initial_configurations(self) -> set[Configuration]:
        return {Configuration(q, vals) for q, vals in self.initial}

    def step(self, configs: Iterable[Configuration], code: int) -> set[Configuration]:
        out = set()
        bound = self.max_a
        for cfg in configs:
            env = None
            for t in self.outgoing[cfg.state]:
                if code not in t.sym:
                    continue
                if env is None:
                    env = cfg.env
                if not conj_holds(t.guard, env):
                    continue
                new = dict(env)
                for c, term in t.assign:
                    v = term.value(env)
                    if v < 0 or v > bound:
                        raise BoundViolation(f"counter {c} reaches {v} > max {bound} on {t}")
                    new[c] = v
                out.add(Configuration(t.dst, tuple(sorted(new.items()))))
        return out

    def summary(self) -> str:
        return (f"CA(|Q|={len(self.states)}, |C|={len(self.counters)}, "
                f"|Delta|={len(self.transitions)}, max={self.max_a})")


def outcome(a: CountingAutomaton, word: Word) -> set[Configuration]:
    """All configurations reachable from an initial one by reading ``word``."""
    configs = a.initial_configurations()
    for code in to_codes(word):
        configs = a.step(configs, code)
        if not configs:
            break
    return configs


def accepts(a: CountingAutomaton, word: Word) -> bool:
    return any(a.is_final(c) for c in outcome(a, word))


# --------------------------------------------------------------------------
# monadic structure


@dataclass(frozen=True)
class CountingState:
    state: str
    counter: str
    bound: int
    exact: bool
    increment: Transition
    entries: tuple[Transition, ...]
    exits: tuple[Transition, ...]


@dataclass(frozen=True)
class McaShape:
    simple: frozenset[str]
    exact: frozenset[str]
    range: frozenset[str]
    counting: Mapping[str, CountingState]
    owner: Mapping[str, str]

    def role(self, t: Transition) -> set[str]:
        """Roles of ``t``: a subset of {"increment", "entry", "exit"}."""
        roles = set()
        src = self.counting.get(t.src)
        if src is not None and src.increment == t:
            return {"increment"}
        if t.assign:
            roles.add("entry")
        if src is not None:
            roles.add("exit")
        return roles


def validate_mca(a: CountingAutomaton) -> McaShape:
    """Check the monadic shape and classify states.

    Raises :class:`NotMonadic` naming the violated condition (1-5).
    """
    owner: dict[str, str] = {}
    increment: dict[str, Transition] = {}
    bound: dict[str, int] = {}
    for t in a.transitions:
        inc = [(c, term) for c, term in t.assign if term == Term(c, 1)]
        if not inc:
            continue
        c = inc[0][0]
        if t.src != t.dst:
            raise NotMonadic(3, f"increment of {c} is not a self-loop: {t.src}->{t.dst}")
        if len(t.assign) != 1:
            raise NotMonadic(3, f"increment self-loop on {t.src} assigns several counters")
        if t.src in increment:
            raise NotMonadic(3, f"{t.src} has more than one increment transition (single increment transition required)")
        if owner.get(c, t.src) != t.src:
            raise NotMonadic(2, f"counter {c} is incremented in both {owner[c]} and {t.src}")
        ctr_atoms = [x for x in t.guard]
        lims = [x for x in ctr_atoms if x.op == LE and x.lhs == Term(c) and x.rhs.var is None]
        if len(lims) != 1 or len(ctr_atoms) != 1:
            raise NotMonadic(3, f"increment of {c} on {t.src} must be guarded by exactly c<max")
        owner[c] = t.src
        increment[t.src] = t
        bound[t.src] = lims[0].rhs.off + 1
    for c in a.counters:
        if c not in owner:
            raise NotMonadic(2, f"counter {c} has no counting state")
    counter_of = {q: c for c, q in owner.items()}
    for q, b in bound.items():
        if a.counters[counter_of[q]] < b:
            raise NotMonadic(3, f"declared max of {counter_of[q]} below its increment bound {b}")

    entries: dict[str, list[Transition]] = defaultdict(list)
    exits: dict[str, list[tuple[Transition, bool]]] = defaultdict(list)
    for t in a.transitions:
        if increment.get(t.src) == t:
            continue
        src_c = counter_of.get(t.src)
        guarded = False
        for atom in t.guard:
            if src_c is None or atom.vars() != {src_c}:
                raise NotMonadic(3, f"counter guard {atom} on {t.src}->{t.dst} is not an exit test of {t.src}")
            if not (atom.op == EQ and atom.lhs == Term(src_c)
                    and atom.rhs == Term.const(bound[t.src])):
                raise NotMonadic(3, f"exit guard {atom} on {t.src} must be {src_c}={bound[t.src]}")
            guarded = True
        if t.assign:
            if len(t.assign) != 1:
                raise NotMonadic(3, f"transition {t.src}->{t.dst} assigns several counters")
            c, term = t.assign[0]
            if owner[c] != t.dst or term != Term.const(0):
                raise NotMonadic(3, f"assignment {c}'={term} on {t.src}->{t.dst} is not an entry reset")
            entries[t.dst].append(t)
        elif t.dst in counter_of:
            raise NotMonadic(3, f"transition into counting state {t.dst} does not reset its counter")
        if src_c is not None:
            exits[t.src].append((t, guarded))

    counting = {}
    for q, c in counter_of.items():
        flags = {g for _, g in exits[q]}
        if len(flags) > 1:
            raise NotMonadic(3, f"{q} mixes guarded (exact) and unguarded (range) exits")
        if flags:
            exact = flags.pop()
        else:
            exact = a.final.get(q) != TRUE_DNF
        counting[q] = CountingState(q, c, bound[q], exact, increment[q], tuple(entries[q]),
                                    tuple(t for t, _ in exits[q]))

    for q, vals in a.initial:
        if q in counter_of and dict(vals)[counter_of[q]] != 0:
            raise NotMonadic(4, f"initial counting state {q} must start its counter at 0")
    for q, d in a.final.items():
        info = counting.get(q)
        if info is not None and info.exact:
            want = ((Atom(EQ, Term(info.counter), Term.const(info.bound)),),)
            if d != want:
                raise NotMonadic(5, f"final condition of exact state {q} must be {info.counter}={info.bound}")
        elif d != TRUE_DNF:
            raise NotMonadic(5, f"final condition of {q} must be unconditional")

    exact = frozenset(q for q, i in counting.items() if i.exact)
    rng = frozenset(q for q, i in counting.items() if not i.exact)
    return McaShape(frozenset(a.states) - exact - rng, exact, rng, counting, owner)


# --------------------------------------------------------------------------
# deterministic CAs


@dataclass(frozen=True)
class DcaTransition:
    src: int
    sym: CharClass
    guard: tuple[Atom, ...]
    assign: tuple[tuple[str, Term], ...]
    dst: int


@dataclass(frozen=True)
class LabelSphere:
    """Opaque control state of a DCA loaded from a file."""

    text: str
    empty: bool = False

    def label(self) -> str:
        return self.text

    def is_empty(self) -> bool:
        return self.empty


@dataclass
class Dca:
    """Deterministic CA whose control states are spheres.

    A configuration is a sphere index plus a parameter valuation.  Missing
    parameters read as 0 and every parameter not assigned by a transition is
    reset to 0.
    """

    spheres: list
    params: tuple[str, ...]
    initial: int
    initial_valuation: dict[str, int]
    transitions: list[DcaTransition]
    final: dict[int, Dnf]
    alphabet_size: int = BYTE_ALPHABET
    method: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def num_states(self) -> int:
        return len(self.spheres)

    @property
    def num_transitions(self) -> int:
        return len(self.transitions)

    @property
    def num_params(self) -> int:
        return len(self.params)

    @cached_property
    def outgoing(self) -> list[list[DcaTransition]]:
        out: list[list[DcaTransition]] = [[] for _ in self.spheres]
        for t in self.transitions:
            out[t.src].append(t)
        return out

    @cached_property
    def _dispatch(self) -> list[dict[int, list[DcaTransition]]]:
        return [dict() for _ in self.spheres]

    def candidates(self, sphere: int, code: int) -> list[DcaTransition]:
        table = self._dispatch[sphere]
        hit = table.get(code)
        if hit is None:
            hit = table[code] = [t for t in self.outgoing[sphere] if code in t.sym]
        return hit

    def initial_config(self) -> tuple[int, tuple[tuple[str, int], ...]]:
        return self.initial, freeze_env(self.initial_valuation)

    def enabled(self, sphere: int, env: Mapping[str, int], code: int) -> list[DcaTransition]:
        return [t for t in self.candidates(sphere, code) if conj_holds(t.guard, env)]

    def step(self, sphere: int, env: Mapping[str, int], code: int, strict: bool = False):
        """Successor configuration, or ``None`` when no transition is enabled."""
        for t in self.candidates(sphere, code):
            if conj_holds(t.guard, env):
                return t.dst, {p: term.value(env) for p, term in t.assign}
        if strict and not self.spheres[sphere].is_empty():
            raise StuckUnexpected(f"no transition from sphere {self.spheres[sphere].label()} on symbol {code}")
        return None

    def is_accepting(self, sphere: int, env: Mapping[str, int]) -> bool:
        d = self.final.get(sphere)
        return bool(d) and dnf_holds(d, env)

    def summary(self) -> str:
        return (f"DCA[{self.method}](states={self.num_states}, transitions={self.num_transitions}, "
                f"params={self.num_params})")


def freeze_env(env: Mapping[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted((p, v) for p, v in env.items() if v != 0))


def run_dca(d: Dca, word: Word, strict: bool = False) -> bool:
    sphere, env = d.initial, dict(d.initial_valuation)
    for code in to_codes(word):
        nxt = d.step(sphere, env, code, strict)
        if nxt is None:
            return False
        sphere, env = nxt
    return d.is_accepting(sphere, env)
