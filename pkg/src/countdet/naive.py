"""Baseline determinisation: unfold counters into control states, run the
subset construction, and minimise.

All machines here work on the minterm blocks of the CA's symbol classes.  DFAs
are partial: a missing transition goes to an implicit rejecting sink that is
never counted.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .alphabet import CharClass, Partition, minterms
from .automaton import (CountingAutomaton, Configuration, Dca, DcaTransition, LabelSphere, Word,
                        to_codes)
from .config import DEFAULT_LIMITS, Limits
from .errors import StateBudgetExceeded


@dataclass
class Nfa:
    states: list[Configuration]
    blocks: Partition
    delta: list[dict[int, frozenset[int]]]
    initial: frozenset[int]
    final: frozenset[int]

    def accepts(self, word: Word) -> bool:
        cur = set(self.initial)
        for code in to_codes(word):
            b = self.blocks.index(code)
            cur = {y for x in cur for y in self.delta[x].get(b, ())}
            if not cur:
                return False
        return bool(cur & self.final)


@dataclass
class Dfa:
    blocks: Partition
    delta: list[dict[int, int]]
    initial: Optional[int]
    final: frozenset[int]
    macrostates: list = field(default_factory=list)

    @property
    def num_states(self) -> int:
        return len(self.delta)

    @property
    def num_transitions(self) -> int:
        return sum(len(row) for row in self.delta)

    def step(self, state: int, code: int) -> Optional[int]:
        return self.delta[state].get(self.blocks.index(code))

    def accepts(self, word: Word) -> bool:
        state = self.initial
        for code in to_codes(word):
            if state is None:
                return False
            state = self.step(state, code)
        return state is not None and state in self.final

    def to_dca(self, method: str = "dfa") -> Dca:
        """View as a parameterless DCA, merging blocks that share a target."""
        size = self.blocks.blocks[0].size
        spheres = [LabelSphere(self._label(i)) for i in range(self.num_states)]
        transitions = []
        for src, row in enumerate(self.delta):
            by_dst: dict[int, CharClass] = {}
            for b, dst in row.items():
                by_dst[dst] = by_dst[dst] | self.blocks.blocks[b] if dst in by_dst else self.blocks.blocks[b]
            for dst in sorted(by_dst):
                transitions.append(DcaTransition(src, by_dst[dst], (), (), dst))
        if self.initial is None:
            spheres.append(LabelSphere("{}", empty=True))
            initial = len(spheres) - 1
        else:
            initial = self.initial
        return Dca(spheres, (), initial, {}, transitions, {i: ((),) for i in sorted(self.final)},
                   size, method)

    def _label(self, i: int) -> str:
        if i < len(self.macrostates):
            return "{" + ", ".join(str(c) for c in self.macrostates[i]) + "}"
        return f"d{i}"


def global_blocks(a: CountingAutomaton) -> Partition:
    return Partition(minterms([t.sym for t in a.transitions], a.alphabet_size))


def normalise(a: CountingAutomaton, cfg: Configuration) -> Configuration:
    """Set counters that are dead at the configuration's state to 0."""
    live = a.live[cfg.state]
    return Configuration(cfg.state, tuple((c, v if c in live else 0) for c, v in cfg.counters))


def unfold(a: CountingAutomaton, limits: Limits = DEFAULT_LIMITS) -> Nfa:
    """NFA over reachable (state, valuation) pairs; dead counters read 0."""
    blocks = global_blocks(a)
    covering = {t: blocks.covering(t.sym) for t in a.transitions}
    index: dict[Configuration, int] = {}
    states: list[Configuration] = []
    delta: list[dict[int, set[int]]] = []

    def intern(cfg: Configuration) -> int:
        cfg = normalise(a, cfg)
        i = index.get(cfg)
        if i is None:
            if len(states) >= limits.max_states:
                raise StateBudgetExceeded(f"unfolding exceeds {limits.max_states} states")
            i = index[cfg] = len(states)
            states.append(cfg)
            delta.append({})
            queue.append(i)
        return i

    queue: deque[int] = deque()
    initial = frozenset(intern(c) for c in a.initial_configurations())
    while queue:
        i = queue.popleft()
        if i % 4096 == 0:
            limits.check_time()
        cfg = states[i]
        for t in a.outgoing[cfg.state]:
            succ = _fire(a, t, cfg)
            if succ is None:
                continue
            j = intern(succ)
            for b in covering[t]:
                delta[i].setdefault(b, set()).add(j)
    final = frozenset(i for i, c in enumerate(states) if a.is_final(c))
    return Nfa(states, blocks, [{b: frozenset(s) for b, s in row.items()} for row in delta], initial, final)


def _fire(a: CountingAutomaton, t, cfg: Configuration) -> Optional[Configuration]:
    env = cfg.env
    if not all(g.holds(env) for g in t.guard):
        return None
    new = dict(env)
    for c, term in t.assign:
        new[c] = term.value(env)
    return Configuration(t.dst, tuple(sorted(new.items())))


def subset(n: Nfa, limits: Limits = DEFAULT_LIMITS) -> Dfa:
    """Reachable-subset DFA; the empty macrostate is left implicit."""
    index: dict[frozenset[int], int] = {}
    macro: list[frozenset[int]] = []
    delta: list[dict[int, int]] = []
    nblocks = len(n.blocks)

    def intern(m: frozenset[int]) -> int:
        i = index.get(m)
        if i is None:
            if len(macro) >= limits.max_states:
                raise StateBudgetExceeded(f"subset construction exceeds {limits.max_states} states")
            i = index[m] = len(macro)
            macro.append(m)
            delta.append({})
        return i

    if not n.initial:
        return Dfa(n.blocks, [], None, frozenset())
    intern(n.initial)
    i = 0
    while i < len(macro):
        if i % 4096 == 0:
            limits.check_time()
        m = macro[i]
        rows = [n.delta[x] for x in m]
        for b in range(nblocks):
            succ = set()
            for row in rows:
                s = row.get(b)
                if s:
                    succ |= s
            if succ:
                delta[i][b] = intern(frozenset(succ))
        i += 1
    final = frozenset(i for i, m in enumerate(macro) if m & n.final)
    dfa = Dfa(n.blocks, delta, 0, final)
    dfa.macrostates = [sorted(n.states[x] for x in m) for m in macro]
    return dfa


def minimise(d: Dfa, limits: Limits = DEFAULT_LIMITS) -> Dfa:
    """Minimal partial DFA by Hopcroft's partition refinement.

    The partial DFA is completed with a sink; the class of the sink (all
    states with an empty residual language) is dropped from the result.
    """
    nblocks = len(d.blocks)
    if d.initial is None:
        return Dfa(d.blocks, [], None, frozenset())
    # drop states that cannot reach a final state, then complete with a sink
    n = d.num_states
    preds: list[list[int]] = [[] for _ in range(n)]
    for s, row in enumerate(d.delta):
        for t in row.values():
            preds[t].append(s)
    live = set(d.final)
    stack = list(live)
    while stack:
        t = stack.pop()
        for s in preds[t]:
            if s not in live:
                live.add(s)
                stack.append(s)
    if d.initial not in live:
        return Dfa(d.blocks, [], None, frozenset())
    sink = n
    total = n + 1

    def succ(s: int, b: int) -> int:
        if s == sink:
            return sink
        t = d.delta[s].get(b, sink)
        return t if t in live else sink

    # inverse transitions per block
    inv: list[list[list[int]]] = [[[] for _ in range(total)] for _ in range(nblocks)]
    for s in range(total):
        if s != sink and s not in live:
            continue
        for b in range(nblocks):
            inv[b][succ(s, b)].append(s)
    states = [s for s in range(total) if s == sink or s in live]
    finals = [s for s in states if s in d.final]
    rest = [s for s in states if s not in d.final]
    part: list[set[int]] = [set(finals)] + ([set(rest)] if rest else [])
    where = {}
    for i, blk in enumerate(part):
        for s in blk:
            where[s] = i
    first = min(range(len(part)), key=lambda i: len(part[i]))
    work = {(first, b) for b in range(nblocks)}
    rounds = 0
    while work:
        rounds += 1
        if rounds % 4096 == 0:
            limits.check_time()
        p, b = work.pop()
        touched: dict[int, list[int]] = {}
        for t in part[p]:
            for s in inv[b][t]:
                touched.setdefault(where[s], []).append(s)
        for q, movers in touched.items():
            if len(movers) == len(part[q]):
                continue
            moved = set(movers)
            part[q] -= moved
            new = len(part)
            part.append(moved)
            for s in moved:
                where[s] = new
            small = new if len(moved) <= len(part[q]) else q
            for c in range(nblocks):
                if (q, c) in work:
                    work.add((new, c))
                else:
                    work.add((small, c))
    sink_class = where[sink]
    order: dict[int, int] = {}
    queue = deque([where[d.initial]])
    order[where[d.initial]] = 0
    rep = {i: next(iter(blk)) for i, blk in enumerate(part) if blk}
    delta: list[dict[int, int]] = []
    while queue:
        c = queue.popleft()
        row = {}
        for b in range(nblocks):
            t = where[succ(rep[c], b)]
            if t == sink_class:
                continue
            if t not in order:
                order[t] = len(order)
                queue.append(t)
            row[b] = order[t]
        delta.append(row)
    final = frozenset(order[c] for c in order if rep[c] in d.final)
    return Dfa(d.blocks, delta, 0, final)


def determinise(a: CountingAutomaton, minimal: bool = False, limits: Limits = DEFAULT_LIMITS) -> Dfa:
    d = subset(unfold(a, limits), limits)
    return minimise(d, limits) if minimal else d
