"""Cross-checking machinery: interned steppers, bounded product exploration,
and invariant checks over reachable DCA configurations."""
from __future__ import annotations

import random
from collections import deque
from itertools import product
from typing import Iterable, Optional, Sequence

from .automaton import CountingAutomaton, Dca, Word, freeze_env, to_codes
from .naive import Dfa, global_blocks, normalise
from .solver import distinct, satisfiable

DEAD = -1


class Stepper:
    """Wraps a machine so that each distinct state gets a small integer id
    and transitions are memoised."""

    def __init__(self, name: str):
        self.name = name
        self._ids: dict = {}
        self._states: list = []
        self._memo: dict[tuple[int, int], int] = {}
        self._acc: list[bool] = []
        self.start = DEAD

    def intern(self, state) -> int:
        if state is None:
            return DEAD
        i = self._ids.get(state)
        if i is None:
            i = self._ids[state] = len(self._states)
            self._states.append(state)
            self._acc.append(self._accepting(state))
        return i

    def step(self, i: int, code: int) -> int:
        if i == DEAD:
            return DEAD
        key = (i, code)
        j = self._memo.get(key)
        if j is None:
            j = self._memo[key] = self.intern(self._step(self._states[i], code))
        return j

    def accepting(self, i: int) -> bool:
        return i != DEAD and self._acc[i]

    def state(self, i: int):
        return self._states[i]

    def accepts(self, word: Word) -> bool:
        i = self.start
        for code in to_codes(word):
            i = self.step(i, code)
            if i == DEAD:
                return False
        return self.accepting(i)

    def _step(self, state, code):
        raise NotImplementedError

    def _accepting(self, state) -> bool:
        raise NotImplementedError


class OracleStepper(Stepper):
    """Configuration-set semantics of a CA (dead counters normalised)."""

    def __init__(self, a: CountingAutomaton):
        super().__init__("oracle")
        self.a = a
        self.start = self.intern(frozenset(normalise(a, c) for c in a.initial_configurations()))

    def _step(self, configs, code):
        nxt = frozenset(normalise(self.a, c) for c in self.a.step(configs, code))
        return nxt or None

    def _accepting(self, configs) -> bool:
        return any(self.a.is_final(c) for c in configs)


class DfaStepper(Stepper):
    def __init__(self, d: Dfa, name: str = "dfa"):
        super().__init__(name)
        self.d = d
        self.start = self.intern(d.initial)

    def _step(self, state, code):
        return self.d.step(state, code)

    def _accepting(self, state) -> bool:
        return state in self.d.final


class DcaStepper(Stepper):
    """Configurations ``(sphere, valuation)``; ``strict`` makes a missing
    transition from a non-empty sphere an error."""

    def __init__(self, d: Dca, name: Optional[str] = None, strict: bool = False):
        super().__init__(name or d.method)
        self.d = d
        self.strict = strict
        self.start = self.intern(d.initial_config())

    def _step(self, config, code):
        sphere, env = config
        nxt = self.d.step(sphere, dict(env), code, self.strict)
        if nxt is None:
            return None
        return nxt[0], freeze_env(nxt[1])

    def _accepting(self, config) -> bool:
        sphere, env = config
        return self.d.is_accepting(sphere, dict(env))


def representative_codes(a: CountingAutomaton) -> list[int]:
    """One symbol per minterm of the CA's classes."""
    return [b.first() for b in global_blocks(a).blocks]


def product_disagreement(steppers: Sequence[Stepper], codes: Sequence[int],
                         max_len: int) -> Optional[list[int]]:
    """Shortest word of length ``<= max_len`` over ``codes`` on which the
    steppers disagree, or ``None``.  Explores the product breadth first, so
    every word is covered without enumerating words one by one."""
    start = tuple(s.start for s in steppers)
    parent: dict[tuple, tuple] = {start: None}
    layer = [start]
    for depth in range(max_len + 1):
        nxt = []
        for node in layer:
            verdicts = {s.accepting(i) for s, i in zip(steppers, node)}
            if len(verdicts) > 1:
                word = []
                while parent[node] is not None:
                    node, code = parent[node]
                    word.append(code)
                return word[::-1]
            if depth == max_len:
                continue
            for code in codes:
                succ = tuple(s.step(i, code) for s, i in zip(steppers, node))
                if succ not in parent:
                    parent[succ] = (node, code)
                    nxt.append(succ)
        layer = nxt
    return None


def all_words(codes: Sequence[int], max_len: int) -> Iterable[tuple[int, ...]]:
    for n in range(max_len + 1):
        yield from product(codes, repeat=n)


def random_words(codes: Sequence[int], count: int, max_len: int, seed: int = 0) -> list[list[int]]:
    rng = random.Random(seed)
    return [[rng.choice(codes) for _ in range(rng.randint(0, max_len))] for _ in range(count)]


def word_disagreement(steppers: Sequence[Stepper], words: Iterable[Sequence[int]]):
    """First word on which the steppers disagree, or ``None``."""
    for w in words:
        if len({s.accepts(w) for s in steppers}) > 1:
            return list(w)
    return None


def reachable_configurations(d: Dca, codes: Sequence[int], limit: int = 1_000_000) -> set:
    """All ``(sphere, valuation)`` pairs reachable over ``codes``."""
    start = d.initial_config()
    seen = {start}
    queue = deque([start])
    while queue:
        sphere, env = queue.popleft()
        for code in codes:
            nxt = d.step(sphere, dict(env), code)
            if nxt is None:
                continue
            cfg = (nxt[0], freeze_env(nxt[1]))
            if cfg not in seen:
                if len(seen) >= limit:
                    raise RuntimeError(f"more than {limit} reachable configurations")
                seen.add(cfg)
                queue.append(cfg)
    return seen


def guard_overlaps(d: Dca, domain_max: int, context=None) -> list[tuple[int, int, int]]:
    """Pairs of outgoing transitions of one sphere whose guards can hold at
    once.  ``context(sphere)`` may add atoms known to hold in the sphere."""
    bad = []
    for s, out in enumerate(d.outgoing):
        extra = list(context(s)) if context else []
        for i, t1 in enumerate(out):
            for t2 in out[i + 1:]:
                if t1.sym.isdisjoint(t2.sym):
                    continue
                if satisfiable(extra + list(t1.guard) + list(t2.guard), domain_max):
                    bad.append((s, d.transitions.index(t1), d.transitions.index(t2)))
    return bad


def distinctness_violations(d: Dca, configs: Iterable) -> list:
    """Configurations in which two parameters of the sphere share a value."""
    bad = []
    for sphere, env in configs:
        params = d.spheres[sphere].params()
        values = [dict(env).get(p, 0) for p in params]
        if len(set(values)) != len(values):
            bad.append((sphere, env))
    return bad


def variant_violations(d: Dca, a: CountingAutomaton, configs: Iterable) -> list:
    """Configurations of a monadic DCA breaking sortedness, distinctness or
    boundedness of exact variants, or holding two range variants."""
    from .automaton import validate_mca
    from .monadicdet import variant

    shape = validate_mca(a)
    bad = []
    for sphere, env in configs:
        env = dict(env)
        for q, n in d.spheres[sphere].counts:
            info = shape.counting.get(q)
            if info is None:
                continue
            if not info.exact:
                if n > 1:
                    bad.append((sphere, q, "range variants"))
                continue
            values = [env.get(variant(info.counter, i), 0) for i in range(n)]
            # index 0 is the youngest variant, so values increase with the index
            if any(x >= y for x, y in zip(values, values[1:])):
                bad.append((sphere, q, f"unsorted {values}"))
            if values and max(values) > info.bound:
                bad.append((sphere, q, f"above bound {values}"))
    return bad


def ground_context(d: Dca):
    """Distinctness clique of a general sphere, for :func:`guard_overlaps`."""
    return lambda s: distinct(d.spheres[s].params())

