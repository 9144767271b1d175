"""Satisfiability of conjunctions of parameter atoms over a bounded domain.

Every variable ranges over ``[0, domain_max]``; terms ``p + k`` may exceed it.
Equalities are handled by union-find with additive offsets, bounds by interval
propagation on class representatives, and disequalities by a small search over
the classes whose domains are too narrow to satisfy them greedily.
"""
from __future__ import annotations

from typing import Iterable, Optional

from .logic import EQ, GE, LE, NE, Atom, Term

_ZERO = "#zero"


class _OffsetUnionFind:
    def __init__(self):
        self.parent: dict[str, str] = {}
        self.off: dict[str, int] = {}  # value(x) = value(parent[x]) + off[x]

    def add(self, x: str) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.off[x] = 0

    def find(self, x: str) -> tuple[str, int]:
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        total = 0
        for y in reversed(path):
            total += self.off[y]
            self.off[y] = total
            self.parent[y] = x
        return x, (self.off[path[0]] if path else 0)

    def union(self, x: str, ox: int, y: str, oy: int) -> bool:
        """Record ``x + ox = y + oy``; False on an offset conflict."""
        rx, dx = self.find(x)
        ry, dy = self.find(y)
        # value(rx) + dx + ox = value(ry) + dy + oy
        if rx == ry:
            return dx + ox == dy + oy
        if ry == _ZERO:
            rx, ry, dx, dy, ox, oy = ry, rx, dy, dx, oy, ox
        self.parent[ry] = rx
        self.off[ry] = dx + ox - dy - oy
        return True


def _node(t: Term) -> tuple[str, int]:
    return (_ZERO, t.off) if t.var is None else (t.var, t.off)


def solve(atoms: Iterable[Atom], domain_max: int, variables: Iterable[str] = ()) -> Optional[dict[str, int]]:
    """A model of the conjunction, or ``None`` when it is unsatisfiable."""
    atoms = list(atoms)
    uf = _OffsetUnionFind()
    uf.add(_ZERO)
    names = set(variables)
    for a in atoms:
        names |= a.vars()
    for v in names:
        uf.add(v)
    for a in atoms:
        if a.op == EQ:
            (x, ox), (y, oy) = _node(a.lhs), _node(a.rhs)
            if not uf.union(x, ox, y, oy):
                return None

    lo: dict[str, int] = {}
    hi: dict[str, int] = {}
    zero_root, zero_off = uf.find(_ZERO)

    def narrow(r: str, l: int, h: int) -> None:
        lo[r] = max(lo.get(r, l), l)
        hi[r] = min(hi.get(r, h), h)

    narrow(zero_root, -zero_off, -zero_off)
    for v in names:
        r, o = uf.find(v)
        narrow(r, -o, domain_max - o)
    for a in atoms:
        if a.op in (LE, GE):
            r, o = uf.find(a.lhs.var)
            k = a.rhs.off - a.lhs.off - o
            if a.op == LE:
                narrow(r, lo.get(r, k), k)
            else:
                narrow(r, k, hi.get(r, k))
    for r in lo:
        if lo[r] > hi[r]:
            return None

    # disequalities between class representatives: value(r1) - value(r2) != d
    diseq: list[tuple[str, str, int]] = []
    for a in atoms:
        if a.op != NE:
            continue
        (x, ox), (y, oy) = _node(a.lhs), _node(a.rhs)
        rx, dx = uf.find(x)
        ry, dy = uf.find(y)
        d = dy + oy - dx - ox
        if rx == ry:
            if d == 0:
                return None
            continue
        diseq.append((rx, ry, d))

    roots = sorted(lo)
    adj: dict[str, list[tuple[str, int]]] = {r: [] for r in roots}
    for r1, r2, d in diseq:
        adj[r1].append((r2, d))
        adj[r2].append((r1, -d))

    # peel classes whose domain outnumbers their remaining disequalities
    degree = {r: len(adj[r]) for r in roots}
    removed: list[str] = []
    gone = set()
    stack = [r for r in roots if hi[r] - lo[r] + 1 > degree[r]]
    while stack:
        r = stack.pop()
        if r in gone:
            continue
        gone.add(r)
        removed.append(r)
        for s, _ in adj[r]:
            if s not in gone:
                degree[s] -= 1
                if hi[s] - lo[s] + 1 > degree[s]:
                    stack.append(s)
    tight = [r for r in roots if r not in gone]
    tight.sort(key=lambda r: hi[r] - lo[r])
    value: dict[str, int] = {}

    def allowed(r: str, v: int) -> bool:
        return all(value[s] != v - d for s, d in adj[r] if s in value)

    def search(i: int) -> bool:
        if i == len(tight):
            return True
        r = tight[i]
        for v in range(lo[r], hi[r] + 1):
            if allowed(r, v):
                value[r] = v
                if search(i + 1):
                    return True
                del value[r]
        return False

    if not search(0):
        return None
    for r in reversed(removed):
        v = lo[r]
        while not allowed(r, v):
            v += 1
        value[r] = v
    model = {}
    for v in names:
        r, o = uf.find(v)
        model[v] = value[r] + o
    return model


_CACHE: dict = {}
_CACHE_LIMIT = 1 << 18


def satisfiable(atoms: Iterable[Atom], domain_max: int) -> bool:
    key = (frozenset(atoms), domain_max)
    hit = _CACHE.get(key)
    if hit is None:
        if len(_CACHE) >= _CACHE_LIMIT:
            _CACHE.clear()
        hit = _CACHE[key] = solve(key[0], domain_max) is not None
    return hit


def distinct(params: Iterable[str]) -> list[Atom]:
    """Pairwise disequalities between the given parameters."""
    ps = sorted(params)
    return [Atom(NE, Term(a), Term(b)) for i, a in enumerate(ps) for b in ps[i + 1:]]
