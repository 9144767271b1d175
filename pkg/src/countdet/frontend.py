"""Regexes with bounded repetition over character classes, and their
compilation to monadic counting automata.

Counting nodes only ever carry a character class; a general ``σ{m,n}`` is
rewritten at parse time into an exact count followed by an up-to count.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .alphabet import BYTE_ALPHABET, CharClass, format_class, read_bracket, read_escape
from .automaton import TRUE_DNF, CountingAutomaton, Transition, Word, to_codes
from .config import DEFAULT_LIMITS, Limits
from .errors import NonMonadicCounting, RegexSyntaxError
from .logic import EQ, LE, Atom, Term


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Cls:
    cls: CharClass


@dataclass(frozen=True)
class Concat:
    left: Node
    right: Node


@dataclass(frozen=True)
class Union:
    left: Node
    right: Node


@dataclass(frozen=True)
class Star:
    inner: Node


@dataclass(frozen=True)
class CountExact:
    cls: CharClass
    n: int


@dataclass(frozen=True)
class CountUpTo:
    cls: CharClass
    n: int


# any of the node classes above
Node = object


def exact(cls: CharClass, n: int) -> Node:
    return Epsilon() if n == 0 else CountExact(cls, n)


def up_to(cls: CharClass, n: int) -> Node:
    return Epsilon() if n == 0 else CountUpTo(cls, n)


def counted(cls: CharClass, lo: int, hi: Optional[int]) -> Node:
    """``cls{lo,hi}`` (``hi=None`` for unbounded) in normal form."""
    if hi is None:
        return Star(Cls(cls)) if lo == 0 else Concat(CountExact(cls, lo), Star(Cls(cls)))
    if lo == 0:
        return up_to(cls, hi)
    if lo == hi:
        return CountExact(cls, lo)
    return Concat(CountExact(cls, lo), CountUpTo(cls, hi - lo))


# --------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str, size: int, limits: Limits):
        self.text = text
        self.pos = 0
        self.size = size
        self.limits = limits

    def error(self, message: str, pos: Optional[int] = None) -> RegexSyntaxError:
        return RegexSyntaxError(message, self.pos if pos is None else pos)

    def peek(self) -> Optional[str]:
        return self.text[self.pos] if self.pos < len(self.text) else None

    def parse(self) -> Node:
        end = len(self.text)
        if self.text.startswith("^"):
            self.pos = 1
        if end > self.pos and self.text.endswith("$") and not self._escaped(end - 1):
            end -= 1
        self.end = end
        node = self.alternation()
        if self.pos != self.end:
            raise self.error(f"unexpected {self.text[self.pos]!r}")
        return node

    def _escaped(self, i: int) -> bool:
        n = 0
        while i - 1 - n >= 0 and self.text[i - 1 - n] == "\\":
            n += 1
        return n % 2 == 1

    def at_end(self) -> bool:
        return self.pos >= self.end

    def alternation(self) -> Node:
        branches = [self.concatenation()]
        while not self.at_end() and self.peek() == "|":
            self.pos += 1
            branches.append(self.concatenation())
        if all(isinstance(b, Cls) for b in branches):
            acc = branches[0].cls
            for b in branches[1:]:
                acc = acc | b.cls
            return Cls(acc)
        node = branches[0]
        for b in branches[1:]:
            node = Union(node, b)
        return node

    def concatenation(self) -> Node:
        node = None
        while not self.at_end() and self.peek() not in "|)":
            item = self.repetition()
            node = item if node is None else Concat(node, item)
        return Epsilon() if node is None else node

    def repetition(self) -> Node:
        start = self.pos
        node = self.atom()
        while not self.at_end():
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                node = Star(node)
            elif ch == "+":
                self.pos += 1
                node = Concat(node, Star(node))
            elif ch == "?":
                self.pos += 1
                node = CountUpTo(node.cls, 1) if isinstance(node, Cls) else Union(Epsilon(), node)
            elif ch == "{":
                bounds = self.quantifier()
                if bounds is None:
                    break
                lo, hi = bounds
                if not isinstance(node, Cls):
                    raise NonMonadicCounting(
                        f"bounded repetition at position {start} applies to a non-class subexpression")
                node = counted(node.cls, lo, hi)
            else:
                break
        return node

    def quantifier(self) -> Optional[tuple[int, Optional[int]]]:
        """Read ``{n}``, ``{n,}`` or ``{n,m}``; a ``{`` that does not start a
        quantifier is left in place and read as a literal."""
        close = self.text.find("}", self.pos)
        if close < 0 or close >= self.end:
            return None
        body = self.text[self.pos + 1:close]
        lo_txt, sep, hi_txt = body.partition(",")
        if not lo_txt.isdigit() or (hi_txt and not hi_txt.isdigit()):
            return None
        lo = int(lo_txt)
        hi = None if sep and not hi_txt else int(hi_txt) if sep else lo
        cap = self.limits.max_bound
        if lo > cap or (hi is not None and hi > cap):
            raise self.error(f"repetition bound exceeds the limit {cap}")
        if hi is not None and hi < lo:
            raise self.error(f"repetition bounds out of order {{{body}}}")
        self.pos = close + 1
        return lo, hi

    def atom(self) -> Node:
        ch = self.peek()
        at = self.pos
        if ch == "(":
            self.pos += 1
            if self.text.startswith("?:", self.pos):
                self.pos += 2
            inner = self.alternation()
            if self.at_end() or self.peek() != ")":
                raise self.error("missing ')'", at)
            self.pos += 1
            return inner
        if ch in "*+?":
            raise self.error(f"nothing to repeat before {ch!r}")
        if ch in "^$":
            raise self.error("anchors are only supported at the ends of the pattern")
        if ch == ")":
            raise self.error("unbalanced ')'")
        try:
            if ch == "[":
                cls, self.pos = read_bracket(self.text, self.pos, self.size)
                return Cls(cls)
            if ch == "\\":
                cls, self.pos = read_escape(self.text, self.pos, self.size)
                return Cls(cls)
        except ValueError as exc:
            raise self.error(str(exc), at) from None
        self.pos += 1
        if ch == ".":
            return Cls(CharClass.full(self.size))
        if ord(ch) >= self.size:
            raise self.error(f"symbol {ch!r} outside alphabet of size {self.size}", at)
        return Cls(CharClass.symbol(ord(ch), self.size))


def parse(pattern: str, alphabet_size: int = BYTE_ALPHABET, limits: Limits = DEFAULT_LIMITS) -> Node:
    return _Parser(pattern, alphabet_size, limits).parse()


def search_pattern(pattern: str) -> str:
    """Wrap ``pattern`` so that whole-word matching finds it as a substring."""
    body = pattern
    if body.startswith("^"):
        body = body[1:]
    if body.endswith("$") and not body.endswith("\\$"):
        body = body[:-1]
    return f".*({body}).*"


# --------------------------------------------------------------------------
# printer and reference matcher


_PREC = {Union: 0, Concat: 1}


def to_pattern(node: Node) -> str:
    """Regex text that :func:`parse` maps back to an equivalent AST."""
    if isinstance(node, Empty):
        return _class_text(CharClass.empty(BYTE_ALPHABET))
    if isinstance(node, Epsilon):
        return "()"
    if isinstance(node, Cls):
        return _class_text(node.cls)
    if isinstance(node, CountExact):
        return f"{_class_text(node.cls)}{{{node.n}}}"
    if isinstance(node, CountUpTo):
        return f"{_class_text(node.cls)}{{0,{node.n}}}"
    if isinstance(node, Star):
        inner = to_pattern(node.inner)
        if not isinstance(node.inner, Cls):
            inner = f"({inner})"
        return inner + "*"
    if isinstance(node, Union):
        return f"{to_pattern(node.left)}|{to_pattern(node.right)}"
    if isinstance(node, Concat):
        parts = []
        for side in (node.left, node.right):
            text = to_pattern(side)
            parts.append(f"({text})" if isinstance(side, Union) else text)
        return "".join(parts)
    raise TypeError(node)


def _class_text(cls: CharClass) -> str:
    if not cls:
        # a negated full range, since "[]" is not a complete bracket expression
        return "[^" + format_class(~cls)[1:] if not (~cls).is_full() else \
            f"[^\\x00-\\x{{{cls.size - 1:x}}}]"
    if len(cls) == 1:
        code = cls.first()
        ch = chr(code)
        if 32 < code < 127 and ch.isalnum():
            return ch
    return format_class(cls)


def matches(node: Node, word: Word) -> bool:
    """Whole-word membership by direct recursion on the AST.

    Independent of the automaton construction; intended as a test oracle for
    short words.
    """
    codes = tuple(to_codes(word))

    @lru_cache(maxsize=None)
    def ends(n: Node, i: int) -> frozenset[int]:
        if isinstance(n, Empty):
            return frozenset()
        if isinstance(n, Epsilon):
            return frozenset({i})
        if isinstance(n, Cls):
            return frozenset({i + 1}) if i < len(codes) and codes[i] in n.cls else frozenset()
        if isinstance(n, CountExact) or isinstance(n, CountUpTo):
            out = set()
            lo = n.n if isinstance(n, CountExact) else 0
            j = i
            if lo == 0:
                out.add(i)
            for step in range(1, n.n + 1):
                if j >= len(codes) or codes[j] not in n.cls:
                    break
                j += 1
                if step >= lo:
                    out.add(j)
            return frozenset(out)
        if isinstance(n, Concat):
            return frozenset(k for j in ends(n.left, i) for k in ends(n.right, j))
        if isinstance(n, Union):
            return ends(n.left, i) | ends(n.right, i)
        if isinstance(n, Star):
            seen = {i}
            frontier = [i]
            while frontier:
                j = frontier.pop()
                for k in ends(n.inner, j):
                    if k not in seen:
                        seen.add(k)
                        frontier.append(k)
            return frozenset(seen)
        raise TypeError(n)

    return len(codes) in ends(node, 0)


# --------------------------------------------------------------------------
# compilation
#
# Items are class positions (which read their symbol on arrival) and counting
# nodes (entered without reading, with the counter reset).  No counting node
# may directly follow another counting item; such nodes are unrolled by one
# symbol first.  Every edge into a class position x is then also copied, with
# a reset, into the counting nodes that follow x.


class _Info:
    __slots__ = ("nullable", "first", "last")

    def __init__(self, nullable: bool, first: frozenset, last: frozenset):
        self.nullable, self.first, self.last = nullable, first, last


def _analyse(root: Node):
    """Index leaves of ``root`` and compute first/last/follow over them."""
    leaves: list[Node] = []
    follow: dict[int, set[int]] = defaultdict(set)
    owner: dict[int, tuple] = {}

    def walk(n: Node, path: tuple) -> _Info:
        if isinstance(n, Empty):
            return _Info(False, frozenset(), frozenset())
        if isinstance(n, Epsilon):
            return _Info(True, frozenset(), frozenset())
        if isinstance(n, (Cls, CountExact, CountUpTo)):
            leaves.append(n)
            i = len(leaves) - 1
            owner[i] = path
            return _Info(False, frozenset({i}), frozenset({i}))
        if isinstance(n, Concat):
            a, b = walk(n.left, path + (0,)), walk(n.right, path + (1,))
            for x in a.last:
                follow[x] |= b.first
            return _Info(a.nullable and b.nullable,
                         a.first | b.first if a.nullable else a.first,
                         a.last | b.last if b.nullable else b.last)
        if isinstance(n, Union):
            a, b = walk(n.left, path + (0,)), walk(n.right, path + (1,))
            return _Info(a.nullable or b.nullable, a.first | b.first, a.last | b.last)
        if isinstance(n, Star):
            a = walk(n.inner, path + (0,))
            for x in a.last:
                follow[x] |= a.first
            return _Info(True, a.first, a.last)
        raise TypeError(n)

    info = walk(root, ())
    return leaves, owner, follow, info


def _replace(node: Node, path: tuple, new: Node) -> Node:
    if not path:
        return new
    head, rest = path[0], path[1:]
    if isinstance(node, Star):
        return Star(_replace(node.inner, rest, new))
    if isinstance(node, Concat):
        return Concat(_replace(node.left, rest, new), node.right) if head == 0 else \
            Concat(node.left, _replace(node.right, rest, new))
    if isinstance(node, Union):
        return Union(_replace(node.left, rest, new), node.right) if head == 0 else \
            Union(node.left, _replace(node.right, rest, new))
    raise TypeError(node)


def _unroll(n: Node) -> Node:
    if isinstance(n, CountExact):
        return Concat(Cls(n.cls), exact(n.cls, n.n - 1))
    return Union(Epsilon(), Concat(Cls(n.cls), up_to(n.cls, n.n - 1)))


def separate_counters(root: Node) -> Node:
    """Unroll counting nodes that can directly follow another counting node."""
    while True:
        leaves, owner, follow, _ = _analyse(root)
        counting = {i for i, leaf in enumerate(leaves) if not isinstance(leaf, Cls)}
        bad = sorted({y for x in counting for y in follow[x] if y in counting})
        if not bad:
            return root
        # deepest paths first so earlier replacements do not shift later ones
        for i in sorted(bad, key=lambda i: owner[i], reverse=True):
            root = _replace(root, owner[i], _unroll(leaves[i]))


def compile_regex(node: Node, alphabet_size: int = BYTE_ALPHABET) -> CountingAutomaton:
    """Compile a parsed regex to a monadic CA."""
    root = separate_counters(node)
    leaves, _, follow, info = _analyse(root)
    counting = {i for i, leaf in enumerate(leaves) if not isinstance(leaf, Cls)}
    INIT = -1
    counter = {i: f"c{i}" for i in counting}

    def exit_guard(x: int) -> tuple[Atom, ...]:
        if x in counting and isinstance(leaves[x], CountExact):
            return (Atom(EQ, Term(counter[x]), Term.const(leaves[x].n)),)
        return ()

    raw: list[tuple[int, CharClass, tuple, dict, int]] = []
    initial = {INIT}
    edges_in: dict[int, list[tuple[int, tuple]]] = defaultdict(list)
    succ = {INIT: info.first, **{x: frozenset(follow[x]) for x in range(len(leaves))}}
    for x, ys in succ.items():
        for y in ys:
            if y in counting:
                if x == INIT:
                    initial.add(y)
                continue
            raw.append((x, leaves[y].cls, exit_guard(x), {}, y))
            edges_in[y].append((x, exit_guard(x)))
    for x in range(len(leaves)):
        if x in counting:
            continue
        for k in follow[x]:
            if k in counting:
                for w, guard in edges_in[x]:
                    raw.append((w, leaves[x].cls, guard, {counter[k]: Term.const(0)}, k))
    for k in counting:
        n = leaves[k].n
        raw.append((k, leaves[k].cls, (Atom(LE, Term(counter[k]), Term.const(n - 1)),),
                    {counter[k]: Term(counter[k], 1)}, k))

    final: dict[int, tuple] = {}
    if info.nullable:
        final[INIT] = TRUE_DNF
    for x in info.last:
        if x in counting and isinstance(leaves[x], CountExact):
            final[x] = ((Atom(EQ, Term(counter[x]), Term.const(leaves[x].n)),),)
        else:
            final[x] = TRUE_DNF
    return _finish(raw, initial, final, counting, counter, {k: leaves[k].n for k in counting},
                   alphabet_size)


def _finish(raw, initial, final, counting, counter, bounds, size) -> CountingAutomaton:
    # trim to accessible and co-accessible items
    fwd, bwd = defaultdict(set), defaultdict(set)
    for src, _, _, _, dst in raw:
        fwd[src].add(dst)
        bwd[dst].add(src)
    acc = _closure(initial, fwd)
    coacc = _closure(set(final), bwd)
    keep = acc & coacc
    raw = [r for r in raw if r[0] in keep and r[4] in keep]
    initial = {x for x in initial if x in keep}
    final = {x: d for x, d in final.items() if x in keep}

    # merge bisimilar simple items (counting items keep their own counters)
    items = sorted(keep)
    block = {x: (x if x in counting else ("s", x in final)) for x in items}
    while True:
        sig = {}
        for x in items:
            if x in counting:
                sig[x] = ("k", x)
                continue
            outs = frozenset((cls, g, tuple(sorted(a.items())), block[d])
                             for s, cls, g, a, d in raw if s == x)
            sig[x] = (block[x], outs)
        ids: dict = {}
        new = {x: ids.setdefault(sig[x], len(ids)) for x in items}
        if len(set(new.values())) == len(set(block.values())):
            break
        block = new
    rep = {}
    for x in items:
        rep.setdefault(new[x], x)
    canon = {x: rep[new[x]] for x in items}

    # name states in breadth-first order from the initial items
    order: list[int] = []
    seen = set()
    queue = sorted({canon[x] for x in initial})
    merged: dict[tuple, CharClass] = {}
    for s, cls, g, a, d in raw:
        key = (canon[s], g, tuple(sorted(a.items())), canon[d])
        merged[key] = merged[key] | cls if key in merged else cls
    out_of = defaultdict(list)
    for key in merged:
        out_of[key[0]].append(key[3])
    while queue:
        x = queue.pop(0)
        if x in seen:
            continue
        seen.add(x)
        order.append(x)
        queue.extend(sorted(set(out_of[x]) - seen))
    name = {x: f"q{i}" for i, x in enumerate(order)}
    ctr = {counter[x]: f"c_{name[x]}" for x in order if x in counting}

    def ren_atom(a: Atom) -> Atom:
        return Atom(a.op, Term(ctr[a.lhs.var], a.lhs.off), a.rhs)

    transitions = []
    for (s, g, a, d), cls in sorted(merged.items(), key=lambda kv: (order.index(kv[0][0]),
                                                                     order.index(kv[0][3]),
                                                                     kv[1].ranges, str(kv[0]))):
        assign = {ctr[c]: (Term(ctr[t.var], t.off) if t.var else t) for c, t in a}
        transitions.append(Transition.make(name[s], cls, name[d], [ren_atom(x) for x in g], assign))
    counters = {ctr[counter[x]]: bounds[x] for x in order if x in counting}
    init = []
    for x in sorted({canon[x] for x in initial}, key=order.index):
        init.append((name[x], {c: 0 for c in counters}))
    fin = {}
    for x, d in final.items():
        fin[name[canon[x]]] = tuple(tuple(ren_atom(a) for a in conj) for conj in d)
    return CountingAutomaton(tuple(name[x] for x in order), counters, tuple(init), fin,
                             tuple(transitions), size)


def _closure(start, edges) -> set:
    seen = set(start)
    stack = list(start)
    while stack:
        x = stack.pop()
        for y in edges[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def compile_pattern(pattern: str, alphabet_size: int = BYTE_ALPHABET, search: bool = False,
                    limits: Limits = DEFAULT_LIMITS) -> CountingAutomaton:
    if search:
        pattern = search_pattern(pattern)
    return compile_regex(parse(pattern, alphabet_size, limits), alphabet_size)
