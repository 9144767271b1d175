"""Arithmetic terms and atomic comparisons over counters or parameters.

A term is ``var + k`` or a constant ``k`` (``var is None``).  Atoms compare two
terms; ordering atoms (``<=``, ``>=``) always have a constant right-hand side.
The same types serve counter guards of a CA and parameter guards of a DCA.
"""
from __future__ import annotations

import re
from typing import Mapping, NamedTuple, Optional, Union

LE, GE, EQ, NE = "<=", ">=", "=", "!="


class Term(NamedTuple):
    var: Optional[str]
    off: int = 0

    def key(self) -> tuple:
        return (self.var is not None, self.var or "", self.off)

    def __lt__(self, other: Term) -> bool:
        return self.key() < other.key()

    @classmethod
    def const(cls, k: int) -> Term:
        return cls(None, k)

    def shift(self, k: int) -> Term:
        return Term(self.var, self.off + k)

    def value(self, env: Mapping[str, int]) -> int:
        if self.var is None:
            return self.off
        return env.get(self.var, 0) + self.off

    def rename(self, mapping: Mapping[str, Term]) -> Term:
        """Substitute ``var`` by a term (``c+1`` with ``c -> p+2`` gives ``p+3``)."""
        if self.var is None or self.var not in mapping:
            return self
        return mapping[self.var].shift(self.off)

    def __str__(self) -> str:
        if self.var is None:
            return str(self.off)
        if self.off == 0:
            return self.var
        return f"{self.var}+{self.off}" if self.off > 0 else f"{self.var}{self.off}"


class Atom(NamedTuple):
    op: str
    lhs: Term
    rhs: Term

    def key(self) -> tuple:
        return (self.op, self.lhs.key(), self.rhs.key())

    def __lt__(self, other: Atom) -> bool:
        return self.key() < other.key()

    def vars(self) -> set[str]:
        return {t.var for t in (self.lhs, self.rhs) if t.var is not None}

    def holds(self, env: Mapping[str, int]) -> bool:
        a, b = self.lhs.value(env), self.rhs.value(env)
        if self.op == LE:
            return a <= b
        if self.op == GE:
            return a >= b
        if self.op == EQ:
            return a == b
        return a != b

    def rename(self, mapping: Mapping[str, Term]) -> Union[Atom, bool]:
        return make_atom(self.op, self.lhs.rename(mapping), self.rhs.rename(mapping))

    def negate(self) -> Union[Atom, bool]:
        if self.op == LE:
            return make_atom(GE, self.lhs, self.rhs.shift(1))
        if self.op == GE:
            return make_atom(LE, self.lhs, self.rhs.shift(-1))
        if self.op == EQ:
            return make_atom(NE, self.lhs, self.rhs)
        return make_atom(EQ, self.lhs, self.rhs)

    def __str__(self) -> str:
        return format_atom(self)


def make_atom(op: str, lhs: Term, rhs: Term) -> Union[Atom, bool]:
    """Build a normalised atom, or a bool when it is decided syntactically.

    Offsets move to the constant side (``c+1 <= 3`` becomes ``c <= 2``) and
    constant-only comparisons are evaluated.  Truth over the naturals is used:
    ``c >= 0`` is ``True``.
    """
    if op in (LE, GE):
        if rhs.var is not None:
            if lhs.var is not None:
                raise ValueError(f"ordering between two variables is unsupported: {lhs} {op} {rhs}")
            lhs, rhs = rhs, lhs
            op = GE if op == LE else LE
        if lhs.var is None:
            return lhs.off <= rhs.off if op == LE else lhs.off >= rhs.off
        k = rhs.off - lhs.off
        if op == LE and k < 0:
            return False
        if op == GE and k <= 0:
            return True
        return Atom(op, Term(lhs.var), Term.const(k))
    if lhs.var is None and rhs.var is None:
        return (lhs.off == rhs.off) == (op == EQ)
    if lhs.var == rhs.var:
        return (lhs.off == rhs.off) == (op == EQ)
    if lhs.var is None or (rhs.var is not None and rhs.var < lhs.var):
        lhs, rhs = rhs, lhs
    # single-variable equality: move offset to the constant side
    if rhs.var is None:
        k = rhs.off - lhs.off
        if k < 0:
            return op == NE
        return Atom(op, Term(lhs.var), Term.const(k))
    # two variables: keep the smaller offset at zero
    m = min(lhs.off, rhs.off)
    return Atom(op, lhs.shift(-m), rhs.shift(-m))


def conj_holds(atoms, env: Mapping[str, int]) -> bool:
    return all(a.holds(env) for a in atoms)


def rename_conj(atoms, mapping: Mapping[str, Term]) -> Optional[tuple[Atom, ...]]:
    """Rename a conjunction; ``None`` when it became false."""
    out = []
    for a in atoms:
        r = a.rename(mapping)
        if r is False:
            return None
        if r is not True:
            out.append(r)
    return tuple(dict.fromkeys(out))


# --------------------------------------------------------------------------
# text syntax: "c<=3", "c<3", "c>2", "c=max", "c=d+1", "c!=d", "p0+1=0"

_NAME = r"[A-Za-z_][A-Za-z0-9_\[\]]*"
_TERM = rf"(?:{_NAME}(?:\s*[+-]\s*\d+)?|\d+|max)"
_ATOM_RE = re.compile(rf"^\s*({_TERM})\s*(<=|>=|!=|==|=|<|>)\s*({_TERM})\s*$")
_TERM_RE = re.compile(rf"^\s*({_NAME}|\d+)\s*(?:([+-])\s*(\d+))?\s*$")


def parse_term(text: str, max_value: Optional[int] = None) -> Term:
    text = text.strip()
    if text == "max":
        if max_value is None:
            raise ValueError("'max' used without a known bound")
        return Term.const(max_value)
    m = _TERM_RE.match(text)
    if not m:
        raise ValueError(f"bad term {text!r}")
    head, sign, num = m.groups()
    off = int(num) if num else 0
    if sign == "-":
        off = -off
    if head.isdigit():
        return Term.const(int(head) + off)
    return Term(head, off)


def parse_atom(text: str, bounds: Optional[Mapping[str, int]] = None) -> Union[Atom, bool]:
    """Parse an atom; ``max`` resolves to the bound of the variable on the
    other side (looked up in ``bounds``)."""
    m = _ATOM_RE.match(text)
    if not m:
        raise ValueError(f"bad atom {text!r}")
    ltxt, op, rtxt = m.groups()
    bounds = bounds or {}

    def bound_for(other: str) -> Optional[int]:
        t = parse_term(other, 0) if other.strip() != "max" else None
        return bounds.get(t.var) if t is not None and t.var is not None else None

    lhs = parse_term(ltxt, bound_for(rtxt) if ltxt.strip() == "max" else None)
    rhs = parse_term(rtxt, bound_for(ltxt) if rtxt.strip() == "max" else None)
    if op == "<":
        return make_atom(LE, lhs, rhs.shift(-1))
    if op == ">":
        return make_atom(GE, lhs, rhs.shift(1))
    if op == "==":
        op = EQ
    return make_atom(op, lhs, rhs)


def format_atom(a: Atom) -> str:
    return f"{a.lhs}{a.op}{a.rhs}"
