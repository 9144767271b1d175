"""Character classes over a finite alphabet of integer symbol codes.

A class is stored as a canonical tuple of disjoint, non-adjacent inclusive
ranges, so structural equality coincides with set equality.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

BYTE_ALPHABET = 256

Range = tuple[int, int]


def _normalise(ranges: Iterable[Range]) -> tuple[Range, ...]:
    out: list[list[int]] = []
    for lo, hi in sorted(ranges):
        if lo > hi:
            continue
        if out and lo <= out[-1][1] + 1:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


@dataclass(frozen=True)
class CharClass:
    ranges: tuple[Range, ...]
    size: int = BYTE_ALPHABET

    def __post_init__(self):
        if self.ranges and (self.ranges[0][0] < 0 or self.ranges[-1][1] >= self.size):
            raise ValueError(f"range outside alphabet of size {self.size}: {self.ranges}")

    @classmethod
    def of(cls, ranges: Iterable[Range], size: int = BYTE_ALPHABET) -> CharClass:
        return cls(_normalise(ranges), size)

    @classmethod
    def empty(cls, size: int = BYTE_ALPHABET) -> CharClass:
        return cls((), size)

    @classmethod
    def full(cls, size: int = BYTE_ALPHABET) -> CharClass:
        return cls(((0, size - 1),), size)

    @classmethod
    def symbol(cls, code: int, size: int = BYTE_ALPHABET) -> CharClass:
        return cls(((code, code),), size)

    @classmethod
    def chars(cls, text: str, size: int = BYTE_ALPHABET) -> CharClass:
        return cls.of(((ord(ch), ord(ch)) for ch in text), size)

    def _check(self, other: CharClass) -> None:
        if self.size != other.size:
            raise ValueError(f"alphabet size mismatch: {self.size} vs {other.size}")

    def __or__(self, other: CharClass) -> CharClass:
        self._check(other)
        return CharClass(_normalise(self.ranges + other.ranges), self.size)

    def __invert__(self) -> CharClass:
        out = []
        nxt = 0
        for lo, hi in self.ranges:
            if lo > nxt:
                out.append((nxt, lo - 1))
            nxt = hi + 1
        if nxt < self.size:
            out.append((nxt, self.size - 1))
        return CharClass(tuple(out), self.size)

    def __and__(self, other: CharClass) -> CharClass:
        self._check(other)
        out = []
        i = j = 0
        a, b = self.ranges, other.ranges
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return CharClass(tuple(out), self.size)

    def __sub__(self, other: CharClass) -> CharClass:
        return self & ~other

    def __contains__(self, code: int) -> bool:
        k = bisect.bisect_right(self.ranges, (code, self.size)) - 1
        return k >= 0 and self.ranges[k][0] <= code <= self.ranges[k][1]

    def __iter__(self) -> Iterator[int]:
        for lo, hi in self.ranges:
            yield from range(lo, hi + 1)

    def __len__(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.ranges)

    def __bool__(self) -> bool:
        return bool(self.ranges)

    def is_full(self) -> bool:
        return self.ranges == ((0, self.size - 1),)

    def issubset(self, other: CharClass) -> bool:
        return (self - other).ranges == ()

    def isdisjoint(self, other: CharClass) -> bool:
        return not (self & other)

    def first(self) -> int:
        if not self.ranges:
            raise ValueError("empty class has no representative")
        return self.ranges[0][0]

    def __str__(self) -> str:
        return format_class(self)

    def __repr__(self) -> str:
        return f"CharClass({format_class(self)!r})"


def minterms(classes: Iterable[CharClass], size: int = BYTE_ALPHABET) -> list[CharClass]:
    """Split the alphabet into the non-empty atoms of the Boolean algebra
    generated by ``classes``.

    Blocks are refined one class at a time, so the cost is linear in the
    number of output blocks rather than exponential in the number of classes.
    The result is sorted by smallest member.
    """
    classes = list(classes)
    if classes:
        size = classes[0].size
    blocks = [CharClass.full(size)]
    for cls in dict.fromkeys(classes):
        if not cls or cls.is_full():
            continue
        refined = []
        for block in blocks:
            inside = block & cls
            if not inside:
                refined.append(block)
                continue
            outside = block - cls
            refined.append(inside)
            if outside:
                refined.append(outside)
        blocks = refined
    return sorted(blocks, key=lambda b: b.ranges)


class Partition:
    """Lookup table from symbol code to the index of the block containing it."""

    def __init__(self, blocks: Sequence[CharClass]):
        self.blocks = list(blocks)
        pairs = sorted((lo, hi, i) for i, b in enumerate(self.blocks) for lo, hi in b.ranges)
        self._starts = [p[0] for p in pairs]
        self._ends = [p[1] for p in pairs]
        self._ids = [p[2] for p in pairs]

    def __len__(self) -> int:
        return len(self.blocks)

    def index(self, code: int) -> int:
        k = bisect.bisect_right(self._starts, code) - 1
        if k < 0 or code > self._ends[k]:
            raise KeyError(code)
        return self._ids[k]

    def covering(self, cls: CharClass) -> list[int]:
        """Indices of the blocks contained in ``cls`` (blocks refine ``cls``)."""
        return [i for i, b in enumerate(self.blocks) if b & cls]


# --------------------------------------------------------------------------
# text syntax

_SPECIAL_IN_CLASS = set("]\\^-[")
_PREDEFINED = {
    "d": [(ord("0"), ord("9"))],
    "w": [(ord("0"), ord("9")), (ord("A"), ord("Z")), (ord("_"), ord("_")), (ord("a"), ord("z"))],
    "s": [(9, 13), (32, 32)],
}
_SIMPLE_ESCAPES = {"n": 10, "t": 9, "r": 13, "f": 12, "v": 11, "0": 0}


def predefined(letter: str, size: int = BYTE_ALPHABET) -> CharClass:
    """``\\d``, ``\\w``, ``\\s`` and their upper-case complements."""
    base = CharClass.of(((lo, min(hi, size - 1)) for lo, hi in _PREDEFINED[letter.lower()]
                         if lo < size), size)
    return ~base if letter.isupper() else base


def read_escape(text: str, i: int, size: int) -> tuple[CharClass, int]:
    """Parse the escape whose backslash is at ``text[i]``.

    Returns the class it denotes and the index just past it.
    """
    if i + 1 >= len(text):
        raise ValueError(f"dangling backslash at {i}")
    ch = text[i + 1]
    if ch in "dwsDWS":
        return predefined(ch, size), i + 2
    if ch == "x" and text[i + 2:i + 3] == "{":
        end = text.find("}", i + 3)
        if end < 0:
            raise ValueError(f"bad \\x{{}} escape at {i}")
        return _symbol_checked(int(text[i + 3:end], 16), size, i), end + 1
    if ch == "x":
        digits = text[i + 2:i + 4]
        if len(digits) != 2 or any(d not in "0123456789abcdefABCDEF" for d in digits):
            raise ValueError(f"bad \\x escape at {i}")
        code = int(digits, 16)
        return _symbol_checked(code, size, i), i + 4
    if ch in _SIMPLE_ESCAPES:
        return _symbol_checked(_SIMPLE_ESCAPES[ch], size, i), i + 2
    if ch.isalnum():
        raise ValueError(f"unsupported escape \\{ch} at {i}")
    return _symbol_checked(ord(ch), size, i), i + 2


def _symbol_checked(code: int, size: int, pos: int) -> CharClass:
    if code >= size:
        raise ValueError(f"symbol {code} at {pos} outside alphabet of size {size}")
    return CharClass.symbol(code, size)


def read_bracket(text: str, i: int, size: int) -> tuple[CharClass, int]:
    """Parse a bracket expression starting at ``text[i] == '['``."""
    assert text[i] == "["
    j = i + 1
    negate = j < len(text) and text[j] == "^"
    if negate:
        j += 1
    acc = CharClass.empty(size)
    first = True
    while True:
        if j >= len(text):
            raise ValueError(f"unterminated class starting at {i}")
        ch = text[j]
        if ch == "]" and not first:
            j += 1
            break
        first = False
        lo_cls, j = _read_class_atom(text, j, size)
        if (j + 1 < len(text) and text[j] == "-" and text[j + 1] != "]"
                and len(lo_cls) == 1):
            hi_cls, j2 = _read_class_atom(text, j + 1, size)
            if len(hi_cls) != 1:
                raise ValueError(f"bad range end at {j + 1}")
            lo, hi = lo_cls.first(), hi_cls.first()
            if lo > hi:
                raise ValueError(f"reversed range at {j}")
            acc = acc | CharClass.of([(lo, hi)], size)
            j = j2
        else:
            acc = acc | lo_cls
    return (~acc if negate else acc), j


def _read_class_atom(text: str, j: int, size: int) -> tuple[CharClass, int]:
    if text[j] == "\\":
        return read_escape(text, j, size)
    return _symbol_checked(ord(text[j]), size, j), j + 1


def parse_class(text: str, size: int = BYTE_ALPHABET) -> CharClass:
    """Parse a single class written in regex syntax: ``[a-c]``, ``[^x]``,
    ``.``, ``\\d``, or a single (possibly escaped) symbol."""
    if text == ".":
        return CharClass.full(size)
    if text == "[]":
        return CharClass.empty(size)
    if text.startswith("["):
        cls, end = read_bracket(text, 0, size)
    elif text.startswith("\\"):
        cls, end = read_escape(text, 0, size)
    elif text:
        cls, end = _symbol_checked(ord(text[0]), size, 0), 1
    else:
        raise ValueError("empty class text")
    if end != len(text):
        raise ValueError(f"trailing characters in class {text!r}")
    return cls


def _fmt_code(code: int) -> str:
    ch = chr(code)
    if code < 32 or code > 126:
        return f"\\x{code:02x}" if code < 256 else f"\\x{{{code:x}}}"
    if ch in _SPECIAL_IN_CLASS:
        return "\\" + ch
    return ch


def _fmt_ranges(ranges: tuple[Range, ...]) -> str:
    parts = []
    for lo, hi in ranges:
        if lo == hi:
            parts.append(_fmt_code(lo))
        elif hi == lo + 1:
            parts.append(_fmt_code(lo) + _fmt_code(hi))
        else:
            parts.append(f"{_fmt_code(lo)}-{_fmt_code(hi)}")
    return "".join(parts)


def format_class(cls: CharClass) -> str:
    """Canonical text for ``cls``; ``parse_class`` inverts it."""
    if cls.is_full():
        return "."
    if not cls.ranges:
        return "[]"
    comp = ~cls
    if len(comp.ranges) < len(cls.ranges):
        return "[^" + _fmt_ranges(comp.ranges) + "]"
    return "[" + _fmt_ranges(cls.ranges) + "]"
