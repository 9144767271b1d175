import random
import re
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from countdet.alphabet import CharClass, parse_class
from countdet.automaton import accepts, validate_mca
from countdet.errors import NonMonadicCounting, RegexSyntaxError
from countdet.frontend import (Cls, Concat, CountExact, CountUpTo, Epsilon, Star, compile_pattern,
                               matches, parse, search_pattern, to_pattern)
from countdet.library import random_monadic_pattern

ANY = CharClass.full()


def words(letters, max_len):
    for n in range(max_len + 1):
        for w in product(letters, repeat=n):
            yield "".join(w)


def test_parse_running_example():
    assert parse(".*a.{2}") == Concat(Concat(Star(Cls(ANY)), Cls(parse_class("[a]"))), CountExact(ANY, 2))


def test_parse_range_rewrite():
    g = parse_class("[D-G]")
    assert parse("[D-G]{43,53}") == Concat(CountExact(g, 43), CountUpTo(g, 10))


def test_parse_sugar():
    a = parse_class("[a]")
    assert parse("a?") == CountUpTo(a, 1)
    assert parse("a{3,}") == Concat(CountExact(a, 3), Star(Cls(a)))
    assert parse("a{0}") == Epsilon()


def test_non_class_counting():
    with pytest.raises(NonMonadicCounting):
        parse("(ab){3}")


def test_syntax_error_position():
    with pytest.raises(RegexSyntaxError) as err:
        parse("a(b")
    assert err.value.pos == 1


def test_unclosed_brace_is_literal():
    assert accepts(compile_pattern("a{2"), "a{2")


def test_compile_running_example_shape():
    a = compile_pattern(".*a.{3}")
    assert len(a.states) == 2 and len(a.transitions) == 3
    shape = validate_mca(a)
    (info,) = shape.counting.values()
    assert info.exact and info.bound == 3


def test_compile_epsilon():
    a = compile_pattern("")
    assert len(a.states) == 1 and not a.transitions
    assert accepts(a, "") and not accepts(a, "a")


def test_range_state():
    a = compile_pattern("a{0,2}b")
    shape = validate_mca(a)
    (info,) = shape.counting.values()
    assert not info.exact and info.bound == 2
    got = {w for w in words("ab", 3) if accepts(a, w)}
    assert got == {"b", "ab", "aab"}


def test_search_wrap():
    assert search_pattern("^ab$") == ".*(ab).*"
    a = compile_pattern("ab", search=True)
    assert accepts(a, "xxabyy") and not accepts(a, "ba")


def test_printer_round_trip():
    rng = random.Random(3)
    for _ in range(200):
        text = to_pattern(parse(random_monadic_pattern(rng)))
        # associativity may change on the first print, after that it is stable
        assert to_pattern(parse(text)) == text


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_three_way_agreement(seed):
    pattern = random_monadic_pattern(random.Random(seed), depth=4, max_bound=3)
    node = parse(pattern)
    a = compile_pattern(pattern)
    validate_mca(a)
    py = re.compile(pattern, re.S)
    for w in words("abc", 5):
        expected = py.fullmatch(w) is not None
        assert matches(node, w) == expected, (pattern, w)
        assert accepts(a, w) == expected, (pattern, w)
