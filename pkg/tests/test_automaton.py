import re

import pytest

from countdet.alphabet import CharClass
from countdet.automaton import (Configuration, CountingAutomaton, Transition, accepts, outcome,
                                validate_mca)
from countdet.errors import BoundViolation, NotMonadic
from countdet.library import nfa, running_example
from countdet.logic import LE, Atom, Term

A = CharClass.symbol(ord("a"))
ANY = CharClass.full()


def cfgs(*pairs):
    return {Configuration.of(q, c=v) for q, v in pairs}


def test_outcome_aab():
    assert outcome(running_example(3), "aab") == cfgs(("q", 0), ("r", 1), ("r", 2))


def test_outcome_empty_word_is_initial():
    a = running_example(2)
    assert outcome(a, "") == a.initial_configurations()


def test_outcome_ba():
    assert outcome(running_example(1), "ba") == cfgs(("q", 0), ("r", 0))


@pytest.mark.parametrize("k,word,expected", [
    (1, "ab", True),
    (1, "bb", False),
    (2, "abab", False),
    (2, "abb", True),
    (3, "aaaa", True),
])
def test_accepts(k, word, expected):
    assert accepts(running_example(k), word) is expected
    assert bool(re.fullmatch(f".*a.{{{k}}}", word, re.S)) is expected


def test_validate_running_example():
    shape = validate_mca(running_example(4))
    assert shape.simple == {"q"}
    assert shape.exact == {"r"}
    info = shape.counting["r"]
    assert info.bound == 4 and info.counter == "c" and not info.exits


def test_counterless_all_simple():
    a = nfa("xy", ["x"], ["y"], [("x", A, "y"), ("y", ANY, "x")])
    shape = validate_mca(a)
    assert shape.simple == {"x", "y"} and not shape.counting


def test_two_increment_loops_rejected():
    c = Term("c")
    inc = {"c": c.shift(1)}
    a = CountingAutomaton(
        states=("q", "r"), counters={"c": 3}, initial=(("q", {"c": 0}),),
        final={"r": ((Atom(LE, c, Term.const(3)),),)},
        transitions=(
            Transition.make("q", A, "r", assign={"c": Term.const(0)}),
            Transition.make("r", A, "r", [Atom(LE, c, Term.const(2))], inc),
            Transition.make("r", ~A, "r", [Atom(LE, c, Term.const(2))], inc),
        ))
    with pytest.raises(NotMonadic) as err:
        validate_mca(a)
    assert err.value.item == 3


def test_bound_violation():
    c = Term("c")
    a = CountingAutomaton(
        states=("q",), counters={"c": 1}, initial=(("q", {"c": 0}),), final={"q": ((),)},
        transitions=(Transition.make("q", ANY, "q", assign={"c": c.shift(1)}),))
    assert accepts(a, "a")
    with pytest.raises(BoundViolation):
        accepts(a, "aa")


def test_rejects_unknown_counter():
    with pytest.raises(ValueError):
        CountingAutomaton(states=("q",), counters={}, initial=(("q", {}),), final={},
                          transitions=(Transition.make("q", ANY, "q", assign={"d": Term.const(0)}),))
