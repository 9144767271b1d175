import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from countdet.automaton import accepts, run_dca
from countdet.frontend import compile_pattern
from countdet.generaldet import determinise
from countdet.library import INDUSTRIAL_PATTERN, random_monadic_pattern, running_example
from countdet.monadicdet import determinise_monadic
from countdet.naive import determinise as naive_determinise
from countdet.serialize import ca_from_dict, dumps, loads, to_dot


def test_ca_schema_keys():
    data = json.loads(dumps(running_example(2)))
    assert set(data) == {"alphabetSize", "states", "counters", "initial", "final", "transitions"}
    assert data["counters"] == [{"name": "c", "max": 2}]
    assert data["transitions"][2] == {"src": "r", "symClass": ".", "guard": ["c<=1"],
                                      "assign": {"c": "c+1"}, "dst": "r"}


def test_max_is_expanded():
    data = json.loads(dumps(running_example(3)))
    data["final"] = [{"state": "r", "guard": [["c=max"]]}]
    a = ca_from_dict(data)
    assert accepts(a, "abbb") and not accepts(a, "abb")


@pytest.mark.parametrize("make", [
    lambda: running_example(2),
    lambda: compile_pattern(INDUSTRIAL_PATTERN),
    lambda: compile_pattern("a{0,2}b"),
])
def test_ca_round_trip(make):
    text = dumps(make())
    assert dumps(loads(text)) == text


@pytest.mark.parametrize("build", [determinise_monadic, determinise,
                                   lambda a: naive_determinise(a, minimal=True).to_dca("dfa-min")])
def test_dca_round_trip_keeps_language(build):
    a = running_example(2)
    d = build(a)
    text = dumps(d)
    e = loads(text)
    assert dumps(e) == text
    rng = random.Random(0)
    for _ in range(300):
        w = "".join(rng.choice("ab") for _ in range(rng.randint(0, 9)))
        assert run_dca(e, w) == run_dca(d, w) == accepts(a, w)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_round_trips(seed):
    a = compile_pattern(random_monadic_pattern(random.Random(seed)))
    text = dumps(a)
    assert dumps(loads(text)) == text
    d = determinise_monadic(a)
    text = dumps(d)
    assert dumps(loads(text)) == text


def test_dot_uses_sphere_labels():
    dot = to_dot(determinise_monadic(running_example(1)))
    assert dot.startswith("digraph")
    assert '"{q↦1, r↦2}\\nc[1]=1"' in dot
    assert "[a], c[1]=1 / c[0]'=0, c[1]'=c[0]+1" in dot


def test_dot_for_ca():
    dot = to_dot(running_example(1))
    assert '"r" [label="r\\nc=1", shape=doublecircle]' in dot
    assert 'start -> "q" [label="c=0"]' in dot
