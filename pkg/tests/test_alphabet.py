import pytest
from hypothesis import given, strategies as st

from countdet.alphabet import CharClass, Partition, format_class, minterms, parse_class

SIZE = 16


@st.composite
def classes(draw, size=SIZE):
    members = draw(st.sets(st.integers(0, size - 1)))
    return CharClass.of(((c, c) for c in members), size)


def members(c):
    return set(c)


def test_union_examples():
    assert parse_class("[a-c]") | parse_class("[b-e]") == parse_class("[a-e]")
    assert parse_class("[ac]") | parse_class("[b]") == parse_class("[a-c]")
    x = parse_class("[x-z0]")
    assert x | CharClass.empty() == x


def test_intersect_complement_examples():
    assert parse_class("[a-e]") & parse_class("[c-g]") == parse_class("[c-e]")
    x = parse_class("[^q-t]")
    assert ~~x == x
    assert not (x & ~x)


def test_minterm_examples():
    assert minterms([]) == [CharClass.full()]
    assert set(minterms([parse_class("[a]")])) == {parse_class("[a]"), parse_class("[^a]")}
    got = set(minterms([parse_class("[ab]"), parse_class("[bc]")]))
    assert got == {parse_class(t) for t in ("[a]", "[b]", "[c]", "[^a-c]")}


def test_format_round_trip():
    for text in ("[a]", "[^a]", ".", "[a-c]", "[D-G]", "[^D-H]", "[^a-c]"):
        assert format_class(parse_class(text)) == text


def test_partition_index():
    p = Partition(minterms([parse_class("[ab]"), parse_class("[bc]")]))
    assert len(p) == 4
    assert p.index(ord("a")) != p.index(ord("b"))
    assert p.index(ord("x")) == p.index(ord("y"))


def test_bad_class():
    with pytest.raises(ValueError):
        parse_class("[a-")


@given(classes(), classes())
def test_boolean_laws(x, y):
    assert members(x | y) == members(x) | members(y)
    assert members(x & y) == members(x) & members(y)
    assert ~(x | y) == ~x & ~y
    assert ~(x & y) == ~x | ~y
    assert members(~x) == set(range(SIZE)) - members(x)


@given(st.lists(classes(), max_size=5))
def test_minterms_partition(cs):
    ms = minterms(cs, SIZE)
    assert len(ms) <= min(2 ** len(cs), SIZE)
    seen = set()
    for m in ms:
        assert m
        assert not (members(m) & seen)
        seen |= members(m)
    assert seen == set(range(SIZE))
    for c in cs:
        assert members(c) == set().union(*(members(m) for m in ms if m.issubset(c)))
