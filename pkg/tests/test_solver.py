from itertools import product

from hypothesis import given, settings, strategies as st

from countdet.logic import EQ, GE, LE, NE, Atom, Term, format_atom, make_atom, parse_atom, rename_conj
from countdet.solver import distinct, satisfiable, solve

PARAMS = ("p0", "p1", "p2", "p3")


def P(text):
    return parse_atom(text, {})


def brute(atoms, dm):
    names = sorted({v for a in atoms for v in a.vars()})
    for vals in product(range(dm + 1), repeat=len(names)):
        env = dict(zip(names, vals))
        if all(a.holds(env) for a in atoms):
            return True
    return False


def test_offset_conflict():
    assert not satisfiable([Atom(EQ, Term("p0"), Term("p0", 1))], 4)


def test_offset_chain_out_of_domain():
    assert not satisfiable([P("p0+1=p1"), P("p1<=1"), P("p0>=1")], 1)


def test_disequality_witness():
    atoms = [P("p0!=p1"), P("p0<=1"), P("p1<=1")]
    env = solve(atoms, 1)
    assert env is not None and all(a.holds(env) for a in atoms)


def test_pigeonhole():
    # three distinct values do not fit in {0, 1}
    assert not satisfiable(distinct(["p0", "p1", "p2"]), 1)
    assert satisfiable(distinct(["p0", "p1", "p2"]), 2)


def test_make_atom_normalises():
    assert make_atom(LE, Term("c", 1), Term.const(3)) == Atom(LE, Term("c"), Term.const(2))
    assert make_atom(GE, Term("c"), Term.const(0)) is True
    assert make_atom(LE, Term("c", 2), Term.const(1)) is False
    assert make_atom(EQ, Term("p1", 2), Term("p0", 1)) == Atom(EQ, Term("p0"), Term("p1", 1))


def test_parse_atom_forms():
    assert format_atom(P("c<3")) == "c<=2"
    assert format_atom(P("c>2")) == "c>=3"
    assert format_atom(parse_atom("c=max", {"c": 7})) == "c=7"
    assert P("p0+1=0") is False


def test_rename_conj():
    guard = (P("c<=0"),)
    assert rename_conj(guard, {"c": Term("p0", 1)}) is None
    assert rename_conj(guard, {"c": Term.const(0)}) == ()


@st.composite
def atoms(draw, dm):
    op = draw(st.sampled_from([LE, GE, EQ, NE]))
    x = draw(st.sampled_from(PARAMS))
    if op in (LE, GE) or draw(st.booleans()):
        rhs = Term.const(draw(st.integers(0, dm + 1)))
    else:
        rhs = Term(draw(st.sampled_from(PARAMS)), draw(st.integers(-2, 2)))
    a = make_atom(op, Term(x, draw(st.integers(0, 2))), rhs)
    return a


@settings(max_examples=400, deadline=None)
@given(st.integers(0, 4).flatmap(lambda dm: st.tuples(st.just(dm), st.lists(atoms(dm), max_size=6))))
def test_agrees_with_brute_force(case):
    dm, raw = case
    if any(a is False for a in raw):
        return
    conj = [a for a in raw if a is not True]
    assert satisfiable(conj, dm) == brute(conj, dm)
    env = solve(conj, dm)
    if env is not None:
        assert all(0 <= v <= dm for v in env.values())
        assert all(a.holds(env) for a in conj)
