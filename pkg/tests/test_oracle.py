import pytest

from autcsp.automaton import Growth, build_automaton
from autcsp.errors import BudgetExceeded
from autcsp.fixtures import fixture
from autcsp.instance import Instance, parse_instance
from autcsp.operations import schaefer_op
from autcsp.oracle import brute_is_polymorphism, brute_solve, enumerate_relation

from suites import BOOL, neq, random_automata


def fmt(words):
    return [BOOL.format(w) for w in words]


def test_enumerate_nae_3():
    assert fmt(enumerate_relation(fixture("nae"), 3)) == ["001", "010", "011", "100", "101", "110"]


def test_enumerate_odd_2():
    assert fmt(enumerate_relation(fixture("odd"), 2)) == ["01", "10"]


def test_enumerate_length_zero():
    assert enumerate_relation(fixture("odd"), 0) == []
    eps = build_automaton("01", ["q"], ["q"], ["q"], [])
    assert enumerate_relation(eps, 0) == [()]


def test_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_relation(fixture("odd"), 10, budget=100)


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("AUTCSP_BUDGET", "4")
    with pytest.raises(BudgetExceeded):
        enumerate_relation(fixture("odd"), 3)


def test_brute_solve_triangle():
    inst = parse_instance("vars x y z\nconstraint x y\nconstraint y z\nconstraint z x\n", neq())
    assert brute_solve(inst) is None


def test_brute_solve_chain():
    inst = parse_instance("vars x y z\nconstraint x y\nconstraint y z\nconstraint x y z\n", fixture("odd"))
    assert brute_solve(inst) == {"x": 0, "y": 1, "z": 0}


def test_brute_solve_no_constraints():
    assert brute_solve(Instance(("a", "b"), fixture("nae"))) == {"a": 0, "b": 0}


def test_brute_poly_maj():
    assert brute_is_polymorphism(fixture("maj"), schaefer_op("maj"), 6).holds


def test_brute_poly_maj_and():
    v = brute_is_polymorphism(fixture("maj"), schaefer_op("and"), 6)
    assert [BOOL.format(w) for w in v.counterexample] == ["001", "010", "000"]


def test_brute_poly_empty_language():
    empty = build_automaton("01", ["q"], ["q"], [], [])
    assert brute_is_polymorphism(empty, schaefer_op("minor"), 6).holds


def test_cardinalities_follow_growth():
    for a in random_automata()[:60]:
        sizes = [len(enumerate_relation(a, n)) for n in range(7)]
        assert sizes == [a.count_words(n) for n in range(7)]
        if a.growth() is Growth.EXPONENTIAL:
            assert max(sizes) >= 2
