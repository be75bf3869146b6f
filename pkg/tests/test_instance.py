import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from autcsp.errors import ParseError
from autcsp.fixtures import fixture
from autcsp.generate import nae_reduction, random_automaton
from autcsp.instance import Constraint, Instance, extend_pattern, extend_set_pattern, parse_instance, verify
from autcsp.oracle import brute_solutions, enumerate_relation

from suites import BOOL, TERNARY

NAE = fixture("nae")
ODD = fixture("odd")
TRIANGLE = "vars x y z\nconstraint x y\nconstraint y z\nconstraint z x\n"
CHAIN = "vars x y z\nconstraint x y\nconstraint y z\nconstraint x y z\n"


class TestParse:
    def test_triangle(self):
        inst = parse_instance(TRIANGLE, NAE)
        assert len(inst.constraints) == 3 and inst.size == 6

    def test_undeclared_variable(self):
        with pytest.raises(ParseError, match="line 2: undeclared variable 'w'"):
            parse_instance("vars x\nconstraint x w\n", NAE)

    def test_empty_scope(self):
        with pytest.raises(ParseError, match="empty scope"):
            parse_instance("vars x\nconstraint\n", NAE)

    def test_domain_outside_alphabet(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_instance("vars x\ndomain x 0 2\n", NAE)

    def test_domain_lines_intersect(self):
        inst = parse_instance("vars x\ndomain x 0 1\ndomain x 1\n", NAE)
        assert inst.allowed("x") == {1}

    def test_single_constraint_reduction_keeps_repetitions(self):
        inst = nae_reduction([("a", "b", "c"), ("a", "a", "d")])
        text = inst.to_text()
        parsed = parse_instance(text, inst.automaton)
        assert parsed.constraints[0].scope == ("a", "b", "c", "a", "a", "d")
        assert parsed.constraints[0].arity == 6

    def test_round_trip_size(self):
        inst = parse_instance(CHAIN + "domain y 1\n", ODD)
        again = parse_instance(inst.to_text(), ODD)
        assert again == inst and again.size == inst.size == 7

    def test_constraint_needs_scope(self):
        with pytest.raises(ValueError):
            Constraint(())


class TestPatterns:
    def test_nae_pattern(self):
        assert extend_pattern(NAE, 3, {0: 0, 1: 0}) == BOOL.word("001")

    def test_odd_pattern_none(self):
        assert extend_pattern(ODD, 2, {0: 1, 1: 1}) is None

    def test_full_pattern_is_membership(self):
        for w in itertools.product((0, 1), repeat=4):
            got = extend_pattern(NAE, 4, dict(enumerate(w)))
            assert (got == w) == NAE.accepts(w) and (got is None) == (not NAE.accepts(w))

    def test_set_pattern(self):
        assert extend_set_pattern(NAE, [{0}, {0}, {0, 1}]) == BOOL.word("001")
        assert extend_set_pattern(NAE, [{0}, set(), {0, 1}]) is None
        assert extend_set_pattern(ODD, [{0, 1}] * 5) == ODD.word_of_length(5)

    @settings(max_examples=80, derandomize=True, deadline=None)
    @given(st.integers(0, 10**6), st.booleans(), st.integers(0, 8), st.data())
    def test_patterns_match_enumeration(self, seed, ternary, n, data):
        domain = TERNARY if ternary else BOOL
        a = random_automaton(random.Random(seed), domain, 5)
        if ternary:
            n = min(n, 7)
        rel = enumerate_relation(a, n)
        positions = data.draw(st.sets(st.integers(0, max(0, n - 1)), max_size=n)) if n else set()
        pattern = {i: data.draw(st.integers(0, domain.size - 1)) for i in sorted(positions)}
        want = [r for r in rel if all(r[i] == v for i, v in pattern.items())]
        got = extend_pattern(a, n, pattern)
        assert (got is None) == (not want)
        if got is not None:
            assert got == min(want)
        boxes = [
            data.draw(st.frozensets(st.integers(0, domain.size - 1))) for _ in range(n)
        ]
        want = [r for r in rel if all(r[i] in boxes[i] for i in range(n))]
        got = extend_set_pattern(a, boxes)
        assert (got is None) == (not want)
        if got is not None:
            assert got in want


class TestVerify:
    def test_triangle_assignment_fails(self):
        inst = parse_instance(TRIANGLE, NAE)
        assert not verify(inst, {"x": 0, "y": 1, "z": 0})

    def test_no_constraints(self):
        inst = Instance(("x", "y"), NAE)
        assert verify(inst, {"x": 1, "y": 0})

    def test_odd_chain(self):
        inst = parse_instance(CHAIN, ODD)
        assert verify(inst, {"x": 0, "y": 1, "z": 0})

    def test_domains_are_checked(self):
        inst = parse_instance(CHAIN + "domain y 0\n", ODD)
        assert not verify(inst, {"x": 0, "y": 1, "z": 0})

    def test_agrees_with_relation_membership(self):
        rng = random.Random(3)
        for _ in range(30):
            a = random_automaton(rng, BOOL, 4)
            scopes = [tuple(rng.choice("xyz") for _ in range(rng.randint(1, 4))) for _ in range(3)]
            inst = Instance(("x", "y", "z"), a, scopes)
            rels = {n: set(enumerate_relation(a, n)) for n in range(1, 5)}
            expected = [
                dict(zip("xyz", v))
                for v in itertools.product((0, 1), repeat=3)
                if all(tuple(dict(zip("xyz", v))[s] for s in sc) in rels[len(sc)] for sc in scopes)
            ]
            assert brute_solutions(inst) == expected
