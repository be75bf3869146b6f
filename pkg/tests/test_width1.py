import itertools

import pytest

from autcsp.automaton import build_automaton
from autcsp.errors import NotPolymorphism
from autcsp.fixtures import fixture
from autcsp.instance import Constraint, Instance, parse_instance, verify
from autcsp.operations import schaefer_op
from autcsp.oracle import brute_solutions, brute_solve
from autcsp.semilattice import solve_and
from autcsp.width1 import (
    is_one_minimal,
    one_minimize,
    project_with_domains,
    solve_semilattice_general,
    solve_width1,
)

from suites import AND, MIN3, and_closed_population, closed_automata, instances, neq, random_automata

NAE = fixture("nae")
TRIANGLE = "vars x y z\nconstraint x y\nconstraint y z\nconstraint z x\n"


def horn_language():
    """The word 1 together with every length-3 word except 110 (clause ~x | ~y | z)."""
    words = ["".join(w) for w in itertools.product("01", repeat=3) if "".join(w) != "110"]
    states, edges = ["s", "f"], [("s", "1", "f")]
    for w in words:
        prev = "s"
        for i, ch in enumerate(w[:-1]):
            node = w[: i + 1] + "_"
            if node not in states:
                states.append(node)
                edges.append((prev, ch, node))
            prev = node
        edges.append((prev, w[-1], "f"))
    return build_automaton("01", states, ["s"], ["f"], edges)


class TestProjection:
    def test_nae_box(self):
        doms = {"a": frozenset({0}), "b": frozenset({0}), "c": frozenset({0, 1})}
        assert project_with_domains(NAE, Constraint(("a", "b", "c")), doms, 2) == {1}

    def test_position_out_of_range(self):
        with pytest.raises(IndexError):
            project_with_domains(NAE, Constraint(("a",)), {"a": frozenset({0})}, 3)

    def test_superset_of_exact_projection(self):
        for a in random_automata()[:40]:
            D = frozenset(range(a.domain.size))
            for scope in (("x", "x"), ("x", "y", "x"), ("x", "y", "z", "y")):
                c = Constraint(scope)
                inst = Instance(tuple(sorted(set(scope))), a, (c,))
                sols = brute_solutions(inst)
                for i, x in enumerate(scope):
                    exact = {s[x] for s in sols}
                    assert exact <= project_with_domains(a, c, {v: D for v in scope}, i)


class TestOneMinimize:
    def test_triangle_trivial_fixpoint(self):
        inst = parse_instance(TRIANGLE, NAE)
        m = one_minimize(inst)
        assert not m.refuted and all(p == {0, 1} for p in m.domains.values())
        assert brute_solve(inst) is None

    def test_horn_propagation(self):
        inst = parse_instance("vars x y z\nconstraint x\nconstraint y\nconstraint x y z\n", horn_language())
        m = one_minimize(inst)
        assert m.domains == {"x": {1}, "y": {1}, "z": {1}}
        assert [x for x, _, _ in m.trace] == ["x", "y", "z"]

    def test_empty_relation_refutes(self):
        inst = parse_instance("vars x y\nconstraint x y y\n", neq())
        assert one_minimize(inst).refuted and not solve_width1(inst)

    def test_fixpoint_and_monotone_trace(self):
        for inst in instances(random_automata(), 120, seed=21, max_vars=4, domain_prob=0.2):
            m = one_minimize(inst)
            for x, old, new in m.trace:
                assert new < old
            if not m.refuted:
                assert is_one_minimal(inst, m.domains)
            for sol in brute_solutions(inst):
                assert all(sol[x] in m.domains[x] for x in inst.variables)
            assert m.to_instance().domains == m.domains

    def test_refutation_is_sound(self):
        for inst in instances(random_automata(), 150, seed=22, max_vars=4):
            if not solve_width1(inst):
                assert brute_solve(inst) is None

    def test_decides_width1_languages(self):
        # semilattice-closed languages have width 1
        pop = and_closed_population() + closed_automata(MIN3, 8)
        for inst in instances(pop, 150, seed=23, max_vars=4, domain_prob=0.2):
            assert solve_width1(inst) == (brute_solve(inst) is not None)


class TestSemilatticeGeneral:
    def test_matches_boolean_solver(self):
        for inst in instances(and_closed_population(), 80, seed=24):
            assert solve_semilattice_general(inst, AND) == solve_and(inst)

    def test_min_on_three_elements(self):
        for inst in instances(closed_automata(MIN3, 8), 100, seed=25, max_vars=4, domain_prob=0.3):
            phi = solve_semilattice_general(inst, MIN3)
            truth = brute_solve(inst)
            assert phi == truth
            if phi is not None:
                assert verify(inst, phi)

    def test_rejects_non_semilattice(self):
        inst = parse_instance(TRIANGLE, NAE)
        with pytest.raises(ValueError, match="semilattice"):
            solve_semilattice_general(inst, schaefer_op("maj"))

    def test_rejects_non_polymorphism(self):
        with pytest.raises(NotPolymorphism):
            solve_semilattice_general(parse_instance(TRIANGLE, NAE), AND)
