"""1-minimality for automatic instances, width-1 decisions, semilattice solutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping

from autcsp.automaton import Automaton
from autcsp.errors import NotPolymorphism
from autcsp.instance import Assignment, Constraint, Instance, extend_set_pattern, verify
from autcsp.operations import OperationTable, is_polymorphism


def project_with_domains(
    a: Automaton, constraint: Constraint, domains: Mapping[str, frozenset[int]], i: int
) -> frozenset[int]:
    """Values ``d`` in the domain of position ``i`` that some tuple of the relation,
    boxed by the current domains, carries at ``i``.

    Positions are boxed independently, so a repeated variable is not forced to
    take one value across its occurrences; the result can only be larger than
    the exact projection, never smaller.
    """
    if not 0 <= i < constraint.arity:
        raise IndexError(f"position {i} outside the scope")
    box = [domains[v] for v in constraint.scope]
    out = set()
    for d in sorted(box[i]):
        box[i] = (d,)
        if extend_set_pattern(a, box) is not None:
            out.add(d)
    return frozenset(out)


@dataclass
class MinimizedInstance:
    base: Instance
    domains: dict[str, frozenset[int]]
    trace: list[tuple[str, frozenset[int], frozenset[int]]] = field(default_factory=list)

    @property
    def refuted(self) -> bool:
        return any(not p for p in self.domains.values())

    def to_instance(self) -> Instance:
        return self.base.with_domains(self.domains)


def one_minimize(instance: Instance) -> MinimizedInstance:
    """Shrink every variable's domain to the projections of its constraints until stable.

    Round-robin over constraints in order, positions left to right.  Each
    shrink removes at least one value, so there are at most ``|V| * |D|`` of them.
    """
    a = instance.automaton
    domains = {x: instance.allowed(x) for x in instance.variables}
    result = MinimizedInstance(instance, domains)
    changed = True
    while changed:
        changed = False
        for c in instance.constraints:
            for i, x in enumerate(c.scope):
                new = project_with_domains(a, c, domains, i)
                if new < domains[x]:
                    result.trace.append((x, domains[x], new))
                    domains[x] = new
                    changed = True
    return result


def is_one_minimal(instance: Instance, domains: Mapping[str, frozenset[int]]) -> bool:
    a = instance.automaton
    return all(
        project_with_domains(a, c, domains, i) == domains[x]
        for c in instance.constraints
        for i, x in enumerate(c.scope)
    )


def solve_width1(instance: Instance) -> bool:
    """Satisfiability, assuming the language has width 1: false iff 1-minimality refutes.

    Without the width-1 promise a true answer may be wrong.
    """
    return not one_minimize(instance).refuted


def solve_semilattice_general(
    instance: Instance, meet: OperationTable, check: bool = True
) -> Assignment | None:
    """Solve when a semilattice operation is a polymorphism: 1-minimize, then give
    every variable the meet of its remaining domain."""
    if meet.domain != instance.domain:
        raise ValueError("meet table is over a different alphabet")
    if not meet.is_semilattice():
        raise ValueError("table is not a semilattice operation (idempotent, commutative, associative)")
    for x, p in instance.domains.items():
        if not meet.preserves(p):
            raise ValueError(f"domain constraint on {x!r} is not closed under the meet")
    if check:
        verdict = is_polymorphism(instance.automaton, meet)
        if not verdict.holds:
            raise NotPolymorphism(meet.name or "meet", verdict)
    minimized = one_minimize(instance)
    if minimized.refuted:
        return None
    solution = {x: reduce(meet, sorted(p)) for x, p in minimized.domains.items()}
    if not verify(instance, solution):  # pragma: no cover - guarded by the theory
        raise AssertionError("semilattice extraction produced an assignment that does not verify")
    return solution
