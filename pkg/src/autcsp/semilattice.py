"""Boolean instances whose automatic language is closed under AND (or OR).

Tuples of an AND-closed relation are ordered by ``r <= r'`` iff
``r & r' == r``; every extendable pattern has a unique least extension,
which the solver drives towards a global fixpoint.
"""

from __future__ import annotations

import logging
from typing import Mapping

from autcsp.automaton import Automaton, Word
from autcsp.errors import DomainMismatch, NotPolymorphism
from autcsp.instance import Assignment, Constraint, Instance, extend_pattern, verify
from autcsp.operations import is_polymorphism, schaefer_op

log = logging.getLogger(__name__)


def _meet(u: Word, v: Word) -> Word:
    return tuple(x & y for x, y in zip(u, v))


def minimal_extension(a: Automaton, n: int, pattern: Mapping[int, int]) -> Word | None:
    """Least word of ``R_n`` agreeing with ``pattern``, or None if there is none.

    Starts from any extension and sweeps positions left to right: where the
    current word has a free 1, try pinning a 0 there and meet with the result.
    Needs AND to be a polymorphism of the language.
    """
    current = extend_pattern(a, n, pattern)
    if current is None:
        return None
    for i in range(n):
        if i in pattern or current[i] == 0:
            continue
        lower = extend_pattern(a, n, {**pattern, i: 0})
        if lower is not None:
            current = _meet(current, lower)
    return current


def minimal_constraint_extension(
    a: Automaton, constraint: Constraint, pattern: Mapping[int, int]
) -> tuple[Word, Assignment] | None:
    """Least tuple of the constraint's relation that extends ``pattern`` and gives
    equal values to repeated variables, together with the induced assignment."""
    scope = constraint.scope
    pattern = dict(pattern)
    while True:
        r = minimal_extension(a, len(scope), pattern)
        if r is None:
            return None
        phi: dict[str, int] = {}
        conflict = None
        for v, value in zip(scope, r):
            if phi.setdefault(v, value) != value:
                conflict = v
                break
        if conflict is None:
            return r, phi
        # the least tuple already has a 1 at some occurrence, so every
        # consistent extension has v = 1
        for i in constraint.positions(conflict):
            if pattern.get(i, 1) == 0:
                return None
            pattern[i] = 1


def _check(instance: Instance, name: str):
    verdict = is_polymorphism(instance.automaton, schaefer_op(name, instance.domain))
    if not verdict.holds:
        raise NotPolymorphism(name, verdict)


def solve_and(instance: Instance, check: bool = True) -> Assignment | None:
    """Decide an instance over an AND-closed automaton; return a solution or None.

    Every constraint contributes its least consistent tuple under the current
    pins.  Where two constraints disagree on a variable, the one saying 1 is a
    lower bound for every solution, so the variable is pinned to 1 everywhere.
    """
    if instance.domain.size != 2:
        raise DomainMismatch("the AND solver needs a Boolean alphabet")
    if check:
        _check(instance, "and")
    a = instance.automaton
    pins: dict[str, int] = {}
    for x in instance.variables:
        allowed = instance.allowed(x)
        if not allowed:
            return None
        if len(allowed) == 1:
            (pins[x],) = allowed
    rounds = 0
    while True:
        rounds += 1
        phi: dict[str, set[int]] = {}
        for c in instance.constraints:
            pattern = {i: pins[v] for i, v in enumerate(c.scope) if v in pins}
            found = minimal_constraint_extension(a, c, pattern)
            if found is None:
                log.debug("constraint %s unsatisfiable after %d rounds", c.scope, rounds)
                return None
            for v, value in found[1].items():
                phi.setdefault(v, set()).add(value)
        conflict = next((x for x in instance.variables if len(phi.get(x, ())) > 1), None)
        if conflict is None:
            break
        if pins.get(conflict) == 0:
            return None
        pins[conflict] = 1
    solution = {}
    for x in instance.variables:
        if x in phi:
            (solution[x],) = phi[x]
        else:
            solution[x] = pins.get(x, min(instance.allowed(x)))
    if not verify(instance, solution):  # pragma: no cover - guarded by the theory
        raise AssertionError("AND solver produced an assignment that does not verify")
    return solution


def _dual(instance: Instance) -> Instance:
    swap = (1, 0)
    return Instance(
        instance.variables,
        instance.automaton.relabel(swap),
        instance.constraints,
        {x: frozenset(1 - d for d in p) for x, p in instance.domains.items()},
    )


def solve_or(instance: Instance, check: bool = True) -> Assignment | None:
    """OR-closed case by swapping the two symbols and running the AND solver."""
    if instance.domain.size != 2:
        raise DomainMismatch("the OR solver needs a Boolean alphabet")
    if check:
        _check(instance, "or")
    solution = solve_and(_dual(instance), check=False)
    if solution is None:
        return None
    return {x: 1 - d for x, d in solution.items()}
