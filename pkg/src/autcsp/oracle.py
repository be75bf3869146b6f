"""Brute-force ground truth at desk scale.

Nothing here is clever on purpose: relations are listed tuple by tuple,
instances are solved by scanning every assignment, and polymorphisms are
checked on every tuple of accepted words up to a length bound.
"""

from __future__ import annotations

import itertools
import os

import numpy as np

from autcsp.automaton import Automaton, Word
from autcsp.errors import BudgetExceeded
from autcsp.instance import Assignment, Instance, verify
from autcsp.operations import OperationTable, PolymorphismVerdict

DEFAULT_BUDGET = 10**6


def default_budget() -> int:
    value = os.environ.get("AUTCSP_BUDGET")
    return int(value) if value else DEFAULT_BUDGET


def enumerate_relation(a: Automaton, n: int, budget: int | None = None) -> list[Word]:
    """``L(A) ∩ D^n`` in lexicographic order.

    Depth-first over prefixes, carrying the set of states reached (the
    on-the-fly subset construction); dead prefixes are cut immediately.
    """
    budget = default_budget() if budget is None else budget
    if a.domain.size**n > budget:
        raise BudgetExceeded(f"|D|^{n} = {a.domain.size ** n} exceeds budget {budget}")
    out: list[Word] = []

    def walk(prefix: list[int], states: frozenset[int]):
        if len(prefix) == n:
            if states & a.accepting:
                out.append(tuple(prefix))
            return
        for d in a.domain:
            nxt = a.step(states, d)
            if nxt:
                prefix.append(d)
                walk(prefix, nxt)
                prefix.pop()

    walk([], a.initial)
    return out


def brute_solve(instance: Instance, budget: int | None = None) -> Assignment | None:
    """Lexicographically least satisfying assignment (declaration order), or None."""
    budget = default_budget() if budget is None else budget
    size = instance.domain.size ** len(instance.variables)
    if size > budget:
        raise BudgetExceeded(f"{size} assignments exceed budget {budget}")
    choices = [sorted(instance.allowed(x)) for x in instance.variables]
    for values in itertools.product(*choices):
        phi = dict(zip(instance.variables, values))
        if verify(instance, phi):
            return phi
    return None


def brute_solutions(instance: Instance, budget: int | None = None) -> list[Assignment]:
    budget = default_budget() if budget is None else budget
    size = instance.domain.size ** len(instance.variables)
    if size > budget:
        raise BudgetExceeded(f"{size} assignments exceed budget {budget}")
    out = []
    for values in itertools.product(range(instance.domain.size), repeat=len(instance.variables)):
        phi = dict(zip(instance.variables, values))
        if verify(instance, phi):
            out.append(phi)
    return out


def brute_is_polymorphism(
    a: Automaton, f: OperationTable, max_len: int, budget: int | None = None
) -> PolymorphismVerdict:
    """Check ``f`` on all ``k``-tuples of accepted words of each length ``<= max_len``.

    Tuples are visited in ``itertools.product`` order, shortest length first,
    so the counterexample is the first one that order meets.  The columnwise
    application is vectorized in chunks; nothing is skipped.  Complete only up
    to ``max_len``: a ``holds`` verdict says nothing about longer words.
    """
    budget = default_budget() if budget is None else budget
    if f.domain.size != a.domain.size:
        raise ValueError("operation and automaton have different alphabet sizes")
    q, k = a.domain.size, f.arity
    table = np.array(f.values, dtype=np.int64).reshape((q,) * k)
    for n in range(max_len + 1):
        rel = enumerate_relation(a, n, budget)
        m = len(rel)
        if m == 0 or m == q**n:
            # nothing to test, or every image lands in D^n anyway
            continue
        total = m**k
        if total > budget:
            raise BudgetExceeded(f"{total} word tuples of length {n} exceed budget {budget}")
        words = np.array(rel, dtype=np.int64).reshape(m, n)
        member = np.zeros(q**n, dtype=bool)
        weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
        member[words @ weights] = True
        for lo in range(0, total, _CHUNK):
            picks = np.unravel_index(np.arange(lo, min(total, lo + _CHUNK)), (m,) * k)
            image = table[tuple(words[p] for p in picks)]
            bad = np.flatnonzero(~member[image @ weights])
            if bad.size:
                xs = tuple(rel[p[bad[0]]] for p in picks)
                return PolymorphismVerdict(False, (*xs, tuple(int(v) for v in image[bad[0]])))
    return PolymorphismVerdict(True)


_CHUNK = 1 << 16
