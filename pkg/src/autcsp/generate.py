"""Seeded generators: random automata and tables, closed languages, instances.

Every generator takes a ``random.Random`` so that a fixed seed reproduces
its output exactly.
"""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from autcsp.automaton import Automaton, Domain
from autcsp.fixtures import block_language, nae3_star
from autcsp.instance import Constraint, Instance
from autcsp.operations import OperationTable


def random_automaton(
    rng: random.Random,
    domain: Domain,
    max_states: int = 5,
    deterministic: bool | None = None,
    density: float = 0.35,
) -> Automaton:
    """Random automaton with at most ``max_states`` states.

    Deterministic ones are complete; NFAs get each possible transition with
    probability ``density`` and may have one or two initial states.
    """
    n = rng.randint(1, max_states)
    if deterministic is None:
        deterministic = rng.random() < 0.5
    states = [f"q{i}" for i in range(n)]
    edges = []
    if deterministic:
        initial = [0]
        for s in range(n):
            for d in domain:
                edges.append((s, d, rng.randrange(n)))
    else:
        initial = rng.sample(range(n), min(n, rng.randint(1, 2)))
        for s in range(n):
            for d in domain:
                for t in range(n):
                    if rng.random() < density:
                        edges.append((s, d, t))
    accepting = [s for s in range(n) if rng.random() < 0.5]
    return Automaton(domain, states, initial, edges, accepting)


def random_table(rng: random.Random, domain: Domain, arity: int, name: str | None = None) -> OperationTable:
    values = [rng.randrange(domain.size) for _ in range(domain.size**arity)]
    return OperationTable(domain, arity, values, name=name)


def closure(tuples: Sequence[tuple[int, ...]], g: OperationTable) -> set[tuple[int, ...]]:
    """Smallest superset of ``tuples`` closed under ``g`` applied columnwise."""
    out = set(tuples)
    while True:
        new = {g.apply_words(ws) for ws in itertools.product(sorted(out), repeat=g.arity)} - out
        if not new:
            return out
        out |= new


def closed_block_language(
    rng: random.Random, g: OperationTable, block_len: int | None = None, with_prefix: bool | None = None
) -> Automaton:
    """``B*`` or ``p B+`` where ``B`` is a random set of blocks closed under ``g``.

    Such a language has, at each length, a product of copies of ``B`` (after a
    fixed prefix), so ``g`` is a polymorphism whenever it is idempotent on the
    prefix letters.
    """
    domain = g.domain
    if block_len is None:
        block_len = rng.randint(1, 3)
    universe = list(itertools.product(range(domain.size), repeat=block_len))
    seed_blocks = rng.sample(universe, rng.randint(1, min(3, len(universe))))
    blocks = sorted(closure(seed_blocks, g))
    if with_prefix is None:
        with_prefix = rng.random() < 0.3
    prefix = ""
    if with_prefix:
        fixed = [d for d in domain if g(*([d] * g.arity)) == d]
        prefix = domain.symbols[rng.choice(fixed)] if fixed else ""
    names = ["".join(domain.symbols[d] for d in b) for b in blocks]
    if any(len(s) != 1 for s in domain.symbols):
        raise ValueError("block languages need single-character symbols")
    return block_language(names, prefix=prefix, at_least_one=bool(prefix), symbols=domain.symbols)


def linear_language(q: int, coefficients: Sequence[int], target: int) -> Automaton:
    """Words ``w`` over GF(q) with ``sum_i c[i mod p] * w_i = target`` (mod q),
    ``p = len(coefficients)``.  Each slice is a coset, so ``x - y + z`` preserves it."""
    p = len(coefficients)
    domain = Domain.range(q)
    states = [f"p{ph}s{s}" for ph in range(p) for s in range(q)]
    index = {(ph, s): ph * q + s for ph in range(p) for s in range(q)}
    edges = [
        (index[ph, s], d, index[(ph + 1) % p, (s + coefficients[ph] * d) % q])
        for ph in range(p)
        for s in range(q)
        for d in range(q)
    ]
    accepting = [index[ph, target % q] for ph in range(p)]
    return Automaton(domain, states, [index[0, 0]], edges, accepting)


def random_affine_automaton(rng: random.Random, q: int) -> Automaton:
    """A random linear language, possibly intersected with a second one."""

    def one():
        p = rng.randint(1, 3)
        return linear_language(q, [rng.randrange(q) for _ in range(p)], rng.randrange(q))

    a = one()
    if rng.random() < 0.5:
        a = a.intersection(one())
    return a


def nae_reduction(clauses: Sequence[Sequence[str]], variables: Sequence[str] | None = None) -> Instance:
    """A NAE-3 formula as one constraint of arity ``3m`` over ``NAE_3*``."""
    if not clauses:
        raise ValueError("the formula needs at least one clause")
    if any(len(c) != 3 for c in clauses):
        raise ValueError("every clause must have exactly three literals")
    if variables is None:
        variables = sorted({x for c in clauses for x in c})
    scope = [x for c in clauses for x in c]
    return Instance(tuple(variables), nae3_star(), (Constraint(tuple(scope)),))


def random_nae_formula(rng: random.Random, m: int, n_vars: int) -> list[tuple[str, str, str]]:
    if m < 1:
        raise ValueError("the formula needs at least one clause")
    if n_vars < 1:
        raise ValueError("need at least one variable")
    names = [f"x{i}" for i in range(n_vars)]
    return [tuple(rng.choice(names) for _ in range(3)) for _ in range(m)]


def random_instance(
    rng: random.Random,
    automaton: Automaton,
    max_vars: int = 6,
    max_constraints: int = 5,
    max_arity: int = 6,
    domain_prob: float = 0.0,
    closed_under: OperationTable | None = None,
) -> Instance:
    """Random instance; scopes draw variables with replacement so repeats occur.

    With ``domain_prob > 0`` some variables get a random unary domain, closed
    under ``closed_under`` when given.
    """
    n_vars = rng.randint(1, max_vars)
    variables = tuple(f"v{i}" for i in range(n_vars))
    constraints = []
    for _ in range(rng.randint(0, max_constraints)):
        arity = rng.randint(1, max_arity)
        constraints.append(Constraint(tuple(rng.choice(variables) for _ in range(arity))))
    domains = {}
    D = automaton.domain.size
    for x in variables:
        if rng.random() < domain_prob:
            subset = {d for d in range(D) if rng.random() < 0.6} or {rng.randrange(D)}
            if closed_under is not None:
                subset = {t[0] for t in closure([(d,) for d in subset], closed_under)}
            domains[x] = frozenset(subset)
    return Instance(variables, automaton, tuple(constraints), domains)
