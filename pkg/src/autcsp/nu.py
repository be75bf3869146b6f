"""Near-unanimity polymorphisms: decomposition into low-arity networks.

With a majority polymorphism every ``R_n`` is the conjunction of its binary
projections, so an instance becomes a binary network that path consistency
decides.  A ``k``-ary near-unanimity operation gives the same with
``(k-1)``-ary projections, decided by ``(k-1, k)``-consistency followed by
greedy extension.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from autcsp.automaton import Automaton
from autcsp.errors import NotPolymorphism
from autcsp.instance import Assignment, Instance, extend_pattern, verify
from autcsp.operations import OperationTable, is_polymorphism

Pair = tuple[int, int]


class NetworkInconsistent(RuntimeError):
    """A locally consistent network failed to extend; the closure precondition was violated."""


def kary_projection(a: Automaton, n: int, positions: Sequence[int]) -> frozenset[tuple[int, ...]]:
    """``π_positions R_n``: one pattern search per candidate value tuple."""
    positions = tuple(positions)
    if len(set(positions)) != len(positions) or any(not 0 <= p < n for p in positions):
        raise IndexError(f"positions {positions} invalid for arity {n}")
    out = set()
    for values in itertools.product(range(a.domain.size), repeat=len(positions)):
        if extend_pattern(a, n, dict(zip(positions, values))) is not None:
            out.add(values)
    return frozenset(out)


def binary_projection(a: Automaton, n: int, i: int, j: int) -> frozenset[Pair]:
    """``π_{i,j} R_n`` for 0-based positions ``i < j``."""
    if not 0 <= i < j < n:
        raise IndexError(f"need 0 <= i < j < {n}, got {i}, {j}")
    return kary_projection(a, n, (i, j))


def _check_closed(instance: Instance, g: OperationTable, check: bool):
    if g.domain != instance.domain:
        raise ValueError("operation table is over a different alphabet")
    for x, p in instance.domains.items():
        if not g.preserves(p):
            raise ValueError(f"domain constraint on {x!r} is not closed under {g.name or 'g'}")
    if check:
        verdict = is_polymorphism(instance.automaton, g)
        if not verdict.holds:
            raise NotPolymorphism(g.name or "g", verdict)


# -- majority: binary networks ------------------------------------------------


@dataclass
class BinaryNetwork:
    """Binary relations ``P[x, y]`` for every ordered pair, including ``x == y``.

    ``P[x, x]`` lies on the diagonal and plays the role of ``x``'s domain;
    ``P[y, x]`` is always the transpose of ``P[x, y]``.
    """

    variables: tuple[str, ...]
    domain_size: int
    relations: dict[tuple[str, str], set[Pair]] = field(default_factory=dict)

    @classmethod
    def full(cls, variables: Sequence[str], domain_size: int) -> "BinaryNetwork":
        D = range(domain_size)
        net = cls(tuple(variables), domain_size)
        for x in variables:
            for y in variables:
                if x == y:
                    net.relations[x, y] = {(d, d) for d in D}
                else:
                    net.relations[x, y] = set(itertools.product(D, D))
        return net

    def restrict(self, x: str, y: str, allowed: Iterable[Pair]):
        allowed = set(allowed)
        if x == y:
            allowed = {(d, e) for d, e in allowed if d == e}
        self.relations[x, y] &= allowed
        if x != y:
            self.relations[y, x] &= {(e, d) for d, e in allowed}

    def is_empty(self) -> bool:
        return any(not rel for rel in self.relations.values())

    def copy(self) -> "BinaryNetwork":
        return BinaryNetwork(
            self.variables, self.domain_size, {k: set(v) for k, v in self.relations.items()}
        )

    def to_json(self, symbols: Sequence[str]) -> dict:
        pairs = []
        for x, y in itertools.combinations_with_replacement(self.variables, 2):
            rel = sorted(self.relations[x, y])
            pairs.append({"vars": [x, y], "tuples": [[symbols[d], symbols[e]] for d, e in rel]})
        return {"variables": list(self.variables), "pairs": pairs}


def translate_majority(instance: Instance, g: OperationTable, check: bool = True) -> BinaryNetwork:
    """Binary network with the same solutions as ``instance``.

    ``P[x, y]`` intersects ``π_{i,j} R_n`` over every constraint position pair
    holding ``(x, y)``; pairs never sharing a constraint stay ``D^2``.
    """
    if not g.is_majority():
        raise ValueError("operation is not a majority operation")
    _check_closed(instance, g, check)
    a = instance.automaton
    D = instance.domain.size
    net = BinaryNetwork.full(instance.variables, D)
    for x, p in instance.domains.items():
        net.restrict(x, x, {(d, d) for d in p})
    cache: dict[tuple, frozenset] = {}
    for c in instance.constraints:
        n = c.arity
        if n == 1:
            key = (1, (0,))
            if key not in cache:
                cache[key] = kary_projection(a, 1, (0,))
            x = c.scope[0]
            net.restrict(x, x, {(d, d) for (d,) in cache[key]})
            continue
        for i, j in itertools.combinations(range(n), 2):
            key = (n, (i, j))
            if key not in cache:
                cache[key] = binary_projection(a, n, i, j)
            net.restrict(c.scope[i], c.scope[j], cache[key])
    return net


def prune_round(net: BinaryNetwork) -> bool:
    """One sweep of the path-consistency deletion rule; True if anything was removed.

    ``(a, b)`` leaves ``P[x, y]`` when no ``c`` has ``(a, c)`` in ``P[x, z]`` and
    ``(b, c)`` in ``P[y, z]`` for some variable ``z``.
    """
    changed = False
    V = net.variables
    R = net.relations
    for x in V:
        for y in V:
            for z in V:
                xz, yz = R[x, z], R[y, z]
                doomed = [
                    (a, b)
                    for a, b in R[x, y]
                    if not any((a, c) in xz and (b, c) in yz for c in range(net.domain_size))
                ]
                if doomed:
                    changed = True
                    for a, b in doomed:
                        R[x, y].discard((a, b))
                        R[y, x].discard((b, a))
    return changed


def path_consistency(net: BinaryNetwork) -> BinaryNetwork:
    """Strong path consistency by repeated sweeps; returns a pruned copy.

    Runs to the full fixpoint, so one empty relation empties all of them.
    """
    net = net.copy()
    while prune_round(net):
        pass
    return net


def path_consistency_solve(net: BinaryNetwork) -> Assignment | None:
    """Decide a majority-closed binary network and extract a solution.

    After pruning, variables are fixed in declaration order, each to the
    least value compatible with every earlier choice.  Closure under a
    majority operation guarantees such a value exists (clique extension).
    """
    net = path_consistency(net)
    if net.is_empty():
        return None
    R = net.relations
    solution: dict[str, int] = {}
    for v in net.variables:
        for d in range(net.domain_size):
            if (d, d) in R[v, v] and all((solution[u], d) in R[u, v] for u in solution):
                solution[v] = d
                break
        else:
            raise NetworkInconsistent(f"no value for {v!r} extends the partial solution")
    return solution


def solve_majority(instance: Instance, g: OperationTable, check: bool = True) -> Assignment | None:
    solution = path_consistency_solve(translate_majority(instance, g, check))
    if solution is not None and not verify(instance, solution):  # pragma: no cover
        raise AssertionError("majority solver produced an assignment that does not verify")
    return solution


# -- general near-unanimity: networks of arity k-1 ---------------------------------


@dataclass
class KAryNetwork:
    """Relations ``P[u]`` for every set ``u`` of at most ``k-1`` variables.

    ``u`` is a tuple in declaration order and ``P[u]`` a set of value tuples
    aligned with it.  Sets smaller than ``k-1`` carry the constraints of short
    or repetitive scopes and the unary domains.
    """

    variables: tuple[str, ...]
    domain_size: int
    width: int
    relations: dict[tuple[str, ...], set[tuple[int, ...]]] = field(default_factory=dict)

    @classmethod
    def full(cls, variables: Sequence[str], domain_size: int, width: int) -> "KAryNetwork":
        width = min(width, len(variables))
        net = cls(tuple(variables), domain_size, width)
        for size in range(1, width + 1):
            for u in itertools.combinations(variables, size):
                net.relations[u] = set(itertools.product(range(domain_size), repeat=size))
        return net

    def key(self, names: Iterable[str]) -> tuple[str, ...]:
        order = {x: i for i, x in enumerate(self.variables)}
        return tuple(sorted(set(names), key=order.__getitem__))

    def restrict(self, names: Sequence[str], tuples: Iterable[tuple[int, ...]]):
        """Intersect with a relation over possibly repeated variables ``names``."""
        u = self.key(names)
        allowed = set()
        for t in tuples:
            value: dict[str, int] = {}
            if all(value.setdefault(x, d) == d for x, d in zip(names, t)):
                allowed.add(tuple(value[x] for x in u))
        self.relations[u] &= allowed

    def is_empty(self) -> bool:
        return any(not rel for rel in self.relations.values())

    def copy(self) -> "KAryNetwork":
        return KAryNetwork(
            self.variables,
            self.domain_size,
            self.width,
            {k: set(v) for k, v in self.relations.items()},
        )

    def consistent(self, partial: dict[str, int], must_contain: str | None = None) -> bool:
        """Whether ``partial`` satisfies every relation whose variables it covers."""
        names = self.key(partial)
        for size in range(1, min(self.width, len(names)) + 1):
            for u in itertools.combinations(names, size):
                if must_contain is not None and must_contain not in u:
                    continue
                if tuple(partial[x] for x in u) not in self.relations[u]:
                    return False
        return True

    def to_json(self, symbols: Sequence[str]) -> dict:
        rels = []
        for u, rel in self.relations.items():
            rels.append({"vars": list(u), "tuples": [[symbols[d] for d in t] for t in sorted(rel)]})
        return {"variables": list(self.variables), "width": self.width, "relations": rels}


def translate_nu(instance: Instance, g: OperationTable, check: bool = True) -> KAryNetwork:
    """Network of ``(k-1)``-ary projections with the same solutions as ``instance``."""
    if not g.is_near_unanimity():
        raise ValueError("operation is not a near-unanimity operation of arity >= 3")
    _check_closed(instance, g, check)
    a = instance.automaton
    m = g.arity - 1
    net = KAryNetwork.full(instance.variables, instance.domain.size, m)
    for x, p in instance.domains.items():
        net.restrict((x,), {(d,) for d in p})
    cache: dict[tuple, frozenset] = {}
    for c in instance.constraints:
        n = c.arity
        for positions in itertools.combinations(range(n), min(m, n)):
            key = (n, positions)
            if key not in cache:
                cache[key] = kary_projection(a, n, positions)
            net.restrict([c.scope[p] for p in positions], cache[key])
    return net


def nu_consistency(net: KAryNetwork) -> KAryNetwork:
    """Strong ``(k-1, k)``-consistency: every tuple of every relation must agree
    with the relations on its subsets and extend to each further variable."""
    net = net.copy()
    changed = True
    while changed and not net.is_empty():
        changed = False
        for u, rel in net.relations.items():
            for t in sorted(rel):
                partial = dict(zip(u, t))
                ok = net.consistent(partial)
                if ok:
                    for z in net.variables:
                        if z in partial:
                            continue
                        if not any(
                            net.consistent({**partial, z: c}, must_contain=z)
                            for c in range(net.domain_size)
                        ):
                            ok = False
                            break
                if not ok:
                    rel.discard(t)
                    changed = True
    return net


def solve_nu(instance: Instance, g: OperationTable, check: bool = True) -> Assignment | None:
    """Decide via the ``(k-1)``-ary network and extend greedily in declaration order."""
    net = nu_consistency(translate_nu(instance, g, check))
    if net.is_empty():
        return None
    solution: dict[str, int] = {}
    for v in net.variables:
        for d in range(net.domain_size):
            if net.consistent({**solution, v: d}, must_contain=v):
                solution[v] = d
                break
        else:
            raise NetworkInconsistent(f"no value for {v!r} extends the partial solution")
    if not verify(instance, solution):  # pragma: no cover
        raise AssertionError("NU solver produced an assignment that does not verify")
    return solution
