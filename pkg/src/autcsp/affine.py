"""Affine relations over GF(q): linear systems recovered from the automaton.

If ``x - y + z`` (mod q) is a polymorphism, each ``R_n`` is a coset
``r + S`` of a subspace.  A basis of ``S`` is grown one vector at a time by
pattern searches, and the relation becomes ``M x = b`` with ``ker M = S``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from autcsp.automaton import Automaton, Word
from autcsp.errors import DomainMismatch, NotPolymorphism
from autcsp.instance import Assignment, Instance, extend_pattern, verify
from autcsp.operations import affine_op, is_polymorphism

log = logging.getLogger(__name__)

Vector = list[int]


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % p for p in range(2, int(q**0.5) + 1))


def check_field(q: int):
    if not is_prime(q):
        raise ValueError(f"GF({q}) is not supported: the modulus must be prime")


def _require_field_domain(a: Automaton, q: int):
    check_field(q)
    if a.domain.size != q or not a.domain.is_numeric():
        raise DomainMismatch(f"affine solving needs the alphabet 0 .. {q - 1}")


def rref(rows: Sequence[Sequence[int]], q: int, ncols: int | None = None) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form over GF(q) with leftmost pivots; zero rows dropped."""
    work = [[x % q for x in row] for row in rows]
    if ncols is None:
        ncols = len(work[0]) if work else 0
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(work)) if work[i][col]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = pow(work[r][col], q - 2, q)
        work[r] = [x * inv % q for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col]:
                factor = work[i][col]
                work[i] = [(x - factor * y) % q for x, y in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def nullspace(basis: Sequence[Vector], pivots: Sequence[int], n: int, q: int) -> list[Vector]:
    """Rows spanning ``{a : a . b = 0 for all b in basis}`` for ``basis`` in RREF."""
    out = []
    pivot_set = set(pivots)
    for free in range(n):
        if free in pivot_set:
            continue
        alpha = [0] * n
        alpha[free] = 1
        for row, p in zip(basis, pivots):
            alpha[p] = -row[free] % q
        out.append(alpha)
    return out


@dataclass(frozen=True)
class AffineBasis:
    """``R_n = representative + span(basis)``; ``basis`` in RREF with pivot columns ``leading``."""

    representative: Word
    basis: tuple[tuple[int, ...], ...]
    leading: tuple[int, ...]
    q: int

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def elements(self) -> set[Word]:
        """The whole coset; exponential in the dimension, for tests."""
        out = {tuple(self.representative)}
        for b in self.basis:
            out = {
                tuple((x + c * y) % self.q for x, y in zip(v, b))
                for v in out
                for c in range(self.q)
            }
        return out


@dataclass(frozen=True)
class LinearSystem:
    """``M x = b`` over GF(q) in ``n`` unknowns."""

    q: int
    n: int
    M: tuple[tuple[int, ...], ...]
    b: tuple[int, ...]

    def satisfied_by(self, x: Sequence[int]) -> bool:
        return all(
            sum(c * v for c, v in zip(row, x)) % self.q == rhs for row, rhs in zip(self.M, self.b)
        )

    @property
    def rank(self) -> int:
        return len(rref(self.M, self.q, self.n)[0]) if self.M else 0

    def solve(self) -> list[int] | None:
        """One solution with free unknowns set to 0, or None if inconsistent."""
        q = self.q
        augmented = [list(row) + [rhs] for row, rhs in zip(self.M, self.b)]
        reduced, pivots = rref(augmented, q, self.n + 1)
        if self.n in pivots:
            return None
        x = [0] * self.n
        for row, p in zip(reduced, pivots):
            x[p] = row[self.n]
        return x

    def to_json(self) -> dict:
        return {"n": self.n, "M": [list(r) for r in self.M], "b": list(self.b), "q": self.q}


def basis_construction(a: Automaton, n: int, q: int) -> AffineBasis | None:
    """Representative and RREF basis of ``R_n - r``; None when ``R_n`` is empty.

    Each round looks for a member of ``R_n`` that agrees with ``r`` on the
    current pivot columns and differs by exactly +1 at some fresh column.
    """
    _require_field_domain(a, q)
    r = extend_pattern(a, n, {})
    if r is None:
        return None
    basis: list[Vector] = []
    leading: list[int] = []
    for _ in range(n):
        fixed = {k: r[k] for k in leading}
        for p in range(n):
            if p in fixed:
                continue
            x = extend_pattern(a, n, {**fixed, p: (r[p] + 1) % q})
            if x is not None:
                basis.append([(xi - ri) % q for xi, ri in zip(x, r)])
                basis, leading = rref(basis, q, n)
                break
        else:
            break
    return AffineBasis(tuple(r), tuple(map(tuple, basis)), tuple(leading), q)


def system_from_basis(coset: AffineBasis, n: int) -> LinearSystem:
    q = coset.q
    M = nullspace([list(b) for b in coset.basis], coset.leading, n, q)
    rhs = [sum(c * v for c, v in zip(row, coset.representative)) % q for row in M]
    return LinearSystem(q, n, tuple(map(tuple, M)), tuple(rhs))


def extract_linear_system(a: Automaton, n: int, q: int) -> LinearSystem | None:
    """``M, b`` with ``r in R_n`` iff ``M r = b``; None when ``R_n`` is empty."""
    coset = basis_construction(a, n, q)
    if coset is None:
        return None
    return system_from_basis(coset, n)


def assemble_global_system(instance: Instance, q: int) -> LinearSystem:
    """Stack every constraint's system over the instance variables.

    A variable repeated within a scope gets the sum of its coefficients.  An
    empty relation contributes the row ``0 = 1``; singleton domain constraints
    contribute ``x = a``.
    """
    a = instance.automaton
    _require_field_domain(a, q)
    column = {x: i for i, x in enumerate(instance.variables)}
    width = len(instance.variables)
    cache: dict[int, LinearSystem | None] = {}
    rows: list[tuple[int, ...]] = []
    rhs: list[int] = []
    for c in instance.constraints:
        if c.arity not in cache:
            cache[c.arity] = extract_linear_system(a, c.arity, q)
        local = cache[c.arity]
        if local is None:
            rows.append((0,) * width)
            rhs.append(1)
            continue
        for row, value in zip(local.M, local.b):
            out = [0] * width
            for var, coeff in zip(c.scope, row):
                out[column[var]] = (out[column[var]] + coeff) % q
            rows.append(tuple(out))
            rhs.append(value)
    for x in instance.variables:
        allowed = instance.allowed(x)
        if len(allowed) == q:
            continue
        if not allowed:
            rows.append((0,) * width)
            rhs.append(1)
        elif len(allowed) == 1:
            out = [0] * width
            out[column[x]] = 1
            rows.append(tuple(out))
            rhs.append(next(iter(allowed)))
        else:
            raise ValueError(f"domain constraint on {x!r} is not an affine subset of GF({q})")
    return LinearSystem(q, width, tuple(rows), tuple(rhs))


def solve_affine(instance: Instance, q: int, check: bool = True) -> Assignment | None:
    """Gaussian elimination on the assembled system; free variables get 0."""
    _require_field_domain(instance.automaton, q)
    if check:
        f = affine_op(q)
        verdict = is_polymorphism(instance.automaton, f)
        if not verdict.holds:
            raise NotPolymorphism(f.name, verdict)
    for n in sorted({c.arity for c in instance.constraints}):
        if instance.automaton.word_of_length(n) is None:
            log.info("relation of arity %d is empty; instance is unsatisfiable", n)
            return None
    system = assemble_global_system(instance, q)
    x = system.solve()
    if x is None:
        return None
    solution = dict(zip(instance.variables, x))
    if not verify(instance, solution):  # pragma: no cover - guarded by the theory
        raise AssertionError("affine solver produced an assignment that does not verify")
    return solution
