"""Seeded test populations shared by the module tests and the acceptance suite."""

from __future__ import annotations

import functools
import random

from autcsp.automaton import Automaton, Domain, build_automaton
from autcsp.fixtures import fixture
from autcsp.generate import closed_block_language, random_affine_automaton, random_automaton, random_instance
from autcsp.operations import OperationTable, is_polymorphism, schaefer_op

SEED = 20240611
BOOL = Domain.boolean()
TERNARY = Domain.range(3)


def neq() -> Automaton:
    """Exactly the words 01 and 10: the binary slice of the not-all-equal language."""
    return build_automaton(
        "01", ["s", "a", "b", "f"], ["s"], ["f"],
        [("s", "0", "a"), ("s", "1", "b"), ("a", "1", "f"), ("b", "0", "f")],
    )  # fmt: skip


def digit_sum_zero_mod3() -> Automaton:
    return build_automaton(
        "012", ["s0", "s1", "s2"], ["s0"], ["s0"],
        [(f"s{s}", str(d), f"s{(s + d) % 3}") for s in range(3) for d in range(3)],
    )  # fmt: skip


# operations ------------------------------------------------------------------------

MAJ = schaefer_op("maj")
AND = schaefer_op("and")
# majority of the first three arguments: a 4-ary near-unanimity operation
NU4_FROM_MAJ = OperationTable.from_function(BOOL, 4, lambda a, b, c, d: MAJ(a, b, c), "nu4maj")
# at least two of four: near-unanimous but not derived from a majority
THRESHOLD2 = OperationTable.from_function(BOOL, 4, lambda *xs: int(sum(xs) >= 2), "th2")
# dual discriminator: a majority operation on three elements
DUAL_DISCRIMINATOR = OperationTable.from_function(
    TERNARY, 3, lambda x, y, z: y if y == z else x, "dualdisc"
)


def _plurality4(*xs):
    for v in xs:
        if xs.count(v) >= 3:
            return v
    return xs[0]


PLURALITY4 = OperationTable.from_function(TERNARY, 4, _plurality4, "plurality4")
MIN3 = OperationTable.from_function(TERNARY, 2, min, "min")


# automaton populations -----------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def random_automata(count: int = 200, seed: int = SEED) -> tuple[Automaton, ...]:
    """Random automata with at most five states; alphabets alternate between 2 and 3."""
    rng = random.Random(seed)
    return tuple(random_automaton(rng, BOOL if i % 2 == 0 else TERNARY, 5) for i in range(count))


@functools.lru_cache(maxsize=None)
def random_boolean_automata(count: int = 200, seed: int = SEED + 1) -> tuple[Automaton, ...]:
    rng = random.Random(seed)
    return tuple(random_automaton(rng, BOOL, 5) for _ in range(count))


@functools.lru_cache(maxsize=None)
def closed_automata(g: OperationTable, count: int, seed: int = SEED) -> tuple[Automaton, ...]:
    """Block languages closed under ``g``; each is re-checked by the product search."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a = closed_block_language(rng, g)
        assert is_polymorphism(a, g).holds
        out.append(a)
    return tuple(out)


@functools.lru_cache(maxsize=None)
def affine_automata(count: int = 50, seed: int = SEED) -> tuple[Automaton, ...]:
    """Random linear languages over GF(2) and GF(3), filtered by the product search."""
    from autcsp.operations import affine_op

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        q = 2 if len(out) % 2 == 0 else 3
        a = random_affine_automaton(rng, q)
        if is_polymorphism(a, affine_op(q)).holds:
            out.append(a)
    return tuple(out)


def instances(automata, count: int, seed: int, **kw):
    rng = random.Random(seed)
    return [random_instance(rng, automata[i % len(automata)], **kw) for i in range(count)]


def and_closed_population() -> tuple[Automaton, ...]:
    return (fixture("and"),) + closed_automata(AND, 11)


def maj_closed_population() -> tuple[Automaton, ...]:
    return (fixture("maj"), neq()) + closed_automata(MAJ, 8) + closed_automata(DUAL_DISCRIMINATOR, 6)
