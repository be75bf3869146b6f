"""Operation tables and polymorphism tests for automatic constraint languages."""

from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from autcsp.automaton import Automaton, Domain, Word
from autcsp.errors import DomainMismatch, ParseError


class OperationTable:
    """A total operation ``f: D^k -> D`` stored as a flat table.

    Rows are ordered lexicographically by argument tuple, so row ``i`` of the
    ``|D|^k x (k+1)`` listing is ``(*args, f(*args))`` with ``args`` the
    base-``|D|`` digits of ``i``.
    """

    __slots__ = ("domain", "arity", "values", "name")

    def __init__(self, domain: Domain, arity: int, values: Sequence[int], name: str | None = None):
        if arity < 1:
            raise ValueError("operation arity must be at least 1")
        values = tuple(values)
        if len(values) != domain.size**arity:
            raise ValueError(f"expected {domain.size ** arity} table entries, got {len(values)}")
        if any(not 0 <= v < domain.size for v in values):
            raise ValueError("table entry outside the domain")
        self.domain = domain
        self.arity = arity
        self.values = values
        self.name = name

    @classmethod
    def from_function(cls, domain: Domain, arity: int, fn: Callable[..., int], name=None):
        values = [fn(*args) for args in itertools.product(range(domain.size), repeat=arity)]
        return cls(domain, arity, values, name)

    def _offset(self, args: Sequence[int]) -> int:
        i = 0
        for a in args:
            i = i * self.domain.size + a
        return i

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise TypeError(f"expected {self.arity} arguments")
        return self.values[self._offset(args)]

    def rows(self) -> Iterator[tuple[tuple[int, ...], int]]:
        for args, v in zip(itertools.product(range(self.domain.size), repeat=self.arity), self.values):
            yield args, v

    def apply_words(self, words: Sequence[Word]) -> Word:
        """Columnwise lift to equal-length words."""
        if len(words) != self.arity:
            raise TypeError(f"expected {self.arity} words")
        if len({len(w) for w in words}) > 1:
            raise ValueError("words must have equal length")
        return tuple(self(*column) for column in zip(*words))

    def __eq__(self, other):
        return (
            isinstance(other, OperationTable)
            and self.domain == other.domain
            and self.arity == other.arity
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.domain, self.arity, self.values))

    def __repr__(self):
        label = self.name or "table"
        return f"<OperationTable {label} arity={self.arity} |D|={self.domain.size}>"

    def to_text(self) -> str:
        sym = self.domain.symbols
        lines = ["alphabet " + " ".join(sym), f"arity {self.arity}"]
        for args, v in self.rows():
            lines.append("map " + " ".join(sym[a] for a in args) + " -> " + sym[v])
        return "\n".join(lines) + "\n"

    # -- identity checks -------------------------------------------------------

    def is_idempotent(self) -> bool:
        return all(self(*([d] * self.arity)) == d for d in self.domain)

    def is_semilattice(self) -> bool:
        if self.arity != 2 or not self.is_idempotent():
            return False
        D = range(self.domain.size)
        if any(self(x, y) != self(y, x) for x in D for y in D):
            return False
        return all(self(self(x, y), z) == self(x, self(y, z)) for x in D for y in D for z in D)

    def is_near_unanimity(self) -> bool:
        """``g(x,y,...,y) = g(y,x,y,...,y) = ... = g(y,...,y,x) = y``; needs arity >= 3."""
        if self.arity < 3:
            return False
        for x in self.domain:
            for y in self.domain:
                for pos in range(self.arity):
                    args = [y] * self.arity
                    args[pos] = x
                    if self(*args) != y:
                        return False
        return True

    def is_majority(self) -> bool:
        return self.arity == 3 and self.is_near_unanimity()

    def is_siggers(self) -> bool:
        """``f(r,a,r,e) = f(a,r,e,a)`` for all ``a, r, e``."""
        if self.arity != 4:
            return False
        D = range(self.domain.size)
        return all(self(r, a, r, e) == self(a, r, e, a) for a in D for r in D for e in D)

    def preserves(self, subset) -> bool:
        """Whether a unary relation (set of symbols) is closed under the operation."""
        subset = set(subset)
        return all(
            self(*args) in subset for args in itertools.product(sorted(subset), repeat=self.arity)
        )


def parse_operation(text: str) -> OperationTable:
    domain = None
    arity = None
    entries: dict[tuple[int, ...], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        if key == "alphabet":
            try:
                domain = Domain(tuple(args))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        elif key == "arity":
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError("arity must be a positive integer", lineno)
            arity = int(args[0])
        elif key == "map":
            if domain is None or arity is None:
                raise ParseError("map before alphabet/arity", lineno)
            if len(args) != arity + 2 or args[-2] != "->":
                raise ParseError(f"map expects {arity} arguments, '->', and a value", lineno)
            try:
                point = tuple(domain.index(a) for a in args[:arity])
                value = domain.index(args[-1])
            except KeyError as exc:
                raise ParseError(str(exc.args[0]), lineno) from None
            if point in entries:
                raise ParseError("duplicate map line", lineno)
            entries[point] = value
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)
    if domain is None or arity is None:
        raise ParseError("missing alphabet or arity line")
    if len(entries) != domain.size**arity:
        raise ParseError(f"expected exactly {domain.size ** arity} map lines, got {len(entries)}")
    values = [entries[args] for args in itertools.product(range(domain.size), repeat=arity)]
    return OperationTable(domain, arity, values)


# -- the six Schaefer operations ----------------------------------------------

BOOLEAN = Domain.boolean()

SCHAEFER_OPS: dict[str, OperationTable] = {
    "const0": OperationTable.from_function(BOOLEAN, 1, lambda x: 0, "const0"),
    "const1": OperationTable.from_function(BOOLEAN, 1, lambda x: 1, "const1"),
    "and": OperationTable.from_function(BOOLEAN, 2, lambda x, y: x & y, "and"),
    "or": OperationTable.from_function(BOOLEAN, 2, lambda x, y: x | y, "or"),
    "maj": OperationTable.from_function(
        BOOLEAN, 3, lambda x, y, z: (x & y) | (x & z) | (y & z), "maj"
    ),
    "minor": OperationTable.from_function(BOOLEAN, 3, lambda x, y, z: x ^ y ^ z, "minor"),
}


def schaefer_op(name: str, domain: Domain = BOOLEAN) -> OperationTable:
    """One of the six Boolean tables, re-homed onto a two-symbol ``domain``."""
    op = SCHAEFER_OPS[name]
    if domain == op.domain:
        return op
    if domain.size != 2:
        raise DomainMismatch("Schaefer operations need a two-element domain")
    return OperationTable(domain, op.arity, op.values, name)


def affine_op(q: int) -> OperationTable:
    """``x - y + z`` over ``GF(q)`` on the domain ``0 .. q-1``."""
    return OperationTable.from_function(
        Domain.range(q), 3, lambda x, y, z: (x - y + z) % q, f"affine{q}"
    )


# -- automata for f_omega and its refutation ----------------------------------


def graph_automaton(f: OperationTable) -> Automaton:
    """Two-state automaton over ``D^(k+1)`` accepting the graph of the lifted operation.

    Symbol ``"d1,...,dk,v"`` is one column of the convolution.  The start
    state loops on table rows and falls into the dead state on anything else.
    """
    D = f.domain
    columns = list(itertools.product(range(D.size), repeat=f.arity + 1))
    alphabet = Domain(tuple(",".join(D.symbols[c] for c in col) for col in columns))
    edges = []
    for i, col in enumerate(columns):
        edges.append((0, i, 0 if f(*col[:-1]) == col[-1] else 1))
        edges.append((1, i, 1))
    return Automaton(alphabet, ("s", "dead"), [0], edges, [0])


def convolution(f: OperationTable, words: Sequence[Word]) -> Word:
    """Encode equal-length words as a word over the alphabet of :func:`graph_automaton`."""
    base = f.domain.size
    out = []
    for col in zip(*words):
        i = 0
        for c in col:
            i = i * base + c
        out.append(i)
    return tuple(out)


@dataclass(frozen=True)
class PolymorphismVerdict:
    holds: bool
    counterexample: tuple[Word, ...] | None = None

    def __bool__(self):
        return self.holds

    def check(self, a: Automaton, f: OperationTable) -> bool:
        """Re-verify a counterexample directly: inputs accepted, output rejected,
        output equal to the columnwise application of ``f``."""
        if self.holds:
            return self.counterexample is None
        *xs, y = self.counterexample
        return (
            all(a.accepts(x) for x in xs)
            and not a.accepts(y)
            and f.apply_words(xs) == tuple(y)
        )


def _require_same_domain(a: Automaton, f: OperationTable):
    if a.domain == f.domain:
        return
    # Boolean tables apply to any two-symbol alphabet by position
    if f.domain == BOOLEAN and a.domain.size == 2:
        return
    raise DomainMismatch("operation and automaton are over different domains")


def _dead_states(dfa: Automaton) -> frozenset[int]:
    return frozenset(range(dfa.num_states)) - dfa.coreachable()


def refutation_product(a: Automaton, f: OperationTable) -> Automaton:
    """Explicit product ``A_f`` with state set ``S^(k+1)``.

    Accepts the convolution ``(x_1..x_k, f(x_1..x_k))`` exactly when every
    ``x_i`` is accepted and the image is rejected.  The alphabet is that of
    :func:`graph_automaton`; only table rows carry transitions.
    """
    _require_same_domain(a, f)
    dfa = a.determinize()
    n = dfa.num_states
    k = f.arity
    D = dfa.domain.size
    tuples = list(itertools.product(range(n), repeat=k + 1))
    index = {t: i for i, t in enumerate(tuples)}
    rows = list(f.rows())
    edges = []
    for t in tuples:
        i = index[t]
        for args, v in rows:
            letter = 0
            for c in (*args, v):
                letter = letter * D + c
            nxt = tuple(dfa.next_state(s, d) for s, d in zip(t, (*args, v)))
            edges.append((i, letter, index[nxt]))
    alphabet = graph_automaton(f).domain
    names = ["(" + ",".join(dfa.states[s] for s in t) + ")" for t in tuples]
    acc = [
        i
        for t, i in index.items()
        if all(s in dfa.accepting for s in t[:k]) and t[k] not in dfa.accepting
    ]
    start = index[(dfa.start,) * (k + 1)]
    return Automaton(alphabet, names, [start], edges, acc)


class _RefutationSearch:
    """Per-automaton data for repeated refutation-product searches."""

    def __init__(self, a: Automaton):
        dfa = a.determinize()
        self.start = dfa.start
        self.delta = [[dfa.next_state(s, d) for d in dfa.domain] for s in range(dfa.num_states)]
        self.accepting = dfa.accepting
        self.dead = _dead_states(dfa)

    def run(self, f: OperationTable) -> PolymorphismVerdict:
        k = f.arity
        delta, accepting, dead = self.delta, self.accepting, self.dead
        rows = [(args, args + (v,)) for args, v in f.rows()]
        start = (self.start,) * (k + 1)

        def is_goal(t):
            return t[k] not in accepting and all(s in accepting for s in t[:k])

        parent: dict[tuple, tuple | None] = {start: None}
        queue = deque([start])
        goal = start if is_goal(start) else None
        while queue and goal is None:
            t = queue.popleft()
            head, last = t[:k], delta[t[k]]
            for args, col in rows:
                nxt = tuple([delta[s][d] for s, d in zip(head, args)] + [last[col[k]]])
                if nxt in parent or any(s in dead for s in nxt[:k]):
                    continue
                parent[nxt] = (t, col)
                if is_goal(nxt):
                    goal = nxt
                    break
                queue.append(nxt)
        if goal is None:
            return PolymorphismVerdict(True)
        columns = []
        node = goal
        while parent[node] is not None:
            node, col = parent[node]
            columns.append(col)
        columns.reverse()
        words = tuple(tuple(col[i] for col in columns) for i in range(k + 1))
        return PolymorphismVerdict(False, words)


def is_polymorphism(a: Automaton, f: OperationTable) -> PolymorphismVerdict:
    """Decide whether ``f`` preserves every relation ``L(A) ∩ D^n``.

    Breadth-first emptiness search over the refutation product, generated on
    the fly from the determinized automaton.  Product states whose first ``k``
    coordinates include a dead state can never accept and are not expanded.
    The counterexample returned is the shortest one, least in column order.
    """
    _require_same_domain(a, f)
    return _RefutationSearch(a).run(f)


def check_user_table(a: Automaton, f: OperationTable) -> PolymorphismVerdict:
    """Polymorphism test for an arbitrary user-supplied table."""
    if a.domain != f.domain:
        raise DomainMismatch("operation and automaton are over different domains")
    return is_polymorphism(a, f)


def _require_boolean(a: Automaton):
    if a.domain.size != 2:
        raise DomainMismatch("this check needs a Boolean (two-symbol) alphabet")


def schaefer_verdicts(a: Automaton) -> dict[str, PolymorphismVerdict]:
    _require_boolean(a)
    return {name: is_polymorphism(a, schaefer_op(name, a.domain)) for name in SCHAEFER_OPS}


def schaefer_check(a: Automaton) -> list[str]:
    """Names of the Schaefer operations that are polymorphisms, in fixed order."""
    return [name for name, v in schaefer_verdicts(a).items() if v.holds]


def siggers_tables(domain: Domain = BOOLEAN) -> tuple[OperationTable, ...]:
    """All quaternary tables on a two-element domain satisfying the Siggers identity.

    Candidate ``i`` of the ``2^16`` tables has entry ``j`` equal to bit ``j`` of ``i``;
    survivors are returned in increasing ``i``.
    """
    if domain.size != 2:
        raise DomainMismatch("Siggers enumeration is only supported for two-element domains")
    return tuple(
        OperationTable(domain, 4, values, f"siggers{bits}") for bits, values in _siggers_bits()
    )


@functools.lru_cache(maxsize=1)
def _siggers_bits() -> tuple[tuple[int, tuple[int, ...]], ...]:
    # entry offset of f(x1,x2,x3,x4) is 8*x1 + 4*x2 + 2*x3 + x4
    pairs = [
        (8 * r + 4 * a + 2 * r + e, 8 * a + 4 * r + 2 * e + a)
        for a in (0, 1)
        for r in (0, 1)
        for e in (0, 1)
    ]
    out = []
    for bits in range(1 << 16):
        if all((bits >> i) & 1 == (bits >> j) & 1 for i, j in pairs):
            out.append((bits, tuple((bits >> i) & 1 for i in range(16))))
    return tuple(out)


def siggers_check_boolean(a: Automaton) -> OperationTable | None:
    """First Siggers table (in enumeration order) that is a polymorphism, if any."""
    _require_boolean(a)
    search = _RefutationSearch(a)
    # refuting inputs found so far; most tables fall to one of a handful
    refuters: list[tuple[Word, ...]] = []
    for table in siggers_tables(a.domain):
        hit = next((i for i, xs in enumerate(refuters) if not a.accepts(table.apply_words(xs))), None)
        if hit is not None:
            refuters.insert(0, refuters.pop(hit))
            continue
        verdict = search.run(table)
        if verdict.holds:
            return table
        refuters.append(verdict.counterexample[:-1])
    return None


@dataclass(frozen=True)
class DichotomyVerdict:
    tractable: bool
    tractable_ops: tuple[str, ...]
    verdicts: dict[str, PolymorphismVerdict] = field(repr=False)

    @property
    def classification(self) -> str:
        return "P" if self.tractable else "NP-complete"

    @property
    def witness_arities(self) -> dict[str, int]:
        """For an NP-complete language: the arity ``n_f`` refuting each operation.

        The relations ``R_{n_f}`` form a finite sub-language with no Schaefer
        polymorphism.
        """
        if self.tractable:
            return {}
        return {name: len(v.counterexample[0]) for name, v in self.verdicts.items()}


def classify_dichotomy(a: Automaton) -> DichotomyVerdict:
    verdicts = schaefer_verdicts(a)
    ops = tuple(name for name, v in verdicts.items() if v.holds)
    return DichotomyVerdict(bool(ops), ops, verdicts)
