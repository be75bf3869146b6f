"""Finite automata over a finite CSP domain.

Words are tuples of symbol indices (``0 .. |D|-1``); :class:`Domain` converts
between indices and the symbol names used in files and on the command line.
Automata may be nondeterministic.  Operations that need a transition
*function* call :meth:`Automaton.determinize` first.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from autcsp.errors import DomainMismatch, ParseError

Word = tuple[int, ...]


@dataclass(frozen=True)
class Domain:
    """Ordered alphabet of symbol names; position in ``symbols`` is the index."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(self.symbols) < 2:
            raise ValueError("a domain needs at least two symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in domain {self.symbols}")
        for s in self.symbols:
            if not s or any(c.isspace() for c in s):
                raise ValueError(f"invalid symbol {s!r}")

    @classmethod
    def boolean(cls) -> "Domain":
        return cls(("0", "1"))

    @classmethod
    def range(cls, q: int) -> "Domain":
        return cls(tuple(str(i) for i in range(q)))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(range(len(self.symbols)))

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise KeyError(f"symbol {symbol!r} not in alphabet {' '.join(self.symbols)}") from None

    def word(self, text: str | Sequence[str]) -> Word:
        """Parse ``"0110"`` (single-character symbols) or a sequence of symbol names."""
        if isinstance(text, str):
            if all(len(s) == 1 for s in self.symbols):
                return tuple(self.index(c) for c in text)
            text = text.split()
        return tuple(self.index(s) for s in text)

    def format(self, word: Iterable[int]) -> str:
        names = [self.symbols[d] for d in word]
        if all(len(s) == 1 for s in self.symbols):
            return "".join(names)
        return " ".join(names)

    def is_numeric(self) -> bool:
        """True when the symbols are exactly ``0 .. |D|-1`` in order."""
        return self.symbols == tuple(str(i) for i in range(len(self.symbols)))


class Growth(enum.Enum):
    POLYNOMIAL = "polynomial"
    EXPONENTIAL = "exponential"


class Automaton:
    """Immutable finite automaton ``(S, I, Delta, F)`` over ``domain``.

    ``delta[s][d]`` is the frozenset of successor state indices of state ``s``
    on symbol ``d``.
    """

    __slots__ = ("domain", "states", "initial", "accepting", "delta", "_dead")

    def __init__(
        self,
        domain: Domain,
        states: Sequence[str],
        initial: Iterable[int],
        transitions: Iterable[tuple[int, int, int]],
        accepting: Iterable[int],
    ):
        states = tuple(states)
        if not states:
            raise ValueError("empty state set")
        if len(set(states)) != len(states):
            raise ValueError("duplicate state names")
        n = len(states)
        initial = frozenset(initial)
        accepting = frozenset(accepting)
        if not initial:
            raise ValueError("empty initial set")
        for s in initial | accepting:
            if not 0 <= s < n:
                raise ValueError(f"state index {s} out of range")
        table = [[set() for _ in range(domain.size)] for _ in range(n)]
        for s, d, t in transitions:
            if not (0 <= s < n and 0 <= t < n):
                raise ValueError(f"transition ({s}, {d}, {t}) references an unknown state")
            if not 0 <= d < domain.size:
                raise ValueError(f"transition ({s}, {d}, {t}) references an unknown symbol")
            table[s][d].add(t)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "accepting", accepting)
        object.__setattr__(
            self, "delta", tuple(tuple(frozenset(ts) for ts in row) for row in table)
        )
        object.__setattr__(self, "_dead", None)

    def __setattr__(self, name, value):
        raise AttributeError("Automaton is immutable")

    def __repr__(self):
        return (
            f"<Automaton |S|={len(self.states)} |Delta|={self.num_transitions} "
            f"alphabet={' '.join(self.domain.symbols)}>"
        )

    # -- basic properties ------------------------------------------------------

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_transitions(self) -> int:
        return sum(len(ts) for row in self.delta for ts in row)

    @property
    def size(self) -> int:
        """``|S| + |Delta|``."""
        return self.num_states + self.num_transitions

    @property
    def is_deterministic(self) -> bool:
        """One initial state and a total transition function."""
        return len(self.initial) == 1 and all(len(ts) == 1 for row in self.delta for ts in row)

    def transitions(self) -> Iterator[tuple[int, int, int]]:
        for s, row in enumerate(self.delta):
            for d, ts in enumerate(row):
                for t in sorted(ts):
                    yield s, d, t

    def step(self, states: Iterable[int], d: int) -> frozenset[int]:
        out = set()
        for s in states:
            out |= self.delta[s][d]
        return frozenset(out)

    def next_state(self, s: int, d: int) -> int:
        """Transition function of a deterministic automaton."""
        (t,) = self.delta[s][d]
        return t

    @property
    def start(self) -> int:
        (s,) = self.initial
        return s

    # -- membership ------------------------------------------------------------

    def accepts(self, word: Iterable[int]) -> bool:
        current = self.initial
        for d in word:
            current = self.step(current, d)
            if not current:
                return False
        return bool(current & self.accepting)

    # -- constructions ---------------------------------------------------------

    def determinize(self) -> "Automaton":
        """Subset construction, completed with an explicit sink when needed."""
        if self.is_deterministic:
            return self
        start = self.initial
        index = {start: 0}
        order = [start]
        edges = []
        queue = deque([start])
        while queue:
            subset = queue.popleft()
            i = index[subset]
            for d in self.domain:
                nxt = self.step(subset, d)
                if nxt not in index:
                    index[nxt] = len(order)
                    order.append(nxt)
                    queue.append(nxt)
                edges.append((i, d, index[nxt]))
        names = ["{" + ",".join(self.states[s] for s in sorted(sub)) + "}" for sub in order]
        accepting = [i for i, sub in enumerate(order) if sub & self.accepting]
        return Automaton(self.domain, names, [0], edges, accepting)

    def complement(self) -> "Automaton":
        dfa = self.determinize()
        accepting = set(range(dfa.num_states)) - dfa.accepting
        return Automaton(dfa.domain, dfa.states, dfa.initial, dfa.transitions(), accepting)

    def intersection(self, other: "Automaton") -> "Automaton":
        """Product automaton over reachable state pairs."""
        if self.domain != other.domain:
            raise DomainMismatch("automata are over different alphabets")
        starts = [(p, q) for p in sorted(self.initial) for q in sorted(other.initial)]
        index = {pair: i for i, pair in enumerate(starts)}
        order = list(starts)
        edges = []
        queue = deque(starts)
        while queue:
            p, q = queue.popleft()
            i = index[p, q]
            for d in self.domain:
                for p2 in sorted(self.delta[p][d]):
                    for q2 in sorted(other.delta[q][d]):
                        if (p2, q2) not in index:
                            index[p2, q2] = len(order)
                            order.append((p2, q2))
                            queue.append((p2, q2))
                        edges.append((i, d, index[p2, q2]))
        names = [f"({self.states[p]},{other.states[q]})" for p, q in order]
        accepting = [
            i for i, (p, q) in enumerate(order) if p in self.accepting and q in other.accepting
        ]
        return Automaton(self.domain, names, range(len(starts)), edges, accepting)

    def relabel(self, perm: Sequence[int]) -> "Automaton":
        """Rename symbol ``d`` to ``perm[d]`` on every transition."""
        if sorted(perm) != list(self.domain):
            raise ValueError("relabeling must be a permutation of the domain")
        edges = [(s, perm[d], t) for s, d, t in self.transitions()]
        return Automaton(self.domain, self.states, self.initial, edges, self.accepting)

    def renamed(self, prefix: str = "q") -> "Automaton":
        """Same automaton with states named ``q0, q1, ...``."""
        names = [f"{prefix}{i}" for i in range(self.num_states)]
        return Automaton(self.domain, names, self.initial, self.transitions(), self.accepting)

    # -- reachability ----------------------------------------------------------

    def reachable(self) -> frozenset[int]:
        seen = set(self.initial)
        stack = list(self.initial)
        while stack:
            s = stack.pop()
            for ts in self.delta[s]:
                for t in ts:
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
        return frozenset(seen)

    def coreachable(self) -> frozenset[int]:
        """States from which some accepting state can be reached."""
        preds = [set() for _ in self.states]
        for s, _, t in self.transitions():
            preds[t].add(s)
        seen = set(self.accepting)
        stack = list(self.accepting)
        while stack:
            t = stack.pop()
            for s in preds[t]:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return frozenset(seen)

    def useful(self) -> frozenset[int]:
        """States on some initial-to-accepting path."""
        return self.reachable() & self.coreachable()

    def trim(self) -> "Automaton":
        """Restrict to useful states; the empty language becomes one dead state."""
        keep = sorted(self.useful())
        if not keep:
            return Automaton(self.domain, ["dead"], [0], [], [])
        new = {s: i for i, s in enumerate(keep)}
        edges = [(new[s], d, new[t]) for s, d, t in self.transitions() if s in new and t in new]
        return Automaton(
            self.domain,
            [self.states[s] for s in keep],
            [new[s] for s in self.initial if s in new],
            edges,
            [new[s] for s in self.accepting if s in new],
        )

    # -- searches --------------------------------------------------------------

    def find_word(self, allowed: Sequence[Iterable[int]]) -> Word | None:
        """Lexicographically least accepted word ``t`` with ``t[i] in allowed[i]``.

        Backward pass marks the states that can still finish at each depth;
        the forward pass then commits to the least viable symbol per position.
        Linear in ``len(allowed) * |A|``.
        """
        n = len(allowed)
        allowed = [sorted(set(a)) for a in allowed]
        alive = [frozenset()] * (n + 1)
        alive[n] = self.accepting
        for i in range(n - 1, -1, -1):
            nxt = alive[i + 1]
            alive[i] = frozenset(
                s
                for s in range(self.num_states)
                if any(self.delta[s][d] & nxt for d in allowed[i])
            )
        current = self.initial & alive[0]
        if not current:
            return None
        word = []
        for i in range(n):
            for d in allowed[i]:
                nxt = self.step(current, d) & alive[i + 1]
                if nxt:
                    word.append(d)
                    current = nxt
                    break
            else:  # pragma: no cover - alive sets guarantee progress
                raise AssertionError("forward pass lost track of a live state")
        return tuple(word)

    def word_of_length(self, n: int) -> Word | None:
        """Some accepted word of length exactly ``n`` (the least one), or None."""
        return self.find_word([range(self.domain.size)] * n)

    def shortest_word(self) -> Word | None:
        """Lexicographically least among the shortest accepted words."""
        dist = {s: 0 for s in self.initial}
        frontier = sorted(self.initial)
        depth = 0
        while frontier:
            if any(s in self.accepting for s in frontier):
                return self.word_of_length(depth)
            depth += 1
            nxt = []
            for s in frontier:
                for ts in self.delta[s]:
                    for t in ts:
                        if t not in dist:
                            dist[t] = depth
                            nxt.append(t)
            frontier = nxt
        return None

    def is_empty(self) -> bool:
        return not (self.reachable() & self.accepting)

    # -- cycle analyses --------------------------------------------------------

    def _useful_sccs(self) -> list[tuple[set[int], int]]:
        """SCCs of the trimmed determinized graph with their internal edge counts."""
        dfa = self.determinize()
        useful = dfa.useful()
        succ = {
            s: [t for d in dfa.domain for t in dfa.delta[s][d] if t in useful] for s in useful
        }
        comps = _tarjan(sorted(useful), succ)
        out = []
        for comp in comps:
            edges = sum(1 for s in comp for t in succ[s] if t in comp)
            out.append((comp, edges))
        return out

    def is_infinite(self) -> bool:
        """True iff a cycle lies on some accepting path."""
        return any(edges > 0 for _, edges in self._useful_sccs())

    def growth(self) -> Growth:
        """Polynomial vs exponential growth of ``|L(A) ∩ D^n|``.

        In a trimmed DFA distinct paths spell distinct words, so growth is
        exponential iff some strongly connected component carries more edges
        than states, i.e. some state lies on two distinct cycles.
        """
        for comp, edges in self._useful_sccs():
            if edges > len(comp):
                return Growth.EXPONENTIAL
        return Growth.POLYNOMIAL

    def count_words(self, n: int) -> int:
        """``|L(A) ∩ D^n|`` by dynamic programming over the determinized automaton."""
        dfa = self.determinize()
        counts = {dfa.start: 1}
        for _ in range(n):
            nxt: dict[int, int] = {}
            for s, c in counts.items():
                for d in dfa.domain:
                    t = dfa.next_state(s, d)
                    nxt[t] = nxt.get(t, 0) + c
            counts = nxt
        return sum(c for s, c in counts.items() if s in dfa.accepting)

    # -- text format -----------------------------------------------------------

    def to_text(self) -> str:
        lines = [
            "alphabet " + " ".join(self.domain.symbols),
            "states " + " ".join(self.states),
            "initial " + " ".join(self.states[s] for s in sorted(self.initial)),
            "accepting " + " ".join(self.states[s] for s in sorted(self.accepting)),
        ]
        for s, d, t in self.transitions():
            lines.append(f"trans {self.states[s]} {self.domain.symbols[d]} {self.states[t]}")
        return "\n".join(line.rstrip() for line in lines) + "\n"


def _tarjan(nodes: list[int], succ: dict[int, list[int]]) -> list[set[int]]:
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[set[int]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        # iterative DFS; each frame is (node, iterator over successors)
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def parse_automaton(text: str) -> Automaton:
    """Read the line-based automaton format (``alphabet``, ``states``, ``initial``,
    ``accepting``, ``trans``; ``#`` starts a comment)."""
    alphabet = None
    states: list[str] = []
    initial: list[tuple[str, int]] = []
    accepting: list[tuple[str, int]] = []
    trans: list[tuple[str, str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        if key == "alphabet":
            if alphabet is not None:
                raise ParseError("duplicate alphabet line", lineno)
            try:
                alphabet = Domain(tuple(args))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        elif key == "states":
            states.extend(args)
        elif key == "initial":
            initial.extend((a, lineno) for a in args)
        elif key == "accepting":
            accepting.extend((a, lineno) for a in args)
        elif key == "trans":
            if len(args) != 3:
                raise ParseError("trans expects: trans <state> <symbol> <state>", lineno)
            trans.append((*args, lineno))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)
    if alphabet is None:
        raise ParseError("missing alphabet line")
    if not states:
        raise ParseError("empty state set")
    if len(set(states)) != len(states):
        raise ParseError("duplicate state names")
    index = {s: i for i, s in enumerate(states)}

    def state(name, lineno):
        if name not in index:
            raise ParseError(f"undeclared state {name!r}", lineno)
        return index[name]

    if not initial:
        raise ParseError("empty initial set")
    init = [state(s, ln) for s, ln in initial]
    acc = [state(s, ln) for s, ln in accepting]
    edges = []
    for s, d, t, ln in trans:
        if d not in alphabet.symbols:
            raise ParseError(f"undeclared symbol {d!r}", ln)
        edges.append((state(s, ln), alphabet.index(d), state(t, ln)))
    return Automaton(alphabet, states, init, edges, acc)


def build_automaton(
    symbols: Sequence[str],
    states: Sequence[str],
    initial: Iterable[str],
    accepting: Iterable[str],
    transitions: Iterable[tuple[str, str, str]],
) -> Automaton:
    """Convenience constructor from names."""
    domain = Domain(tuple(symbols))
    index = {s: i for i, s in enumerate(states)}
    edges = [(index[s], domain.index(d), index[t]) for s, d, t in transitions]
    return Automaton(
        domain, states, [index[s] for s in initial], edges, [index[s] for s in accepting]
    )
