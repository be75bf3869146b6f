"""AutCSP instances and the pattern searches every solver builds on."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from autcsp.automaton import Automaton, Domain, Word
from autcsp.errors import ParseError

Assignment = dict[str, int]


@dataclass(frozen=True)
class Constraint:
    """A scope of variables; the relation is ``L(A) ∩ D^len(scope)``."""

    scope: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        if not self.scope:
            raise ValueError("constraint scope must be nonempty")

    @property
    def arity(self) -> int:
        return len(self.scope)

    def positions(self, var: str) -> list[int]:
        return [i for i, v in enumerate(self.scope) if v == var]


@dataclass(frozen=True)
class Instance:
    variables: tuple[str, ...]
    automaton: Automaton
    constraints: tuple[Constraint, ...] = ()
    # unary domain constraints P_x; absent means the whole domain
    domains: Mapping[str, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(
            self,
            "constraints",
            tuple(c if isinstance(c, Constraint) else Constraint(tuple(c)) for c in self.constraints),
        )
        object.__setattr__(
            self, "domains", {x: frozenset(p) for x, p in dict(self.domains).items()}
        )
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        declared = set(self.variables)
        for c in self.constraints:
            for v in c.scope:
                if v not in declared:
                    raise ValueError(f"undeclared variable {v!r} in constraint")
        for x, p in self.domains.items():
            if x not in declared:
                raise ValueError(f"domain constraint on undeclared variable {x!r}")
            if any(not 0 <= d < self.domain.size for d in p):
                raise ValueError(f"domain constraint on {x!r} outside the alphabet")

    @property
    def domain(self) -> Domain:
        return self.automaton.domain

    @property
    def size(self) -> int:
        """``|C|``: total scope length."""
        return sum(c.arity for c in self.constraints)

    def allowed(self, var: str) -> frozenset[int]:
        return self.domains.get(var, frozenset(range(self.domain.size)))

    def with_domains(self, domains: Mapping[str, Iterable[int]]) -> "Instance":
        return Instance(self.variables, self.automaton, self.constraints, domains)

    def with_automaton(self, automaton: Automaton) -> "Instance":
        return Instance(self.variables, automaton, self.constraints, self.domains)

    def to_text(self) -> str:
        sym = self.domain.symbols
        lines = ["vars " + " ".join(self.variables)]
        lines += ["constraint " + " ".join(c.scope) for c in self.constraints]
        for x in self.variables:
            if x in self.domains:
                lines.append(("domain " + x + " " + " ".join(sym[d] for d in sorted(self.domains[x]))).rstrip())
        return "\n".join(lines) + "\n"

    def format_assignment(self, phi: Mapping[str, int]) -> dict[str, str]:
        return {x: self.domain.symbols[phi[x]] for x in self.variables}


def parse_instance(text: str, automaton: Automaton) -> Instance:
    """Read ``vars`` / ``constraint`` / ``domain`` lines; the automaton comes separately."""
    variables: list[str] = []
    constraints: list[Constraint] = []
    domains: dict[str, set[int]] = {}
    pending: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        if key == "vars":
            for v in args:
                if v in variables:
                    raise ParseError(f"duplicate variable {v!r}", lineno)
                variables.append(v)
        elif key == "constraint":
            if not args:
                raise ParseError("constraint with empty scope", lineno)
            pending.append((lineno, args))
            constraints.append(Constraint(tuple(args)))
        elif key == "domain":
            if not args:
                raise ParseError("domain line needs a variable", lineno)
            x, *symbols = args
            try:
                values = {automaton.domain.index(s) for s in symbols}
            except KeyError as exc:
                raise ParseError(str(exc.args[0]), lineno) from None
            # repeated domain lines intersect
            domains[x] = domains[x] & values if x in domains else values
            pending.append((lineno, [x]))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)
    declared = set(variables)
    for lineno, args in pending:
        for v in args:
            if v not in declared:
                raise ParseError(f"undeclared variable {v!r}", lineno)
    return Instance(tuple(variables), automaton, tuple(constraints), domains)


# -- pattern searches ---------------------------------------------------------


def extend_pattern(a: Automaton, n: int, pattern: Mapping[int, int]) -> Word | None:
    """Least accepted word of length ``n`` agreeing with a partial pattern.

    ``pattern`` maps 0-based positions to symbols; unlisted positions are free.
    """
    full = range(a.domain.size)
    allowed = [full] * n
    for i, d in pattern.items():
        if not 0 <= i < n:
            raise IndexError(f"pattern position {i} outside [0, {n})")
        allowed[i] = (d,)
    return a.find_word(allowed)


def extend_set_pattern(a: Automaton, pattern: Sequence[Iterable[int]]) -> Word | None:
    """Least accepted word ``t`` with ``t[i]`` in ``pattern[i]`` for every position."""
    return a.find_word(pattern)


def verify(instance: Instance, phi: Mapping[str, int]) -> bool:
    """Every scope image accepted and every declared domain constraint respected."""
    for x in instance.variables:
        if x not in phi:
            return False
        if x in instance.domains and phi[x] not in instance.domains[x]:
            return False
    a = instance.automaton
    return all(a.accepts(tuple(phi[v] for v in c.scope)) for c in instance.constraints)
