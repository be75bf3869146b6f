"""Named example automata over {0, 1}.

``A_f`` for each Schaefer operation ``f`` recognizes a language whose only
Schaefer polymorphism is ``f``.
"""

from __future__ import annotations

from typing import Iterable

from autcsp.automaton import Automaton, Domain, build_automaton


def block_language(
    blocks: Iterable[str], prefix: str = "", at_least_one: bool = False, symbols=("0", "1")
) -> Automaton:
    """DFA (completed) for ``prefix (b_1 + ... + b_m)*`` or ``... )+``.

    Blocks must share one length.
    """
    blocks = sorted(set(blocks))
    if len({len(b) for b in blocks}) != 1:
        raise ValueError("blocks must have equal length")
    domain = Domain(tuple(symbols))
    states = ["start"]
    edges: list[tuple[int, int, int]] = []

    def new_state(name):
        states.append(name)
        return len(states) - 1

    current = 0
    for i, c in enumerate(prefix):
        nxt = new_state(f"p{i + 1}")
        edges.append((current, domain.index(c), nxt))
        current = nxt
    hubs = [current]
    if at_least_one:
        hubs.append(new_state("hub"))

    def add_trie(src, dst, tag):
        nodes = {"": src}
        for b in blocks:
            for j in range(1, len(b)):
                if b[:j] not in nodes:
                    nodes[b[:j]] = new_state(f"{tag}{b[:j]}")
                    edges.append((nodes[b[: j - 1]], domain.index(b[j - 1]), nodes[b[:j]]))
            edges.append((nodes[b[:-1]], domain.index(b[-1]), dst))

    if at_least_one:
        add_trie(hubs[0], hubs[1], "a")
        add_trie(hubs[1], hubs[1], "b")
    else:
        add_trie(hubs[0], hubs[0], "b")
    nfa = Automaton(domain, states, [0], edges, [hubs[-1]])
    return nfa.determinize().renamed()


def nae() -> Automaton:
    """Words containing both symbols (complement of ``0* + 1*``)."""
    return build_automaton(
        "01",
        ["s", "z", "o", "b"],
        ["s"],
        ["b"],
        [
            ("s", "0", "z"), ("s", "1", "o"),
            ("z", "0", "z"), ("z", "1", "b"),
            ("o", "1", "o"), ("o", "0", "b"),
            ("b", "0", "b"), ("b", "1", "b"),
        ],
    )  # fmt: skip


def odd() -> Automaton:
    """Words with an odd number of 1s."""
    return build_automaton(
        "01",
        ["even", "odd"],
        ["even"],
        ["odd"],
        [("even", "0", "even"), ("even", "1", "odd"), ("odd", "0", "odd"), ("odd", "1", "even")],
    )


def maj() -> Automaton:
    return block_language(["001", "010", "110"])


def and_() -> Automaton:
    return block_language(
        ["000", "001", "010", "011", "100", "101", "110"], prefix="1", at_least_one=True
    )


def or_() -> Automaton:
    return block_language(
        ["001", "010", "011", "100", "101", "110", "111"], prefix="0", at_least_one=True
    )


def const0() -> Automaton:
    return block_language(["000", "011", "101"])


def const1() -> Automaton:
    return block_language(["111", "100", "010"])


def nae3_star() -> Automaton:
    """``NAE_3*`` where ``NAE_3 = {0,1}^3 minus {000, 111}``."""
    return block_language(["001", "010", "011", "100", "101", "110"])


FIXTURES = {
    "nae": nae,
    "odd": odd,
    "maj": maj,
    "minor": odd,
    "and": and_,
    "or": or_,
    "const0": const0,
    "const1": const1,
    "nae3star": nae3_star,
}

def fixture(name: str) -> Automaton:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None
