import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from autcsp.automaton import Automaton, Domain, Growth, build_automaton, parse_automaton
from autcsp.errors import DomainMismatch, ParseError
from autcsp.fixtures import FIXTURES, fixture
from autcsp.generate import random_automaton
from autcsp.oracle import enumerate_relation

from suites import BOOL, TERNARY, random_automata

NAE = fixture("nae")
ODD = fixture("odd")

NAE_TEXT = """\
# words containing both symbols
alphabet 0 1
states s z o b
initial s
accepting b
trans s 0 z
trans s 1 o
trans z 0 z
trans z 1 b
trans o 1 o
trans o 0 b
trans b 0 b
trans b 1 b
"""


def words(domain, n):
    return itertools.product(range(domain.size), repeat=n)


def same_language(a, b, max_len=6):
    return all(a.accepts(w) == b.accepts(w) for n in range(max_len + 1) for w in words(a.domain, n))


def W(text):
    return BOOL.word(text)


automaton_strategy = st.builds(
    lambda seed, ternary: random_automaton(random.Random(seed), TERNARY if ternary else BOOL, 5),
    st.integers(0, 10**6),
    st.booleans(),
)


class TestParse:
    def test_nae_text(self):
        a = parse_automaton(NAE_TEXT)
        assert a.num_states == 4
        assert a.is_deterministic
        assert same_language(a, NAE)
        assert a.accepts(W("010")) and not a.accepts(W("000"))

    def test_empty_state_set(self):
        with pytest.raises(ParseError, match="empty state set"):
            parse_automaton("alphabet 0 1\ninitial q\n")

    def test_undeclared_symbol(self):
        with pytest.raises(ParseError, match="line 4: undeclared symbol"):
            parse_automaton("alphabet 0 1\nstates q\ninitial q\ntrans q 2 q\n")

    def test_undeclared_state(self):
        with pytest.raises(ParseError, match="undeclared state"):
            parse_automaton("alphabet 0 1\nstates q\ninitial q\ntrans q 0 r\n")

    def test_empty_initial(self):
        with pytest.raises(ParseError, match="empty initial set"):
            parse_automaton("alphabet 0 1\nstates q\naccepting q\n")

    def test_unknown_directive(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_automaton("alphabet 0 1\nfoo bar\n")

    def test_nfa_with_two_initial_states(self):
        a = parse_automaton("alphabet a b\nstates p q\ninitial p q\naccepting q\ntrans p a q\n")
        assert not a.is_deterministic
        assert a.accepts(()) and a.accepts((0,)) and not a.accepts((1,))

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_fixture_round_trip(self, name):
        a = fixture(name)
        b = parse_automaton(a.to_text())
        assert b.to_text() == a.to_text()
        assert same_language(a, b)

    def test_size_measure(self):
        assert NAE.size == 4 + 8


class TestAccepts:
    def test_nae_examples(self):
        assert NAE.accepts(W("010"))
        assert not NAE.accepts(W("000"))

    def test_empty_word(self):
        a = build_automaton("01", ["q"], ["q"], ["q"], [])
        assert a.accepts(())
        assert not NAE.accepts(())

    @settings(max_examples=60, derandomize=True, deadline=None)
    @given(automaton_strategy, st.integers(0, 8))
    def test_agrees_with_enumeration(self, a, n):
        if a.domain.size**n > 6561:
            n = 6
        rel = set(enumerate_relation(a, n))
        assert all(a.accepts(w) == (w in rel) for w in words(a.domain, n))


class TestConstructions:
    def test_determinize_deterministic_is_identity(self):
        assert ODD.determinize() is ODD

    def test_determinize_nfa_nae(self):
        # NAE as an NFA: guess a position where the symbol changes
        nfa = build_automaton(
            "01",
            ["s", "z", "o", "f"],
            ["s"],
            ["f"],
            [
                ("s", "0", "s"), ("s", "1", "s"),
                ("s", "0", "z"), ("z", "1", "f"),
                ("s", "1", "o"), ("o", "0", "f"),
                ("f", "0", "f"), ("f", "1", "f"),
            ],
        )  # fmt: skip
        dfa = nfa.determinize()
        assert dfa.is_deterministic
        assert dfa.num_states <= 2**nfa.num_states
        assert same_language(nfa, dfa)
        assert same_language(dfa, NAE)

    def test_unreachable_accepting_state(self):
        a = build_automaton("01", ["s", "f"], ["s"], ["f"], [("s", "0", "s")])
        dfa = a.determinize()
        assert dfa.is_deterministic
        assert all(not dfa.accepts(w) for n in range(7) for w in words(BOOL, n))

    def test_complement_of_nae_at_length_3(self):
        comp = NAE.complement()
        assert sorted(BOOL.format(w) for w in enumerate_relation(comp, 3)) == ["000", "111"]

    def test_intersection_with_complement_is_empty(self):
        assert NAE.intersection(NAE.complement()).is_empty()

    def test_nae_and_odd_at_length_2(self):
        # frozen from enumerating both relations at n = 2
        both = NAE.intersection(ODD)
        assert sorted(BOOL.format(w) for w in enumerate_relation(both, 2)) == ["01", "10"]

    def test_domain_mismatch(self):
        other = build_automaton("ab", ["q"], ["q"], ["q"], [])
        with pytest.raises(DomainMismatch):
            NAE.intersection(other)

    @settings(max_examples=40, derandomize=True, deadline=None)
    @given(automaton_strategy, automaton_strategy)
    def test_boolean_combinations_exact(self, a, b):
        if a.domain != b.domain:
            b = random_automaton(random.Random(b.num_states), a.domain, 5)
        comp = a.complement()
        inter = a.intersection(b)
        for n in range(5 if a.domain.size == 3 else 7):
            for w in words(a.domain, n):
                assert comp.accepts(w) == (not a.accepts(w))
                assert inter.accepts(w) == (a.accepts(w) and b.accepts(w))
                assert a.determinize().accepts(w) == a.accepts(w)

    def test_relabel_is_an_involution(self):
        a = fixture("or")
        assert same_language(a.relabel((1, 0)).relabel((1, 0)), a)


class TestSearches:
    def test_empty_when_accepting_unreachable(self):
        a = build_automaton("01", ["s", "f"], ["s"], ["f"], [("s", "0", "s"), ("s", "1", "s")])
        assert a.is_empty() and a.shortest_word() is None

    def test_nae_shortest_witness(self):
        assert not NAE.is_empty()
        assert BOOL.format(NAE.shortest_word()) == "01"

    def test_odd_shortest_witness(self):
        assert ODD.shortest_word() == (1,)

    def test_words_of_given_length(self):
        assert NAE.word_of_length(1) is None
        assert ODD.word_of_length(1) == (1,)
        assert ODD.word_of_length(0) is None
        assert build_automaton("01", ["q"], ["q"], ["q"], []).word_of_length(0) == ()

    @settings(max_examples=60, derandomize=True, deadline=None)
    @given(automaton_strategy)
    def test_emptiness_matches_bounded_lengths(self, a):
        bound = a.determinize().num_states
        some = any(a.word_of_length(n) is not None for n in range(bound + 1))
        assert a.is_empty() == (not some)


class TestGrowth:
    def test_zero_star_polynomial(self):
        a = build_automaton("01", ["q"], ["q"], ["q"], [("q", "0", "q")])
        assert a.growth() is Growth.POLYNOMIAL
        assert [a.count_words(n) for n in range(5)] == [1, 1, 1, 1, 1]

    def test_odd_exponential(self):
        assert ODD.growth() is Growth.EXPONENTIAL
        assert [ODD.count_words(n) for n in range(1, 13)] == [2 ** (n - 1) for n in range(1, 13)]

    def test_maj_exponential(self):
        a = fixture("maj")
        assert a.growth() is Growth.EXPONENTIAL
        assert [a.count_words(n) for n in range(0, 13, 3)] == [1, 3, 9, 27, 81]

    def test_infinite(self):
        assert NAE.is_infinite()
        single = build_automaton("01", ["a", "b", "c"], ["a"], ["c"], [("a", "0", "b"), ("b", "1", "c")])
        assert not single.is_infinite()
        assert not build_automaton("01", ["a"], ["a"], [], [("a", "0", "a")]).is_infinite()

    def test_growth_agrees_with_counts(self):
        for a in random_automata()[:120]:
            counts = [a.count_words(n) for n in range(13)]
            assert counts[:7] == [len(enumerate_relation(a, n)) for n in range(7)]
            dfa = a.determinize().trim()
            if a.growth() is Growth.POLYNOMIAL:
                assert all(c <= (n + 1) ** max(1, dfa.num_states) for n, c in enumerate(counts))
            else:
                assert a.is_infinite()

    def test_growth_matches_loop_counting(self):
        # independent criterion: exponential iff some useful state has two
        # distinct closed walks of one length (at most |S|^2)
        for a in random_automata():
            dfa = a.determinize().trim()
            n = dfa.num_states
            two_loops = False
            for s in range(n):
                paths = {s: 1}
                for _ in range(n * n):
                    nxt = {}
                    for t, c in paths.items():
                        for d in dfa.domain:
                            for u in dfa.delta[t][d]:
                                nxt[u] = nxt.get(u, 0) + c
                    paths = nxt
                    if paths.get(s, 0) >= 2:
                        two_loops = True
                        break
                if two_loops:
                    break
            assert (a.growth() is Growth.EXPONENTIAL) == two_loops


class TestDomain:
    def test_domain_needs_two_symbols(self):
        with pytest.raises(ValueError):
            Domain(("0",))

    def test_duplicate_symbols(self):
        with pytest.raises(ValueError):
            Domain(("0", "0"))

    def test_empty_initial_rejected(self):
        with pytest.raises(ValueError, match="empty initial set"):
            Automaton(BOOL, ["q"], [], [], [])

    def test_immutable(self):
        with pytest.raises(AttributeError):
            NAE.states = ()
