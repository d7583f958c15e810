import math

import numpy as np
import pytest

from synstate.earley import (
    EarleyParser,
    InconsistentGrammarError,
    build_closures,
    complete_probability,
    prefix_probability,
    surprisals_from_chart,
    word_surprisals,
)
from synstate.grammar import make_pcfg

from oracles import (
    enumerate_language,
    oracle_prefix_probability,
    oracle_surprisals,
    random_grammar_suite,
    sample_test_strings,
)


def g_det():
    return make_pcfg("S", [("S", ("a", "b"), 1.0)])


def g_two():
    return make_pcfg("S", [("S", ("a", "a"), 0.5), ("S", ("a", "b"), 0.5)])


def g_leftrec():
    return make_pcfg("S", [("S", ("S", "a"), 0.5), ("S", ("a",), 0.5)])


# -- closures ---------------------------------------------------------------


def test_closures_identity_without_left_corners():
    # Every rule starts with a terminal, so both closures are the identity.
    g = make_pcfg("S", [("S", ("a", "A"), 1.0), ("A", ("b",), 1.0)])
    c = build_closures(g)
    assert np.allclose(c.left_corner, np.eye(2))
    assert np.allclose(c.unit, np.eye(2))


def test_left_corner_geometric_series():
    c = build_closures(g_leftrec())
    i = c.index[g_leftrec().start]
    assert c.left_corner[i, i] == pytest.approx(2.0)  # 1 / (1 - 0.5)


def test_unit_cycle_probability_one_rejected():
    g = make_pcfg("S", [("S", ("A",), 1.0), ("A", ("S",), 1.0)])
    with pytest.raises(InconsistentGrammarError):
        build_closures(g)


# -- prefix probabilities ----------------------------------------------------


def test_prefix_deterministic():
    assert prefix_probability(g_det(), ["a"]) == pytest.approx(1.0)


def test_prefix_two_way():
    assert prefix_probability(g_two(), ["a", "b"]) == pytest.approx(0.5)


def test_prefix_left_recursive():
    # strings a^k have mass 0.5^k; those starting "a a" sum to 0.5
    assert prefix_probability(g_leftrec(), ["a", "a"]) == pytest.approx(0.5)


def test_prefix_underivable_is_zero():
    assert prefix_probability(g_det(), ["b"]) == 0.0
    assert complete_probability(g_det(), ["a"]) == 0.0


# -- word surprisals ----------------------------------------------------------


def test_surprisals_deterministic():
    surps, eos = word_surprisals(g_det(), ["a", "b"])
    assert surps == [0.0, 0.0] and eos == 0.0


def test_surprisals_two_way():
    surps, eos = word_surprisals(g_two(), ["a", "b"])
    assert surps == pytest.approx([0.0, 1.0])
    assert eos == pytest.approx(0.0)


def test_surprisals_left_recursive():
    surps, eos = word_surprisals(g_leftrec(), ["a", "a"])
    assert surps == pytest.approx([0.0, 1.0])
    assert eos == pytest.approx(1.0)


def test_surprisals_infinite_tail():
    surps, eos = word_surprisals(g_det(), ["a", "a", "b"])
    assert surps[0] == 0.0
    assert surps[1] == float("inf") and surps[2] == float("inf")
    assert eos == float("inf")


# -- oracle equivalence and invariants ----------------------------------------


@pytest.fixture(scope="module")
def grammar_suite():
    return random_grammar_suite(seed=977, n_grammars=24)


def test_oracle_equivalence_random_grammars(grammar_suite):
    rng = np.random.default_rng(7)
    for pcfg, strings in grammar_suite:
        parser = EarleyParser(pcfg)
        for s in sample_test_strings(strings, rng):
            log_prefix, log_complete = parser.chart(list(s))
            for k in range(1, len(s) + 1):
                got = 2.0 ** log_prefix[k] if log_prefix[k] != -math.inf else 0.0
                want = oracle_prefix_probability(strings, s[:k])
                assert got == pytest.approx(want, abs=1e-9)
            got_c = 2.0 ** log_complete[len(s)] if log_complete[len(s)] != -math.inf else 0.0
            assert got_c == pytest.approx(strings[s], abs=1e-9)


def test_prefix_monotone_and_chain_rule(grammar_suite):
    rng = np.random.default_rng(8)
    for pcfg, strings in grammar_suite[:12]:
        parser = EarleyParser(pcfg)
        for s in sample_test_strings(strings, rng, n_top=3, n_random=2):
            log_prefix, log_complete = parser.chart(list(s))
            for prev, cur in zip(log_prefix, log_prefix[1:]):
                assert cur <= prev + 1e-9
            surps, eos = surprisals_from_chart(log_prefix, log_complete)
            total = sum(surps) + eos
            assert total == pytest.approx(-log_complete[len(s)], abs=1e-9)


def test_finite_language_total_probability_one():
    g = make_pcfg(
        "S",
        [
            ("S", ("A", "B"), 0.7),
            ("S", ("b",), 0.3),
            ("A", ("a",), 0.25),
            ("A", ("c",), 0.75),
            ("B", ("b", "c"), 1.0),
        ],
    )
    strings, lost = enumerate_language(g)
    assert lost == 0.0
    total = sum(complete_probability(g, list(s)) for s in strings)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_unit_chain_through_closure():
    g = make_pcfg(
        "S",
        [
            ("S", ("A",), 0.4),
            ("S", ("a", "A"), 0.6),
            ("A", ("B",), 0.5),
            ("A", ("b",), 0.5),
            ("B", ("c",), 1.0),
        ],
    )
    # P(c) = 0.4*0.5 = 0.2; P(b) = 0.4*0.5; P(a b) = 0.6*0.5; P(a c) = 0.6*0.5
    assert complete_probability(g, ["c"]) == pytest.approx(0.2, abs=1e-12)
    assert complete_probability(g, ["a", "c"]) == pytest.approx(0.3, abs=1e-12)
    assert prefix_probability(g, ["a"]) == pytest.approx(0.6, abs=1e-12)
