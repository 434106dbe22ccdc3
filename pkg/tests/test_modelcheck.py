import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import (
    bounded_until_mass,
    corpus,
    split_chain,
    looping_chain,
    float_until,
    literal_states,
    monte_carlo_until,
    random_literal,
)
from probsafe.formula import Atom
from probsafe.markov import MarkovChain
from probsafe.modelcheck import (
    check,
    ctl_check,
    prob_next,
    prob_until,
    prob_weak_until,
    sat_states,
    solve_sparse,
)
from probsafe.parser import parse_ctl, parse_formula

CHAINS = corpus(60, seed=201, max_states=8)


def test_fixture_values():
    assert prob_until(looping_chain(), {0}, {1}) == (Fraction(1, 2), 1, 0)
    assert prob_until(split_chain(), {0, 1}, set())[0] == 0
    assert check(looping_chain(), parse_formula("P<=0.5[a U b]"))
    assert not check(looping_chain(), parse_formula("P<0.5[a U b]"))
    assert check(split_chain(), parse_formula("P>=0.5[G a]"))


@given(st.integers(0, 10**6))
def test_until_against_value_iteration(seed):
    rng = random.Random(seed)
    mc = CHAINS[rng.randrange(len(CHAINS))]
    s1 = literal_states(mc, random_literal(rng))
    s2 = literal_states(mc, random_literal(rng))
    exact_u = prob_until(mc, s1, s2)
    exact_w = prob_weak_until(mc, s1, s2)
    approx_u = float_until(mc, s1, s2)
    approx_w = float_until(mc, s1, s2, weak=True)
    for s in mc.states:
        assert abs(float(exact_u[s]) - approx_u[s]) < 1e-6
        assert abs(float(exact_w[s]) - approx_w[s]) < 1e-6
        assert exact_u[s] <= exact_w[s]


@given(st.integers(0, 10**6))
def test_bounded_mass_is_a_lower_bound(seed):
    rng = random.Random(seed)
    mc = CHAINS[rng.randrange(len(CHAINS))]
    s1 = literal_states(mc, random_literal(rng))
    s2 = literal_states(mc, random_literal(rng))
    p = prob_until(mc, s1, s2)[mc.init]
    prev = Fraction(0)
    for depth in range(6):
        m = bounded_until_mass(mc, s1, s2, depth)
        assert prev <= m <= p
        prev = m


@pytest.mark.slow
def test_until_against_monte_carlo():
    rng = random.Random(7)
    for mc in CHAINS[:10]:
        s1 = literal_states(mc, random_literal(rng))
        s2 = literal_states(mc, random_literal(rng))
        est = monte_carlo_until(mc, s1, s2, runs=8000)
        assert abs(est - float(prob_until(mc, s1, s2)[mc.init])) < 0.03


def test_next_and_complement():
    mc = looping_chain()
    assert prob_next(mc, {1}) == (Fraction(2, 5), 1, 0)
    phi = parse_formula("P>=0.4[X b]")
    assert sat_states(mc, phi) == {0, 1}
    assert sat_states(mc, parse_formula("!P>=0.4[X b]")) == {2}


def test_probabilities_are_exact_rationals():
    for mc in CHAINS[:20]:
        for v in prob_until(mc, set(mc.states), literal_states(mc, Atom("a"))):
            assert isinstance(v, Fraction)
            assert 0 <= v <= 1


def test_solver():
    # x0 = 1/2 x1 + 1/2 ; x1 = 1/3 x0
    rows = {0: {0: 1, 1: Fraction(-1, 2)}, 1: {1: 1, 0: Fraction(-1, 3)}}
    sol = solve_sparse(rows, {0: Fraction(1, 2), 1: 0})
    assert sol == {0: Fraction(3, 5), 1: Fraction(1, 5)}


def test_nested_operators():
    phi = parse_formula("P>=1[F P>=1[G c]]")
    assert sat_states(looping_chain(), phi) == {2}
    assert sat_states(split_chain(), parse_formula("P>0[X P>=1[G a]]")) == {0, 1}


def test_ctl_on_fixtures():
    mc = looping_chain()
    assert ctl_check(mc, parse_ctl("EF b")) == {0, 1}
    assert ctl_check(mc, parse_ctl("AF (b | c)")) == {1, 2}
    assert ctl_check(mc, parse_ctl("EG a")) == {0}
    assert ctl_check(mc, parse_ctl("AG c")) == {2}
    assert ctl_check(mc, parse_ctl("E[a U c]")) == {0, 2}


def test_qualitative_until_matches_graph():
    for mc in CHAINS:
        for query, pctl in [("EF b", "P>0[F b]"), ("E[a U c]", "P>0[a U c]"), ("AG a", "P>=1[G a]")]:
            assert ctl_check(mc, parse_ctl(query)) == sat_states(mc, parse_formula(pctl))
    loop = MarkovChain.build([set(), {"a"}], [{0: "1/2", 1: "1/2"}, {1: 1}], ap={"a"})
    assert 0 in sat_states(loop, parse_formula("P>=1[F a]"))
    assert 0 not in ctl_check(loop, parse_ctl("AF a"))
