import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import corpus, random_flat, random_literal
from probsafe.errors import BoundOutOfRange, NotFlat, NotLiteral, SizeLimitExceeded, StrictBoundError
from probsafe.formula import (
    BOT,
    TOP,
    And,
    Atom,
    Cmp,
    Next,
    Not,
    Or,
    Prob,
    Until,
    WeakUntil,
    atoms,
    dual,
    eventually,
    flat_outer_cnf,
    globally,
    is_cnf_conjunct,
    is_flat,
    is_literal,
    is_pnf,
    literal_sat,
    literal_valid,
    negate,
    to_pnf,
)
from probsafe.modelcheck import sat_states

a, b, c = Atom("a"), Atom("b"), Atom("c")
CHAINS = corpus(25, seed=101, max_states=6)


def random_state(rng, depth=3):
    """Arbitrary (not necessarily PNF) state formula."""
    if depth == 0 or rng.random() < 0.3:
        return random_literal(rng)
    kind = rng.randrange(6)
    d = depth - 1
    if kind == 0:
        return Not(random_state(rng, d))
    if kind == 1:
        return And(random_state(rng, d), random_state(rng, d))
    if kind == 2:
        return Or(random_state(rng, d), random_state(rng, d))
    cmp = rng.choice(list(Cmp))
    q = Fraction(rng.randrange(5), 4)
    if kind == 3:
        return Prob(cmp, q, Next(random_state(rng, d)))
    path = Until if kind == 4 else WeakUntil
    return Prob(cmp, q, path(random_state(rng, d), random_state(rng, d)))


@given(st.integers(0, 10**6))
def test_pnf_is_pnf_and_idempotent(seed):
    phi = random_state(random.Random(seed))
    p = to_pnf(phi)
    assert is_pnf(p)
    assert to_pnf(p) == p


@given(st.integers(0, 10**6))
def test_pnf_and_negation_preserve_semantics(seed):
    phi = random_state(random.Random(seed))
    for mc in CHAINS[:8]:
        sat = sat_states(mc, phi)
        assert sat_states(mc, to_pnf(phi)) == sat
        assert sat_states(mc, negate(phi)) == set(mc.states) - sat


@given(st.integers(0, 10**6))
def test_dual_is_equivalent(seed):
    rng = random.Random(seed)
    cmp = rng.choice(list(Cmp))
    q = Fraction(rng.randrange(5), 4)
    path = rng.choice([Until, WeakUntil])(random_literal(rng), random_literal(rng))
    phi = Prob(cmp, q, path)
    d = dual(phi)
    assert type(d.path) is not type(path)
    for mc in CHAINS:
        assert sat_states(mc, d) == sat_states(mc, phi)


def test_dual_rejects_next():
    with pytest.raises(ValueError):
        dual(Prob(Cmp.GE, Fraction(1, 2), Next(a)))


def test_bound_out_of_range():
    with pytest.raises(BoundOutOfRange):
        Prob(Cmp.GE, Fraction(3, 2), Next(a))
    with pytest.raises(BoundOutOfRange):
        Prob(Cmp.GE, -1, Next(a))


def test_derived_operators():
    assert eventually(a) == Until(TOP, a)
    g = globally(a)
    assert g == WeakUntil(a, BOT)


def test_literals():
    assert is_literal(And(a, Or(Not(b), TOP)))
    assert not is_literal(Prob(Cmp.GE, 0, Next(a)))
    assert literal_sat(And(a, Not(b)))
    assert not literal_sat(And(a, Not(a)))
    assert literal_valid(Or(a, Not(a)))
    assert not literal_valid(a)
    with pytest.raises(NotLiteral):
        literal_sat(Prob(Cmp.GE, 0, Next(a)))


def test_atoms():
    assert atoms(Prob(Cmp.GE, 0, Until(a, And(b, Not(c))))) == {"a", "b", "c"}


def test_flatness():
    flat = Or(a, Prob(Cmp.LE, Fraction(1, 2), Until(a, b)))
    assert is_flat(flat)
    assert is_flat(a)
    nested = Prob(Cmp.GE, 1, Next(Prob(Cmp.GE, 1, Next(a))))
    assert not is_flat(nested)
    assert not is_flat(Prob(Cmp.GT, Fraction(1, 2), Next(a)))
    with pytest.raises(StrictBoundError):
        flat_outer_cnf(Prob(Cmp.GT, Fraction(1, 2), Next(a)))
    with pytest.raises(NotFlat):
        flat_outer_cnf(nested)


@given(st.integers(0, 10**6))
def test_outer_cnf_equivalent(seed):
    phi = random_flat(random.Random(seed))
    conjuncts = flat_outer_cnf(phi)
    assert conjuncts and all(is_cnf_conjunct(k) for k in conjuncts)
    for mc in CHAINS[:10]:
        both = set(mc.states)
        for k in conjuncts:
            both &= sat_states(mc, k)
        assert both == sat_states(mc, phi)


def test_outer_cnf_budget():
    p = [Prob(Cmp.GE, Fraction(1, 2), Next(Atom(f"p{i}"))) for i in range(12)]
    phi = p[0]
    for i in range(1, 12, 2):
        phi = Or(phi, And(p[i], p[i + 1] if i + 1 < 12 else p[0]))
    with pytest.raises(SizeLimitExceeded):
        flat_outer_cnf(phi, budget=50)
    assert len(flat_outer_cnf(phi)) == 64
