"""Shared fixtures, corpora and independent oracles for the test suite."""

import itertools
import random
from fractions import Fraction

import numpy as np

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
    eval_literal,
)
from probsafe.markov import MarkovChain, random_corpus
from probsafe.trees import load_tree

# -- fixture chains -----------------------------------------------------------------


def split_chain():
    """s0 (a) -> 0.5 s1 (a), 0.5 s2 (c); s1, s2 absorbing."""
    return MarkovChain.build([{"a"}, {"a"}, {"c"}], [{1: "1/2", 2: "1/2"}, {1: 1}, {2: 1}], ap={"a", "b", "c"})


def split_chain_b():
    """split_chain with s1 labelled b instead of a."""
    return MarkovChain.build([{"a"}, {"b"}, {"c"}], [{1: "1/2", 2: "1/2"}, {1: 1}, {2: 1}], ap={"a", "b", "c"})


def looping_chain():
    """t0 (a) -> 0.2 t0, 0.4 t1 (b), 0.4 t2 (c); t1, t2 absorbing."""
    return MarkovChain.build([{"a"}, {"b"}, {"c"}], [{0: "0.2", 1: "0.4", 2: "0.4"}, {1: 1}, {2: 1}])


def dirac_cycle():
    """s1 (a) <-> s2 (no labels) with probability one."""
    return MarkovChain.build([{"a"}, set()], [{1: 1}, {0: 1}], ap={"a"})


SMALL_TREE = """\
(1,a)
0.0: 0.5 b
0.1: 0.5 c
0.0.0: 0.4 d
0.0.1: 0.6 e
0.1.0: 1 d
"""


def small_tree():
    return load_tree(SMALL_TREE)


# -- corpora -------------------------------------------------------------------------


def corpus(count, seed=0, max_states=8, ap=("a", "b", "c"), degree=3):
    return random_corpus(count, seed=seed, max_states=max_states, ap=ap, max_out_degree=degree)


def random_literal(rng, ap=("a", "b", "c"), depth=1):
    if depth == 0 or rng.random() < 0.5:
        roll = rng.random()
        if roll < 0.05:
            return TOP
        if roll < 0.08:
            return BOT
        a = Atom(rng.choice(ap))
        return a if rng.random() < 0.6 else Not(a)
    op = And if rng.random() < 0.5 else Or
    return op(random_literal(rng, ap, depth - 1), random_literal(rng, ap, depth - 1))


def random_flat_prob(rng, ap=("a", "b", "c"), grid=(0, "1/4", "1/3", "1/2", "3/4", 1)):
    cmp = rng.choice([Cmp.LE, Cmp.GE])
    q = Fraction(rng.choice(grid))
    kind = rng.randrange(3)
    if kind == 0:
        path = Next(random_literal(rng, ap))
    elif kind == 1:
        path = Until(random_literal(rng, ap), random_literal(rng, ap))
    else:
        path = WeakUntil(random_literal(rng, ap), random_literal(rng, ap))
    return Prob(cmp, q, path)


def random_flat_clause(rng, ap=("a", "b", "c"), width=3):
    """Disjunction of literals and flat probability operators."""
    parts = []
    for _ in range(rng.randint(1, width)):
        parts.append(random_literal(rng, ap) if rng.random() < 0.3 else random_flat_prob(rng, ap))
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def random_flat(rng, ap=("a", "b", "c"), depth=2):
    """Arbitrary flat formula: and/or trees over literals and flat operators."""
    if depth == 0 or rng.random() < 0.35:
        return random_literal(rng, ap) if rng.random() < 0.25 else random_flat_prob(rng, ap)
    op = And if rng.random() < 0.5 else Or
    return op(random_flat(rng, ap, depth - 1), random_flat(rng, ap, depth - 1))


# -- independent numerical oracles ---------------------------------------------------


def _matrix(mc):
    m = np.zeros((mc.n, mc.n))
    for s, row in enumerate(mc.trans):
        for t, p in row:
            m[s, t] = float(p)
    return m


def float_until(mc, s1, s2, iterations=4000, weak=False):
    """Value iteration in floats: least fixpoint for U, greatest for W."""
    m = _matrix(mc)
    in1 = np.array([s in s1 and s not in s2 for s in mc.states], dtype=float)
    in2 = np.array([s in s2 for s in mc.states], dtype=float)
    x = np.maximum(in1, in2) if weak else in2.copy()
    for _ in range(iterations):
        x = in2 + in1 * (m @ x)
    return x


def literal_states(mc, lit):
    return {s for s in mc.states if eval_literal(lit, mc.labels[s])}


def bounded_until_mass(mc, s1, s2, depth):
    """Mass of paths from init of length <= depth satisfying s1 U s2 (exact)."""
    total = Fraction(0)
    frontier = {(mc.init,): Fraction(1)}
    for _ in range(depth + 1):
        nxt = {}
        for pi, p in frontier.items():
            last = pi[-1]
            if last in s2:
                total += p
            elif last in s1:
                for t, q in mc.trans[last]:
                    nxt[pi + (t,)] = p * q
        frontier = nxt
    return total


def monte_carlo_until(mc, s1, s2, runs=20000, horizon=400, seed=0):
    rng = random.Random(seed)
    succ = [[t for t, _ in row] for row in mc.trans]
    wts = [[float(p) for _, p in row] for row in mc.trans]
    hits = 0
    for _ in range(runs):
        s = mc.init
        for _ in range(horizon):
            if s in s2:
                hits += 1
                break
            if s not in s1:
                break
            s = rng.choices(succ[s], wts[s])[0]
    return hits / runs


# -- brute-force simulation oracle ---------------------------------------------------


def hall_condition(mu1, mu2, rel):
    """Weight function exists iff mu1(A) <= mu2(R(A)) for every A in supp(mu1)."""
    supp = sorted(mu1)
    for k in range(1, len(supp) + 1):
        for subset in itertools.combinations(supp, k):
            image = {t for t in mu2 if any((s, t) in rel for s in subset)}
            if sum(mu1[s] for s in subset) > sum((mu2[t] for t in image), Fraction(0)):
                return False
    return True


def is_simulation_by_hall(mc, rel):
    for s, t in rel:
        if mc.labels[s] != mc.labels[t]:
            return False
        if not hall_condition(mc.dist(s), mc.dist(t), rel):
            return False
    return True


def brute_force_simulation(mc):
    """Union of every simulation containing the identity, by subset enumeration."""
    diag = {(s, s) for s in mc.states}
    cands = [(s, t) for s in mc.states for t in mc.states if s != t and mc.labels[s] == mc.labels[t]]
    best = set(diag)
    for k in range(len(cands) + 1):
        for subset in itertools.combinations(cands, k):
            rel = diag | set(subset)
            if set(subset) <= best:
                continue
            if is_simulation_by_hall(mc, rel):
                best |= rel
    return best


def off_diagonal_candidates(mc):
    return sum(1 for s in mc.states for t in mc.states if s != t and mc.labels[s] == mc.labels[t])
