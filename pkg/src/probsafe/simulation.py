"""Strong simulation on Markov chain states and logical spot checks.

A pair ``(s, t)`` is in the coarsest strong simulation when the labels
agree and the successor distributions admit a weight function with respect
to the relation. Weight functions are found as exact rational maximum
flows, so "the flow equals one" is an exact test.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .formula import (
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
    eventually,
    literal_sat,
    negate,
)
from .modelcheck import sat_states

ZERO = Fraction(0)
ONE = Fraction(1)
SAMPLE_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


def _as_dist(mu):
    items = mu.items() if hasattr(mu, "items") else mu
    d = {}
    for s, p in items:
        p = Fraction(p)
        if p < 0:
            raise ValueError(f"negative probability {p} for {s!r}")
        if p:
            d[s] = d.get(s, ZERO) + p
    if sum(d.values(), ZERO) != 1:
        raise ValueError("not a probability distribution: masses do not sum to 1")
    return d


def _max_flow(cap, source, sink):
    """Edmonds-Karp on a dict-of-dicts capacity graph; mutates ``cap`` into residuals."""
    total = ZERO
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v, c in cap[u].items():
                if c > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return total
        bottleneck = None
        v = sink
        while parent[v] is not None:
            u = parent[v]
            c = cap[u][v]
            bottleneck = c if bottleneck is None else min(bottleneck, c)
            v = u
        v = sink
        while parent[v] is not None:
            u = parent[v]
            cap[u][v] -= bottleneck
            cap[v][u] = cap[v].get(u, ZERO) + bottleneck
            v = u
        total += bottleneck


def weight_function_exists(mu1, mu2, r):
    """A weight function for ``mu1``, ``mu2`` w.r.t. relation ``r``, or None.

    The result maps ``(s, t)`` to the mass moved from ``s`` to ``t``; its
    row sums equal ``mu1``, its column sums equal ``mu2`` and it is
    positive only on pairs of ``r``.
    """
    mu1, mu2 = _as_dist(mu1), _as_dist(mu2)
    src, snk = ("src",), ("snk",)
    cap = {src: {}, snk: {}}
    for s, p in mu1.items():
        cap[src][("l", s)] = p
        cap.setdefault(("l", s), {})
    for t, p in mu2.items():
        cap.setdefault(("r", t), {})[snk] = p
    middle = []
    for s in mu1:
        for t in mu2:
            if (s, t) in r:
                cap[("l", s)][("r", t)] = ONE
                middle.append((s, t))
    if _max_flow(cap, src, snk) != 1:
        return None
    delta = {}
    for s, t in middle:
        moved = ONE - cap[("l", s)][("r", t)]
        if moved > 0:
            delta[(s, t)] = moved
    return delta


@dataclass(frozen=True)
class SimulationRelation:
    pairs: frozenset

    def __contains__(self, pair):
        return tuple(pair) in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def to_text(self):
        return "".join(f"{s} ≾ {t}\n" for s, t in sorted(self.pairs))


def strong_simulation(mc):
    """Coarsest strong simulation on the states of ``mc`` (greatest fixpoint)."""
    rel = {(s, t) for s in mc.states for t in mc.states if mc.labels[s] == mc.labels[t]}
    dists = [mc.dist(s) for s in mc.states]
    changed = True
    while changed:
        changed = False
        for s, t in sorted(rel):
            if s == t:
                continue
            if weight_function_exists(dists[s], dists[t], rel) is None:
                rel.discard((s, t))
                changed = True
    return SimulationRelation(frozenset(rel))


def is_strong_simulation(mc, pairs):
    pairs = set(pairs)
    for s, t in pairs:
        if mc.labels[s] != mc.labels[t]:
            return False
        if weight_function_exists(mc.dist(s), mc.dist(t), pairs) is None:
            return False
    return True


# -- formula samplers ------------------------------------------------------------


def _literal(rng, ap):
    ap = sorted(ap) or ["p"]
    roll = rng.random()
    a = Atom(rng.choice(ap))
    if roll < 0.4:
        return a
    if roll < 0.7:
        return Not(a)
    b = Atom(rng.choice(ap))
    b = b if rng.random() < 0.5 else Not(b)
    return And(a, b) if roll < 0.85 else Or(a, b)


def sample_safe(rng, ap, depth=3, grid=SAMPLE_GRID):
    """Random formula built by the safe-fragment rules."""
    if depth == 0 or rng.random() < 0.25:
        return _literal(rng, ap)
    q = rng.choice(grid)
    d = depth - 1
    kind = rng.randrange(5)
    if kind == 0:
        return Prob(Cmp.GE, q, Next(sample_safe(rng, ap, d, grid)))
    if kind == 1:
        return And(sample_safe(rng, ap, d, grid), sample_safe(rng, ap, d, grid))
    if kind == 2:
        return Or(sample_safe(rng, ap, d, grid), sample_safe(rng, ap, d, grid))
    if kind == 3:
        return Prob(Cmp.GE, q, WeakUntil(sample_safe(rng, ap, d, grid), sample_safe(rng, ap, d, grid)))
    lhs = negate(sample_safe(rng, ap, d, grid))
    rhs = negate(sample_safe(rng, ap, d, grid))
    return Prob(Cmp.LE, q, Until(lhs, rhs))


def _sat_literal(rng, ap):
    while True:
        lit = _literal(rng, ap)
        if literal_sat(lit):
            return lit


def sample_live(rng, ap, depth=3, grid=SAMPLE_GRID):
    """Random formula built by the rules of the smaller live fragment."""
    q = rng.choice(grid)
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.15:
            return TOP
        return Prob(Cmp.GE, q, eventually(_sat_literal(rng, ap)))
    d = depth - 1
    kind = rng.randrange(6)
    live = sample_live(rng, ap, d, grid)
    other = sample_safe(rng, ap, d, grid) if rng.random() < 0.5 else sample_live(rng, ap, d, grid)
    if kind == 0:
        return And(live, sample_live(rng, ap, d, grid))
    if kind == 1:
        return Or(live, other) if rng.random() < 0.5 else Or(other, live)
    if kind == 2:
        path = WeakUntil(live, other) if rng.random() < 0.5 else WeakUntil(other, live)
        return Prob(Cmp.GE, q, path)
    if kind == 3:
        return Prob(Cmp.GE, q, Next(live))
    return Prob(Cmp.GE, q, Until(other, live))


SAMPLERS = {"safe": sample_safe, "live_lt": sample_live}


@dataclass
class SpotCheckReport:
    fragment: str
    formulas: int
    pairs: int
    violations: list = field(default_factory=list)  # (formula, s1, s2)

    @property
    def ok(self):
        return not self.violations


def logical_preorder_spotcheck(mc, fragment="safe", samples=50, seed=0, depth=3, relation=None):
    """Check sampled formulas respect the simulation preorder.

    For a related pair ``(s1, s2)``: safe formulas true at ``s2`` must hold
    at ``s1``, and live formulas true at ``s1`` must hold at ``s2``.
    """
    if fragment not in SAMPLERS:
        raise ValueError(f"unknown fragment {fragment!r}")
    rel = relation if relation is not None else strong_simulation(mc)
    rng = random.Random(seed)
    ap = sorted(mc.ap) or ["p"]
    report = SpotCheckReport(fragment, samples, len(rel))
    for _ in range(samples):
        phi = SAMPLERS[fragment](rng, ap, depth)
        sat = sat_states(mc, phi)
        for s1, s2 in rel:
            if fragment == "safe":
                bad = s2 in sat and s1 not in sat
            else:
                bad = s1 in sat and s2 not in sat
            if bad:
                report.violations.append((phi, s1, s2))
    return report


__all__ = [
    "weight_function_exists",
    "SimulationRelation",
    "strong_simulation",
    "is_strong_simulation",
    "sample_safe",
    "sample_live",
    "SpotCheckReport",
    "logical_preorder_spotcheck",
]
