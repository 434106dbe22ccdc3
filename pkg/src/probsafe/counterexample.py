"""Finite counterexamples for violated flat safety formulas.

A violated ``P<=q[a U b]`` is witnessed by finitely many finite paths that
satisfy ``a U b`` and together carry mass above ``q``. Paths are found
best-first, highest cylinder probability first.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .errors import DepthBudgetExceeded, UnsupportedShape
from .formula import And, Cmp, Next, Or, Prob, Until, WeakUntil, dual, eval_literal, is_literal, negate
from .modelcheck import _backward_reach, check
from .parser import print_formula
from .rational import format_rational

DEFAULT_DEPTH_BUDGET = 50
DEFAULT_EXPANSION_BUDGET = 2_000_000


@dataclass(frozen=True)
class FiniteCounterexample:
    """Paths refuting ``formula``.

    ``formula`` is a ``P<=q[..]`` over literals, refuted by paths of total
    mass above ``q``, or a literal, refuted by the one-state path at the
    initial state (mass 1). ``original`` is the formula the caller asked
    about when it differs (a conjunction, a weak-until or a lower-bounded
    next).
    """

    formula: object
    paths: tuple
    mass: Fraction
    original: object = None

    def to_text(self):
        if is_literal(self.formula):
            return f"counterexample for {print_formula(self.formula)}: initial state {self.paths[0][0]} violates it\n"
        head = f"counterexample for {print_formula(self.formula)}: mass {format_rational(self.mass)}"
        if self.original is not None and self.original != self.formula:
            head += f" (refutes {print_formula(self.original)})"
        return head + "\n" + "".join(" ".join(str(s) for s in p) + "\n" for p in self.paths)

    def to_dict(self):
        return {
            "formula": print_formula(self.formula),
            "mass": str(self.mass),
            "paths": [list(p) for p in self.paths],
        }


@dataclass(frozen=True)
class DisjunctiveCounterexample:
    """One counterexample per disjunct of a violated disjunction."""

    formula: object
    parts: tuple

    def to_text(self):
        head = f"counterexample for {print_formula(self.formula)}: every disjunct is refuted\n"
        return head + "".join(p.to_text() for p in self.parts)

    def to_dict(self):
        return {"formula": print_formula(self.formula), "parts": [p.to_dict() for p in self.parts]}


def _target(phi):
    """The violated ``P<=q`` formula to search for, or raise UnsupportedShape."""
    if not isinstance(phi, Prob):
        raise UnsupportedShape(f"no finite counterexample shape for {print_formula(phi)}")
    if phi.cmp.strict:
        raise UnsupportedShape("strict bounds have no finite counterexamples")
    path = phi.path
    if isinstance(path, Next):
        if not is_literal(path.arg):
            raise UnsupportedShape("next operand must be a literal")
        if phi.cmp is Cmp.GE:
            return Prob(Cmp.LE, 1 - phi.q, Next(negate(path.arg)))
        return phi
    if not (is_literal(path.lhs) and is_literal(path.rhs)):
        raise UnsupportedShape("until/weak-until operands must be literals")
    if isinstance(path, Until) and phi.cmp is Cmp.LE:
        return phi
    if isinstance(path, WeakUntil) and phi.cmp is Cmp.GE:
        return dual(phi)
    raise UnsupportedShape(f"{print_formula(phi)} is not a safety shape with finite counterexamples")


def find_counterexample(mc, phi, depth_budget=DEFAULT_DEPTH_BUDGET, expansion_budget=DEFAULT_EXPANSION_BUDGET):
    """Finite evidence that ``mc`` violates ``phi``, or None when it holds.

    Conjunctions are refuted through their first violated conjunct and
    disjunctions through a counterexample for each disjunct.
    """
    if check(mc, phi):
        return None
    return _refute(mc, phi, depth_budget, expansion_budget)


def _refute(mc, phi, depth_budget, expansion_budget):
    original = phi
    while isinstance(phi, And):
        phi = phi.left if not check(mc, phi.left) else phi.right
    if is_literal(phi):
        return FiniteCounterexample(phi, ((mc.init,),), Fraction(1), None if original == phi else original)
    if isinstance(phi, Or):
        parts = []
        stack = [phi]
        while stack:
            f = stack.pop()
            if isinstance(f, Or) and not is_literal(f):
                stack.extend((f.right, f.left))
            else:
                parts.append(_refute(mc, f, depth_budget, expansion_budget))
        return DisjunctiveCounterexample(original, tuple(parts))
    target = _target(phi)
    paths, mass = _search(mc, target, depth_budget, expansion_budget)
    return FiniteCounterexample(target, tuple(paths), mass, None if original == target else original)


def _search(mc, target, depth_budget, expansion_budget):
    path = target.path
    labels = mc.labels
    if isinstance(path, Next):
        hits = [(mc.init, t) for t, p in mc.trans[mc.init] if eval_literal(path.arg, labels[t])]
        hits.sort(key=lambda pt: (-mc.dist(mc.init)[pt[1]], pt))
        paths, mass = [], Fraction(0)
        for p in hits:
            paths.append(p)
            mass += mc.dist(mc.init)[p[1]]
            if mass > target.q:
                return paths, mass
        raise AssertionError("violated next formula without enough mass")  # pragma: no cover
    s1 = {s for s in mc.states if eval_literal(path.lhs, labels[s])}
    s2 = {s for s in mc.states if eval_literal(path.rhs, labels[s])}
    alive = _backward_reach(mc, s2, s1)
    # heap keys are floats for speed; masses stay exact
    heap = [(-1.0, 0, Fraction(1), (mc.init,))]
    tick = 1
    paths, mass = [], Fraction(0)
    expansions = 0
    while heap:
        _, _, prob, pi = heapq.heappop(heap)
        last = pi[-1]
        if last in s2:
            paths.append(pi)
            mass += prob
            if mass > target.q:
                return paths, mass
            continue
        if len(pi) > depth_budget:
            raise DepthBudgetExceeded(f"no counterexample within depth {depth_budget}")
        expansions += 1
        if expansions > expansion_budget:
            raise DepthBudgetExceeded(f"no counterexample within {expansion_budget} expansions")
        for t, p in mc.trans[last]:
            if t in alive:
                q = prob * p
                heapq.heappush(heap, (-float(q), tick, q, pi + (t,)))
                tick += 1
    raise AssertionError("search exhausted without exceeding the bound")  # pragma: no cover


def verify_counterexample(mc, ce):
    """Recheck every counterexample invariant from scratch."""
    if isinstance(ce, DisjunctiveCounterexample):
        return bool(ce.parts) and all(verify_counterexample(mc, p) for p in ce.parts)
    phi = ce.formula
    if is_literal(phi):
        return ce.paths == ((mc.init,),) and ce.mass == 1 and not eval_literal(phi, mc.labels[mc.init])
    if not (isinstance(phi, Prob) and phi.cmp is Cmp.LE):
        return False
    path = phi.path
    total = Fraction(0)
    seen = set()
    for pi in ce.paths:
        pi = tuple(pi)
        if not pi or pi[0] != mc.init or pi in seen:
            return False
        if any(not 0 <= s < mc.n for s in pi):
            return False
        seen.add(pi)
        prob = Fraction(1)
        for a, b in zip(pi, pi[1:]):
            prob *= mc.dist(a).get(b, 0)
        if prob == 0:
            return False
        if isinstance(path, Next):
            if len(pi) != 2 or not eval_literal(path.arg, mc.labels[pi[1]]):
                return False
        elif isinstance(path, Until):
            if not eval_literal(path.rhs, mc.labels[pi[-1]]):
                return False
            if any(not eval_literal(path.lhs, mc.labels[s]) for s in pi[:-1]):
                return False
        else:
            return False
        total += prob
    # no path may extend another
    if any(pi[:k] in seen for pi in seen for k in range(1, len(pi))):
        return False
    return total == ce.mass and total > phi.q


__all__ = ["FiniteCounterexample", "DisjunctiveCounterexample", "find_counterexample", "verify_counterexample"]
