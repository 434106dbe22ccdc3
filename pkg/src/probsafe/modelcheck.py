"""Exact PCTL model checking over finite Markov chains, plus qualitative CTL.

Until probabilities are computed by fixing the Prob0 states (target
unreachable through allowed states) to 0 and solving the remaining linear
system over Fractions. Threshold comparisons are therefore exact, which
matters when a bound is attained exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .formula import (
    And,
    Atom,
    Bot,
    Next,
    Not,
    Or,
    Prob,
    Top,
    Until,
    WeakUntil,
    eval_literal,
    is_literal,
)

ZERO = Fraction(0)
ONE = Fraction(1)


def solve_sparse(rows, rhs):
    """Solve ``A x = b`` exactly by Gauss-Jordan elimination on sparse rows.

    ``rows`` maps each unknown to ``{unknown: coefficient}``; ``rhs`` maps
    unknowns to constants. The system must be non-singular.
    """
    rows = {i: {k: Fraction(v) for k, v in r.items()} for i, r in rows.items()}
    rhs = {i: Fraction(rhs.get(i, 0)) for i in rows}
    order = sorted(rows, key=lambda i: len(rows[i]))
    pivots = {}
    used = set()
    for var in order:
        # pick a not-yet-used row mentioning var, preferring short rows
        best = None
        for r in rows:
            if r in used or not rows[r].get(var):
                continue
            if best is None or len(rows[r]) < len(rows[best]):
                best = r
        if best is None:
            raise ZeroDivisionError("singular system")
        pivots[var] = best
        used.add(best)
        prow = rows[best]
        inv = 1 / prow[var]
        for k in prow:
            prow[k] *= inv
        rhs[best] *= inv
        for r, row in rows.items():
            if r == best:
                continue
            c = row.get(var)
            if not c:
                continue
            for k, v in prow.items():
                nv = row.get(k, 0) - c * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            rhs[r] -= c * rhs[best]
    return {var: rhs[r] for var, r in pivots.items()}


def _backward_reach(mc, targets, allowed):
    preds = mc.predecessors()
    seen = set(targets)
    queue = deque(seen)
    while queue:
        t = queue.popleft()
        for s in preds[t]:
            if s not in seen and s in allowed:
                seen.add(s)
                queue.append(s)
    return seen


def prob_until(mc, s1, s2):
    """Per-state probability of ``s1 U s2`` as a tuple of Fractions."""
    s1, s2 = frozenset(s1), frozenset(s2)
    can_reach = _backward_reach(mc, s2, s1)
    unknown = [s for s in mc.states if s in can_reach and s not in s2]
    x = [ZERO] * mc.n
    for s in s2:
        x[s] = ONE
    if unknown:
        idx = set(unknown)
        rows, rhs = {}, {}
        for s in unknown:
            row = {s: ONE}
            b = ZERO
            for t, p in mc.trans[s]:
                if t in s2:
                    b += p
                elif t in idx:
                    row[t] = row.get(t, ZERO) - p
            rows[s] = {k: v for k, v in row.items() if v}
            rhs[s] = b
        for s, v in solve_sparse(rows, rhs).items():
            x[s] = v
    return tuple(x)


def prob_weak_until(mc, s1, s2):
    """``1 - Pr[(s1 \\ s2) U not(s1 | s2)]`` pointwise."""
    s1, s2 = frozenset(s1), frozenset(s2)
    bad = frozenset(mc.states) - (s1 | s2)
    return tuple(ONE - p for p in prob_until(mc, s1 - s2, bad))


def prob_next(mc, s):
    s = frozenset(s)
    return tuple(sum((p for t, p in mc.trans[u] if t in s), ZERO) for u in mc.states)


def path_probabilities(mc, path, cache=None):
    """Probability of the path formula from every state."""
    if isinstance(path, Next):
        return prob_next(mc, sat_states(mc, path.arg, cache))
    s1 = sat_states(mc, path.lhs, cache)
    s2 = sat_states(mc, path.rhs, cache)
    if isinstance(path, Until):
        return prob_until(mc, s1, s2)
    if isinstance(path, WeakUntil):
        return prob_weak_until(mc, s1, s2)
    raise TypeError(f"not a path formula: {path!r}")


def sat_states(mc, phi, cache=None):
    """States of ``mc`` satisfying ``phi``, evaluated bottom-up."""
    if cache is None:
        cache = {}
    hit = cache.get(phi)
    if hit is not None:
        return hit
    if isinstance(phi, Top):
        result = frozenset(mc.states)
    elif isinstance(phi, Bot):
        result = frozenset()
    elif isinstance(phi, Atom):
        result = frozenset(s for s in mc.states if phi.name in mc.labels[s])
    elif isinstance(phi, Not):
        result = frozenset(mc.states) - sat_states(mc, phi.inner, cache)
    elif isinstance(phi, And):
        result = sat_states(mc, phi.left, cache) & sat_states(mc, phi.right, cache)
    elif isinstance(phi, Or):
        result = sat_states(mc, phi.left, cache) | sat_states(mc, phi.right, cache)
    elif isinstance(phi, Prob):
        probs = path_probabilities(mc, phi.path, cache)
        result = frozenset(s for s in mc.states if phi.cmp.holds(probs[s], phi.q))
    else:
        raise TypeError(f"not a state formula: {phi!r}")
    cache[phi] = result
    return result


def check(mc, phi):
    """Whether the initial state satisfies ``phi``."""
    return mc.init in sat_states(mc, phi)


# -- qualitative CTL ---------------------------------------------------------


@dataclass(frozen=True)
class ExistsEventually:
    arg: object


@dataclass(frozen=True)
class AllEventually:
    arg: object


@dataclass(frozen=True)
class ExistsGlobally:
    arg: object


@dataclass(frozen=True)
class AllGlobally:
    arg: object


@dataclass(frozen=True)
class ExistsUntil:
    lhs: object
    rhs: object


CtlFormula = (ExistsEventually, AllEventually, ExistsGlobally, AllGlobally, ExistsUntil)


def _lit_states(mc, phi):
    if not is_literal(phi):
        raise ValueError(f"CTL arguments must be literal formulas: {phi!r}")
    return frozenset(s for s in mc.states if eval_literal(phi, mc.labels[s]))


def _exists_until(mc, s1, s2):
    return frozenset(_backward_reach(mc, s2, s1))


def _exists_globally(mc, s):
    z = set(s)
    changed = True
    while changed:
        changed = False
        for u in list(z):
            if not any(t in z for t in mc.successors(u)):
                z.discard(u)
                changed = True
    return frozenset(z)


def ctl_check(mc, psi):
    """States satisfying a qualitative CTL query on the underlying digraph."""
    everything = frozenset(mc.states)
    if isinstance(psi, ExistsUntil):
        return _exists_until(mc, _lit_states(mc, psi.lhs), _lit_states(mc, psi.rhs))
    arg = _lit_states(mc, psi.arg)
    if isinstance(psi, ExistsEventually):
        return _exists_until(mc, everything, arg)
    if isinstance(psi, ExistsGlobally):
        return _exists_globally(mc, arg)
    if isinstance(psi, AllEventually):
        return everything - _exists_globally(mc, everything - arg)
    if isinstance(psi, AllGlobally):
        return everything - _exists_until(mc, everything, everything - arg)
    raise TypeError(f"not a CTL formula: {psi!r}")
