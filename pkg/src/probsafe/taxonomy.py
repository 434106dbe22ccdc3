"""Safety/liveness classification of PCTL formulas.

Provides the closure of flat formulas, the safety/liveness decomposition
of flat formulas, and membership checkers for the safe, strongly safe,
live (two variants) and absolutely live fragments.

Membership in the safe fragments is syntactic. The liveness fragments
carry semantic side conditions (satisfiability, equivalence to false),
which are discharged by a sound syntactic entailment check where possible
and otherwise by a bounded search over small chains. A side condition the
search cannot settle yields ``Unknown``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConjunctionClosure
from .formula import (
    And,
    Bot,
    Cmp,
    Next,
    Or,
    Prob,
    Top,
    Until,
    WeakUntil,
    DEFAULT_CNF_BUDGET,
    _has_strict_bound,
    atoms,
    conj,
    flat_outer_cnf,
    is_cnf_conjunct,
    is_flat,
    is_literal,
    literal_sat,
    literal_valid,
    negate,
    require_flat,
    to_pnf,
)
from .markov import GenParams, enumerate_chains, random_mc
from .modelcheck import sat_states

# -- verdicts ----------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """``In``, ``NotIn`` or ``Unknown`` with the reason and search effort."""

    kind: str
    reason: str | None = None
    examined: int | None = None

    def __bool__(self):
        return self.kind == "In"

    @property
    def is_in(self):
        return self.kind == "In"

    @property
    def is_unknown(self):
        return self.kind == "Unknown"

    def __str__(self):
        if self.kind != "Unknown":
            return self.kind
        extra = f"; {self.examined} chains examined" if self.examined is not None else ""
        return f"Unknown ({self.reason}{extra})"

    def to_dict(self):
        d = {"verdict": self.kind}
        if self.kind == "Unknown":
            d["reason"] = self.reason
            d["examined"] = self.examined
        return d


IN = Verdict("In")
NOT_IN = Verdict("NotIn")
FragmentVerdict = Verdict


def unknown(reason, examined=None):
    return Verdict("Unknown", reason, examined)


def _of(flag):
    return IN if flag else NOT_IN


def v_and(*vs):
    """Kleene conjunction."""
    if any(v.kind == "NotIn" for v in vs):
        return NOT_IN
    for v in vs:
        if v.is_unknown:
            return v
    return IN


def v_or(*vs):
    """Kleene disjunction."""
    if any(v.is_in for v in vs):
        return IN
    for v in vs:
        if v.is_unknown:
            return v
    return NOT_IN


# -- bounded model search -----------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    """Exhaustive small chains first, then seeded random chains."""

    exhaustive_states: int = 2
    grid: tuple = (Fraction(1), Fraction(1, 2))
    random_count: int = 200
    random_max_states: int = 6
    seed: int = 0


@dataclass(frozen=True)
class SearchResult:
    model: object  # (chain, state) or None
    examined: int


def find_model(phi, search=None):
    """Look for a chain state satisfying ``phi``.

    A returned model proves satisfiability. ``model is None`` only means
    that no model exists among the chains tried.
    """
    search = search or SearchConfig()
    alphabet = tuple(sorted(atoms(phi)))
    examined = 0
    for mc in enumerate_chains(search.exhaustive_states, alphabet, search.grid):
        examined += 1
        sat = sat_states(mc, phi)
        if sat:
            return SearchResult((mc, min(sat)), examined)
    rng = random.Random(search.seed)
    for _ in range(search.random_count):
        params = GenParams(
            state_count=rng.randint(1, search.random_max_states),
            ap=alphabet,
            seed=rng.getrandbits(32),
        )
        mc = random_mc(params)
        examined += 1
        sat = sat_states(mc, phi)
        if sat:
            return SearchResult((mc, min(sat)), examined)
    return SearchResult(None, examined)


# -- syntactic entailment ---------------------------------------------------------


def _valid(phi):
    return isinstance(phi, Top) or (is_literal(phi) and literal_valid(phi))


def _unsat(phi):
    return isinstance(phi, Bot) or (is_literal(phi) and not literal_sat(phi))


def entails(lhs, rhs):
    """Sound, incomplete check that every state satisfying ``lhs`` satisfies ``rhs``.

    Both formulas are expected in positive normal form. ``False`` means
    the entailment could not be established, not that it fails.
    """
    if _valid(rhs) or _unsat(lhs) or lhs == rhs:
        return True
    if is_literal(lhs) and is_literal(rhs):
        ap = atoms(lhs) | atoms(rhs)
        return literal_sat(And(lhs, negate(rhs)), ap) is False
    if isinstance(lhs, Or):
        return entails(lhs.left, rhs) and entails(lhs.right, rhs)
    if isinstance(rhs, And):
        return entails(lhs, rhs.left) and entails(lhs, rhs.right)
    if isinstance(lhs, And) and (entails(lhs.left, rhs) or entails(lhs.right, rhs)):
        return True
    if isinstance(rhs, Or) and (entails(lhs, rhs.left) or entails(lhs, rhs.right)):
        return True
    if isinstance(rhs, Prob):
        # a state satisfying the goal of an until/weak-until satisfies it with probability 1
        path = rhs.path
        if not isinstance(path, Next) and rhs.cmp.holds(Fraction(1), rhs.q) and entails(lhs, path.rhs):
            return True
        if isinstance(lhs, Prob) and _prob_monotone(lhs, rhs):
            return True
    return False


def _path_included(p1, p2):
    """Every path satisfying ``p1`` satisfies ``p2`` (componentwise check)."""
    if isinstance(p1, Next):
        return isinstance(p2, Next) and entails(p1.arg, p2.arg)
    if isinstance(p2, Next):
        return False
    if isinstance(p1, WeakUntil) and isinstance(p2, Until):
        return False
    return entails(p1.lhs, p2.lhs) and entails(p1.rhs, p2.rhs)


def _bound_implies(c1, q1, c2, q2):
    """Whether ``x c1 q1`` and ``y >= x`` give ``y c2 q2`` (lower bounds)."""
    if q1 > q2:
        return True
    return q1 == q2 and (c2 is Cmp.GE or c1 is Cmp.GT)


def _prob_monotone(lhs, rhs):
    if lhs.cmp.lower and rhs.cmp.lower:
        return _path_included(lhs.path, rhs.path) and _bound_implies(lhs.cmp, lhs.q, rhs.cmp, rhs.q)
    if not lhs.cmp.lower and not rhs.cmp.lower:
        # upper bounds: Pr(rhs path) <= Pr(lhs path) <= q1 <= q2
        mirrored = _bound_implies(lhs.cmp.mirrored(), 1 - lhs.q, rhs.cmp.mirrored(), 1 - rhs.q)
        return _path_included(rhs.path, lhs.path) and mirrored
    return False


# -- closure and decomposition ------------------------------------------------------


def cls_flat(phi):
    """Closure of a single flat conjunct (no ``&`` except between literals)."""
    require_flat(phi)
    if not is_cnf_conjunct(phi):
        raise ConjunctionClosure(
            "closure does not distribute over conjunction; decompose the formula into conjuncts first"
        )
    return _cls(phi)


def _cls(phi):
    if is_literal(phi):
        return phi
    if isinstance(phi, Or):
        return Or(_cls(phi.left), _cls(phi.right))
    path = phi.path
    if isinstance(path, Until) and phi.cmp is Cmp.GE:
        return Prob(phi.cmp, phi.q, WeakUntil(path.lhs, path.rhs))
    if isinstance(path, WeakUntil) and phi.cmp is Cmp.LE:
        return Prob(phi.cmp, phi.q, Until(path.lhs, path.rhs))
    return phi


@dataclass(frozen=True)
class DecompositionResult:
    safe_part: object
    live_part: object
    conjunct_trace: tuple = field(default=())


def decompose_flat(phi, budget=DEFAULT_CNF_BUDGET):
    """Split a flat formula into a safety and a liveness conjunct.

    Each outer-CNF conjunct ``c`` contributes ``cls(c)`` to the safe part
    and ``c | !cls(c)`` to the live part.
    """
    trace = []
    for c in flat_outer_cnf(phi, budget):
        s = _cls(c)
        trace.append((c, s, Or(c, negate(s))))
    return DecompositionResult(
        conj(*(t[1] for t in trace)),
        conj(*(t[2] for t in trace)),
        tuple(trace),
    )


# -- safe fragments ------------------------------------------------------------------


def in_safe(phi):
    return _of(_safe(to_pnf(phi)))


def _safe(phi):
    if is_literal(phi):
        return True
    if isinstance(phi, (And, Or)):
        return _safe(phi.left) and _safe(phi.right)
    if not isinstance(phi, Prob) or phi.cmp.strict:
        return False
    path = phi.path
    if isinstance(path, Next):
        # P<=q[X f] is P>=1-q[X !f]
        arg = path.arg if phi.cmp is Cmp.GE else negate(path.arg)
        return _safe(arg)
    if isinstance(path, WeakUntil) and phi.cmp is Cmp.GE:
        return _safe(path.lhs) and _safe(path.rhs)
    if isinstance(path, Until) and phi.cmp is Cmp.LE:
        return _safe(negate(path.lhs)) and _safe(negate(path.rhs))
    return False


def in_ssafe(phi):
    return _of(_ssafe(to_pnf(phi)))


def _ssafe(phi):
    if is_literal(phi):
        return True
    if isinstance(phi, (And, Or)):
        return _ssafe(phi.left) and _ssafe(phi.right)
    if (
        isinstance(phi, Prob)
        and phi.cmp is Cmp.GE
        and isinstance(phi.path, WeakUntil)
    ):
        rhs = phi.path.rhs
        # P>=q[f W false] == P>=q[f W P>=1[G false]]
        box_ok = _unsat(rhs) or _ssafe_box(rhs)
        return box_ok and _ssafe(phi.path.lhs)
    return False


def _ssafe_box(phi):
    if isinstance(phi, (And, Or)):
        return _ssafe_box(phi.left) and _ssafe_box(phi.right)
    return (
        isinstance(phi, Prob)
        and phi.cmp is Cmp.GE
        and phi.q == 1
        and isinstance(phi.path, WeakUntil)
        and _unsat(phi.path.rhs)
        and _ssafe(phi.path.lhs)
    )


# -- live fragments ---------------------------------------------------------------


def _live_prob_ok(phi):
    """Lower bound that some path probability can meet."""
    return phi.cmp.lower and not (phi.cmp is Cmp.GT and phi.q == 1)


def in_live_lt(phi):
    return _live(to_pnf(phi), "lt", None)


def in_live_gt(phi, mode="syntactic", search=None):
    if mode not in ("syntactic", "guarded"):
        raise ValueError(f"unknown mode {mode!r}")
    return _live(to_pnf(phi), "gt" if mode == "syntactic" else "guarded", search)


def _live(phi, variant, search):
    if is_literal(phi):
        return _of(_valid(phi))
    if isinstance(phi, And):
        return v_and(_live(phi.left, variant, search), _live(phi.right, variant, search))
    if isinstance(phi, Or):
        return v_or(_live(phi.left, variant, search), _live(phi.right, variant, search))
    if not isinstance(phi, Prob) or not _live_prob_ok(phi):
        return NOT_IN
    path = phi.path
    if isinstance(path, Next):
        return _live(path.arg, variant, search)
    if isinstance(path, WeakUntil):
        return v_or(_live(path.lhs, variant, search), _live(path.rhs, variant, search))
    # until
    eventually_lit = _valid(path.lhs) and is_literal(path.rhs)
    if eventually_lit and literal_sat(path.rhs):
        return IN
    v_b = _live(path.rhs, variant, search)
    if variant == "lt" or v_b.is_in:
        return v_b
    v_a = _live(path.lhs, variant, search)
    if variant == "gt" or v_a.kind == "NotIn":
        return v_or(v_b, v_a)
    # guarded: the left branch needs a satisfiable lhs & P~q[lhs U rhs]
    side = find_model(And(path.lhs, phi), search)
    if side.model is not None:
        side_v = IN
    else:
        side_v = unknown("no model of the until side condition found", side.examined)
    return v_or(v_b, v_and(v_a, side_v))


def in_alive(phi, search=None):
    return _alive(to_pnf(phi), search)


def _alive(phi, search):
    if is_literal(phi):
        return _of(_valid(phi))
    if isinstance(phi, (And, Or)):
        # both operands must be absolutely live, for either connective
        return v_and(_alive(phi.left, search), _alive(phi.right, search))
    if not (isinstance(phi, Prob) and phi.cmp is Cmp.GT and phi.q == 0):
        return NOT_IN
    path = phi.path
    if isinstance(path, Next):
        return _alive(path.arg, search)
    v_b = _alive(path.rhs, search)
    v_a = _alive(path.lhs, search)
    if isinstance(path, WeakUntil):
        both = v_and(v_a, v_b)
        if both.is_in:
            return IN
        return v_or(both, v_and(v_a, _no_escape(path.lhs, path.rhs, search)))
    if v_b.is_in:
        return IN
    guard = v_and(_no_escape(path.lhs, path.rhs, search), _nonbot(path.rhs, search))
    return v_or(v_b, v_and(v_a, guard))


def _no_escape(lhs, rhs, search):
    """``!lhs & rhs`` is unsatisfiable, i.e. ``rhs`` entails ``lhs``."""
    if entails(rhs, lhs):
        return IN
    found = find_model(And(negate(lhs), rhs), search)
    if found.model is not None:
        return NOT_IN
    return unknown("could not show that the until target entails its left operand", found.examined)


def _nonbot(phi, search):
    if is_literal(phi):
        return _of(literal_sat(phi))
    found = find_model(phi, search)
    if found.model is not None:
        return IN
    return unknown("could not show the until target satisfiable", found.examined)


# -- report -----------------------------------------------------------------------


@dataclass
class ClassificationReport:
    formula: object
    pnf: object
    flat: bool
    safe: Verdict
    ssafe: Verdict
    live_lt: Verdict
    live_gt: Verdict
    live_gt_guarded: Verdict
    alive: Verdict
    notes: list = field(default_factory=list)

    FRAGMENTS = ("safe", "ssafe", "live_lt", "live_gt", "live_gt_guarded", "alive")

    def to_text(self):
        from .parser import print_formula

        lines = [
            f"formula: {print_formula(self.formula)}",
            f"pnf: {print_formula(self.pnf)}",
            f"flat: {'true' if self.flat else 'false'}",
        ]
        lines += [f"{name}: {getattr(self, name)}" for name in self.FRAGMENTS]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"

    def to_dict(self):
        from .parser import print_formula

        d = {
            "formula": print_formula(self.formula),
            "pnf": print_formula(self.pnf),
            "flat": self.flat,
        }
        for name in self.FRAGMENTS:
            d[name] = getattr(self, name).to_dict()
        d["notes"] = list(self.notes)
        return d


def classify(phi, search=None):
    """Run every membership checker on the positive normal form of ``phi``."""
    pnf = to_pnf(phi)
    report = ClassificationReport(
        formula=phi,
        pnf=pnf,
        flat=is_flat(pnf),
        safe=in_safe(pnf),
        ssafe=in_ssafe(pnf),
        live_lt=in_live_lt(pnf),
        live_gt=in_live_gt(pnf, "syntactic"),
        live_gt_guarded=in_live_gt(pnf, "guarded", search),
        alive=in_alive(pnf, search),
    )
    notes = report.notes
    if _has_strict_bound(pnf):
        notes.append("strict probability bounds: the safe and flat fragments admit only <= and >=")
    if report.ssafe.is_in and not report.safe.is_in:
        notes.append("inconsistent: strongly safe but not safe")
    if report.live_lt.is_in and not report.live_gt.is_in:
        notes.append("inconsistent: in live< but not in live>")
    if report.alive.is_in and not report.live_gt.is_in:
        notes.append("inconsistent: absolutely live but not in live>")
    if report.live_gt.is_in and not report.live_gt_guarded.is_in:
        notes.append("syntactic live> membership is not confirmed by the satisfiability guard")
    if report.safe.is_in and report.live_lt.is_in:
        notes.append("both safe and live: equivalent to true")
    return report


__all__ = [
    "Verdict",
    "FragmentVerdict",
    "IN",
    "NOT_IN",
    "unknown",
    "v_and",
    "v_or",
    "SearchConfig",
    "SearchResult",
    "find_model",
    "entails",
    "cls_flat",
    "DecompositionResult",
    "decompose_flat",
    "in_safe",
    "in_ssafe",
    "in_live_lt",
    "in_live_gt",
    "in_alive",
    "ClassificationReport",
    "classify",
]
