"""PCTL abstract syntax, positive normal form, and the flat-fragment helpers.

State formulas are immutable, hashable dataclasses so they can key memo
tables in the model checker. Derived operators (eventually, globally) are
expanded at construction time by :func:`eventually` and :func:`globally`;
they never appear as node types.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import BoundOutOfRange, NotFlat, NotLiteral, SizeLimitExceeded, StrictBoundError

DEFAULT_CNF_BUDGET = 10_000


class Cmp(enum.Enum):
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    def holds(self, x, q):
        if self is Cmp.LT:
            return x < q
        if self is Cmp.LE:
            return x <= q
        if self is Cmp.GT:
            return x > q
        return x >= q

    def negated(self):
        """Comparison satisfied exactly when this one is not."""
        return _NEGATED[self]

    def mirrored(self):
        """Comparison for ``1 - x`` against ``1 - q``."""
        return _MIRRORED[self]

    @property
    def strict(self):
        return self in (Cmp.LT, Cmp.GT)

    @property
    def lower(self):
        """True for lower bounds (``>``, ``>=``)."""
        return self in (Cmp.GT, Cmp.GE)


_NEGATED = {Cmp.LT: Cmp.GE, Cmp.GE: Cmp.LT, Cmp.LE: Cmp.GT, Cmp.GT: Cmp.LE}
_MIRRORED = {Cmp.LT: Cmp.GT, Cmp.GT: Cmp.LT, Cmp.LE: Cmp.GE, Cmp.GE: Cmp.LE}


# -- state formulas ---------------------------------------------------------


@dataclass(frozen=True)
class Top:
    def __repr__(self):
        return "TOP"


@dataclass(frozen=True)
class Bot:
    def __repr__(self):
        return "BOT"


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    inner: StateFormula


@dataclass(frozen=True)
class And:
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Or:
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Prob:
    cmp: Cmp
    q: Fraction
    path: PathFormula

    def __post_init__(self):
        q = Fraction(self.q)
        if not 0 <= q <= 1:
            raise BoundOutOfRange(f"probability bound {q} outside [0, 1]")
        object.__setattr__(self, "q", q)


# -- path formulas ----------------------------------------------------------


@dataclass(frozen=True)
class Next:
    arg: StateFormula


@dataclass(frozen=True)
class Until:
    lhs: StateFormula
    rhs: StateFormula


@dataclass(frozen=True)
class WeakUntil:
    lhs: StateFormula
    rhs: StateFormula


StateFormula = Union[Top, Bot, Atom, Not, And, Or, Prob]
PathFormula = Union[Next, Until, WeakUntil]

TOP = Top()
BOT = Bot()


def eventually(phi):
    return Until(TOP, phi)


def globally(phi):
    return WeakUntil(phi, BOT)


def conj(*formulas):
    """Left-nested conjunction; empty conjunction is TOP."""
    if not formulas:
        return TOP
    result = formulas[0]
    for f in formulas[1:]:
        result = And(result, f)
    return result


def disj(*formulas):
    if not formulas:
        return BOT
    result = formulas[0]
    for f in formulas[1:]:
        result = Or(result, f)
    return result


def children(phi):
    """Immediate state subformulas (path operators are looked through)."""
    if isinstance(phi, Not):
        return (phi.inner,)
    if isinstance(phi, (And, Or)):
        return (phi.left, phi.right)
    if isinstance(phi, Prob):
        p = phi.path
        if isinstance(p, Next):
            return (p.arg,)
        return (p.lhs, p.rhs)
    return ()


def size(phi):
    """Number of AST nodes, counting a path operator as one node."""
    n = 1 + (1 if isinstance(phi, Prob) else 0)
    return n + sum(size(c) for c in children(phi))


def atoms(phi):
    if isinstance(phi, Atom):
        return frozenset((phi.name,))
    out = frozenset()
    for c in children(phi):
        out |= atoms(c)
    return out


def prob_depth(phi):
    """Nesting depth of probability operators."""
    below = max((prob_depth(c) for c in children(phi)), default=0)
    return below + 1 if isinstance(phi, Prob) else below


def map_path(path, fn):
    if isinstance(path, Next):
        return Next(fn(path.arg))
    return type(path)(fn(path.lhs), fn(path.rhs))


# -- positive normal form -----------------------------------------------------


def to_pnf(phi):
    """Push negations down to atoms.

    Negated probability operators flip their comparison; path formulas are
    left as they are, so no path-level rewriting is needed.
    """
    if isinstance(phi, (Top, Bot, Atom)):
        return phi
    if isinstance(phi, Not):
        return _negate_pnf(phi.inner)
    if isinstance(phi, And):
        return And(to_pnf(phi.left), to_pnf(phi.right))
    if isinstance(phi, Or):
        return Or(to_pnf(phi.left), to_pnf(phi.right))
    if isinstance(phi, Prob):
        return Prob(phi.cmp, phi.q, map_path(phi.path, to_pnf))
    raise TypeError(f"not a state formula: {phi!r}")


def _negate_pnf(phi):
    if isinstance(phi, Top):
        return BOT
    if isinstance(phi, Bot):
        return TOP
    if isinstance(phi, Atom):
        return Not(phi)
    if isinstance(phi, Not):
        return to_pnf(phi.inner)
    if isinstance(phi, And):
        return Or(_negate_pnf(phi.left), _negate_pnf(phi.right))
    if isinstance(phi, Or):
        return And(_negate_pnf(phi.left), _negate_pnf(phi.right))
    if isinstance(phi, Prob):
        return Prob(phi.cmp.negated(), phi.q, map_path(phi.path, to_pnf))
    raise TypeError(f"not a state formula: {phi!r}")


def negate(phi):
    """PNF of the negation of ``phi``."""
    return _negate_pnf(phi)


def is_pnf(phi):
    if isinstance(phi, Not):
        return isinstance(phi.inner, Atom)
    return all(is_pnf(c) for c in children(phi))


def dual(phi):
    """Rewrite ``P~q[a U b]`` into the equivalent weak-until form and back.

    ``P>=q[a U b] == P<=1-q[(a & !b) W (!a & !b)]`` and symmetrically for W.
    """
    if not isinstance(phi, Prob) or isinstance(phi.path, Next):
        raise ValueError("dual applies to until / weak-until probability operators")
    a, b = phi.path.lhs, phi.path.rhs
    lhs = And(a, negate(b))
    rhs = And(negate(a), negate(b))
    target = WeakUntil if isinstance(phi.path, Until) else Until
    return Prob(phi.cmp.mirrored(), 1 - phi.q, target(lhs, rhs))


# -- literals -------------------------------------------------------------------


def is_literal(phi):
    """Propositional formula over atoms, constants, ``!``, ``&`` and ``|``."""
    if isinstance(phi, (Top, Bot, Atom)):
        return True
    if isinstance(phi, Not):
        return is_literal(phi.inner)
    if isinstance(phi, (And, Or)):
        return is_literal(phi.left) and is_literal(phi.right)
    return False


def eval_literal(phi, label):
    """Truth of a literal formula in a state labelled with ``label``."""
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Atom):
        return phi.name in label
    if isinstance(phi, Not):
        return not eval_literal(phi.inner, label)
    if isinstance(phi, And):
        return eval_literal(phi.left, label) and eval_literal(phi.right, label)
    if isinstance(phi, Or):
        return eval_literal(phi.left, label) or eval_literal(phi.right, label)
    raise NotLiteral(f"not a literal formula: {phi!r}")


def _assignments(ap):
    ap = sorted(ap)
    for bits in itertools.product((False, True), repeat=len(ap)):
        yield frozenset(a for a, bit in zip(ap, bits) if bit)


def literal_sat(phi, ap=None):
    """Whether some assignment ``A ⊆ ap`` satisfies the literal ``phi``.

    Decided by truth-table enumeration; ``ap`` defaults to the atoms of phi.
    """
    if not is_literal(phi):
        raise NotLiteral(f"not a literal formula: {phi!r}")
    ap = atoms(phi) if ap is None else frozenset(ap)
    return any(eval_literal(phi, a) for a in _assignments(ap))


def literal_valid(phi):
    if not is_literal(phi):
        raise NotLiteral(f"not a literal formula: {phi!r}")
    return all(eval_literal(phi, a) for a in _assignments(atoms(phi)))


# -- flat fragment --------------------------------------------------------------


def _has_strict_bound(phi):
    if isinstance(phi, Prob) and phi.cmp.strict:
        return True
    return any(_has_strict_bound(c) for c in children(phi))


def is_flat(phi):
    """Boolean combination of literals and unnested non-strict probability operators."""
    if is_literal(phi):
        return True
    if isinstance(phi, (And, Or)):
        return is_flat(phi.left) and is_flat(phi.right)
    if isinstance(phi, Prob):
        if phi.cmp.strict:
            return False
        return all(is_literal(c) for c in children(phi))
    return False


def require_flat(phi):
    if is_flat(phi):
        return
    if _has_strict_bound(phi):
        raise StrictBoundError(
            "strict probability bounds are outside the flat fragment; their closure "
            "has no PCTL representation"
        )
    raise NotFlat(f"formula is not flat: {phi!r}")


def flat_outer_cnf(phi, budget=DEFAULT_CNF_BUDGET):
    """Conjuncts of an equivalent formula with ``&`` only between literals.

    Disjunction is distributed over conjunction, treating maximal literal
    subformulas and probability operators as units. Raises
    SizeLimitExceeded when the result would exceed ``budget`` AST nodes.
    """
    require_flat(phi)
    used = 0

    def charge(clauses):
        nonlocal used
        used += sum(size(u) for clause in clauses for u in clause)
        if used > budget:
            raise SizeLimitExceeded(f"CNF expansion exceeded {budget} nodes", count=used)
        return clauses

    def clauses_of(f):
        if is_literal(f) or isinstance(f, Prob):
            return [[f]]
        if isinstance(f, And):
            return clauses_of(f.left) + clauses_of(f.right)
        left, right = clauses_of(f.left), clauses_of(f.right)
        return charge([cl + cr for cl in left for cr in right])

    return [disj(*clause) for clause in clauses_of(phi)]


def is_cnf_conjunct(phi):
    """No conjunction except between literal subformulas."""
    if is_literal(phi):
        return True
    if isinstance(phi, And):
        return False
    if isinstance(phi, Or):
        return is_cnf_conjunct(phi.left) and is_cnf_conjunct(phi.right)
    return True
