"""Finite-depth probabilistic trees and the bounded extension oracle.

A node is a non-empty tuple of ints; the root is the unique length-1 node.
Trees built by unfolding a chain use state indices as node entries, so the
node ``(0, 1, 1)`` is the path s0 s1 s1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError, SizeLimitExceeded, TreeError
from .formula import atoms
from .markov import MarkovChain, enumerate_chains, family_size
from .modelcheck import check
from .rational import format_rational, parse_rational

ONE = Fraction(1)


@dataclass(frozen=True, eq=False)
class ProbTree:
    """Tree with node labels and exact edge probabilities.

    ``label`` maps node -> frozenset of atoms; ``edgep`` maps
    ``(node, child)`` -> Fraction in (0, 1].
    """

    nodes: frozenset
    label: dict
    edgep: dict
    ap: frozenset = field(default=frozenset())

    def __post_init__(self):
        nodes = frozenset(tuple(n) for n in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "label", {tuple(k): frozenset(v) for k, v in self.label.items()})
        object.__setattr__(self, "edgep", {(tuple(a), tuple(b)): Fraction(p) for (a, b), p in self.edgep.items()})
        ap = frozenset(self.ap)
        for lab in self.label.values():
            ap |= lab
        object.__setattr__(self, "ap", ap)
        problems = self.violations()
        if problems:
            raise TreeError("; ".join(problems))

    def violations(self):
        out = []
        roots = [n for n in self.nodes if len(n) == 1]
        if len(roots) != 1:
            out.append(f"expected exactly one root, found {len(roots)}")
        for n in self.nodes:
            if not n:
                out.append("empty node sequence")
            elif len(n) > 1 and n[:-1] not in self.nodes:
                out.append(f"node {_fmt(n)} has no parent")
            if n not in self.label:
                out.append(f"node {_fmt(n)} has no label")
        for (a, b), p in self.edgep.items():
            if a not in self.nodes or b not in self.nodes or b[:-1] != a:
                out.append(f"edge {_fmt(a)} -> {_fmt(b)} does not join parent and child")
            if not 0 < p <= 1:
                out.append(f"edge {_fmt(a)} -> {_fmt(b)} has probability {p} outside (0, 1]")
        kids = self._kids
        for n in self.nodes:
            for c in kids.get(n, ()):
                if (n, c) not in self.edgep:
                    out.append(f"edge {_fmt(n)} -> {_fmt(c)} has no probability")
            if kids.get(n):
                total = sum((self.edgep.get((n, c), 0) for c in kids[n]), Fraction(0))
                if total != 1:
                    out.append(f"children of {_fmt(n)} sum to {total}")
        return out

    @property
    def _kids(self):
        kids = {}
        for n in self.nodes:
            if len(n) > 1:
                kids.setdefault(n[:-1], []).append(n)
        for v in kids.values():
            v.sort()
        return kids

    @property
    def root(self):
        return next(n for n in self.nodes if len(n) == 1)

    def children(self, node):
        return [c for c in self._kids.get(node, [])]

    def leaves(self):
        kids = self._kids
        return sorted(n for n in self.nodes if n not in kids)

    @property
    def depth(self):
        return max(len(n) for n in self.nodes)

    def ordered_nodes(self):
        """Nodes in breadth-first order, root first."""
        return sorted(self.nodes, key=lambda n: (len(n), n))

    def __eq__(self, other):
        if not isinstance(other, ProbTree):
            return NotImplemented
        return self.nodes == other.nodes and self.label == other.label and self.edgep == other.edgep

    def __hash__(self):
        return hash(self.nodes)

    def __repr__(self):
        return f"ProbTree({save_tree(self)!r})"


def _fmt(node):
    return ".".join(str(i) for i in node)


def single_node(label, root=0):
    return ProbTree(frozenset([(root,)]), {(root,): frozenset(label)}, {})


def from_unfolding(mc, depth):
    """Depth-``depth`` prefix of the unfolding of ``mc`` from its initial state."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    root = (mc.init,)
    nodes, label, edgep = {root}, {root: mc.labels[mc.init]}, {}
    frontier = [root]
    for _ in range(depth - 1):
        nxt = []
        for n in frontier:
            for t, p in mc.trans[n[-1]]:
                c = n + (t,)
                nodes.add(c)
                label[c] = mc.labels[t]
                edgep[(n, c)] = p
                nxt.append(c)
        frontier = nxt
    return ProbTree(frozenset(nodes), label, edgep, mc.ap)


def is_prefix(t1, t2):
    """Whether ``t1`` is a prefix of ``t2``."""
    if not t1.nodes <= t2.nodes:
        return False
    if any(t1.label[n] != t2.label[n] for n in t1.nodes):
        return False
    restricted = {(a, b): p for (a, b), p in t2.edgep.items() if a in t1.nodes and b in t1.nodes}
    return restricted == t1.edgep


def suffix_at(t, pi):
    """Subtree below ``pi``, re-rooted so that ``pi`` becomes the root."""
    pi = tuple(pi)
    if pi not in t.nodes:
        raise TreeError(f"unknown node {_fmt(pi)}")
    k = len(pi) - 1

    def cut(n):
        return n[k:]

    nodes = [n for n in t.nodes if n[: len(pi)] == pi]
    return ProbTree(
        frozenset(cut(n) for n in nodes),
        {cut(n): t.label[n] for n in nodes},
        {(cut(a), cut(b)): p for (a, b), p in t.edgep.items() if a[: len(pi)] == pi},
        t.ap,
    )


def stutter_tree(t, pi):
    """Repeat node ``pi`` with probability one.

    ``pi`` gets the single child ``pi·last(pi)`` which carries ``pi``'s
    label and its old subtree.
    """
    pi = tuple(pi)
    if pi not in t.nodes:
        raise TreeError(f"unknown node {_fmt(pi)}")
    k = len(pi)
    copy = pi + (pi[-1],)

    def move(n):
        return n[:k] + (pi[-1],) + n[k:] if n[:k] == pi and len(n) > k else n

    nodes = {move(n) for n in t.nodes} | {copy}
    label = {move(n): lab for n, lab in t.label.items()}
    label[copy] = t.label[pi]
    edgep = {}
    for (a, b), p in t.edgep.items():
        if a == pi:
            edgep[(copy, move(b))] = p
        else:
            edgep[(move(a), move(b))] = p
    edgep[(pi, copy)] = ONE
    return ProbTree(frozenset(nodes), label, edgep, t.ap)


def shrink_tree(t, pi):
    """Delete the non-root node ``pi``; its parent inherits its children.

    The parent's edge to each grandchild is the product of the two edge
    probabilities. A grandchild whose index collides with an existing child
    of the parent is renumbered to the next free index.
    """
    pi = tuple(pi)
    if pi not in t.nodes:
        raise TreeError(f"unknown node {_fmt(pi)}")
    if len(pi) == 1:
        raise TreeError("the root cannot be deleted")
    parent = pi[:-1]
    grandkids = t.children(pi)
    if not grandkids:
        raise TreeError(f"cannot delete leaf {_fmt(pi)}: its probability mass would be lost")
    k = len(parent)
    taken = {c[-1] for c in t.children(parent) if c != pi}
    rename = {}
    for g in grandkids:
        idx = g[-1]
        if idx in taken:
            idx = max(taken | {g[-1] for g in grandkids}) + 1
        taken.add(idx)
        rename[g[-1]] = idx

    def move(n):
        if n[: len(pi)] == pi:
            if len(n) == len(pi):
                return None
            return parent + (rename[n[k + 1]],) + n[k + 2:]
        return n

    nodes = {move(n) for n in t.nodes} - {None}
    label = {move(n): lab for n, lab in t.label.items() if move(n) is not None}
    through = t.edgep[(parent, pi)]
    edgep = {}
    for (a, b), p in t.edgep.items():
        if b == pi:
            continue
        if a == pi:
            edgep[(parent, move(b))] = through * p
        else:
            edgep[(move(a), move(b))] = p
    return ProbTree(frozenset(nodes), label, edgep, t.ap)


# -- text format ------------------------------------------------------------------


def save_tree(t):
    """``(1,labels)`` root line, then ``path: p labels`` for every other node."""
    lines = ["(1," + " ".join(sorted(t.label[t.root])) + ")"]
    for n in t.ordered_nodes()[1:]:
        p = t.edgep[(n[:-1], n)]
        lab = " ".join(sorted(t.label[n]))
        lines.append(f"{_fmt(n)}: {format_rational(p)}{' ' + lab if lab else ''}")
    return "\n".join(lines) + "\n"


def load_tree(text):
    root_label = None
    label, edgep = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if root_label is None:
            if not (line.startswith("(") and line.endswith(")")):
                raise ParseError("expected root line '(1,labels)'", line=lineno)
            head, _, labs = line[1:-1].partition(",")
            if head.strip() != "1":
                raise ParseError("root line must start with probability 1", line=lineno)
            root_label = frozenset(labs.split())
            continue
        path, sep, rest = line.partition(":")
        if not sep:
            raise ParseError("expected 'path: p labels'", line=lineno)
        try:
            node = tuple(int(x) for x in path.strip().split("."))
            fields = rest.split()
            p = parse_rational(fields[0])
        except (ValueError, IndexError) as exc:
            raise ParseError(f"malformed node line: {exc}", line=lineno) from None
        if len(node) < 2:
            raise ParseError("node paths below the root have at least two entries", line=lineno)
        label[node] = frozenset(fields[1:])
        edgep[(node[:-1], node)] = p
    if root_label is None:
        raise ParseError("empty tree file")
    roots = {n[0] for n in label} or {0}
    if len(roots) != 1:
        raise ParseError("node paths disagree on the root index")
    root = (roots.pop(),)
    label[root] = root_label
    return ProbTree(frozenset(label), label, edgep)


# -- trees as chains ------------------------------------------------------------------


def tree_to_mc(t, continuation=None):
    """One chain state per tree node (root first), plus the continuation.

    Every leaf moves with probability one to the continuation's initial
    state. Without a continuation, leaves loop on themselves.
    """
    order = t.ordered_nodes()
    index = {n: i for i, n in enumerate(order)}
    offset = len(order)
    labels = [t.label[n] for n in order]
    trans = []
    kids = t._kids
    for n in order:
        if n in kids:
            trans.append(tuple(sorted((index[c], t.edgep[(n, c)]) for c in kids[n])))
        elif continuation is None:
            trans.append(((index[n], ONE),))
        else:
            trans.append(((offset + continuation.init, ONE),))
    ap = t.ap
    if continuation is not None:
        labels.extend(continuation.labels)
        trans.extend(tuple((s + offset, p) for s, p in row) for row in continuation.trans)
        ap = ap | continuation.ap
    return MarkovChain(tuple(labels), tuple(trans), 0, frozenset(ap))


@dataclass(frozen=True)
class ExtensionFamily:
    """Continuations tried by :func:`extension_oracle`.

    All chains with 1..max_states states, labels over ``alphabet`` (the
    formula's atoms when None) and transition probabilities from ``grid``.
    The same continuation is attached at every leaf.
    """

    max_states: int = 3
    alphabet: tuple | None = None
    grid: tuple = (Fraction(1), Fraction(1, 2))
    limit: int = 100_000

    def __post_init__(self):
        if self.max_states < 1:
            raise ValueError("max_states must be at least 1")
        grid = tuple(Fraction(g) for g in self.grid)
        if any(not 0 < g <= 1 for g in grid):
            raise ValueError("grid values must lie in (0, 1]")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class Witness:
    continuation: MarkovChain
    composite: MarkovChain
    examined: int


@dataclass(frozen=True)
class NoWitnessInFamily:
    """No continuation in the family works. This is not a proof that none exists."""

    examined: int


def extension_oracle(t1, phi, fam=None):
    """Search ``fam`` for a continuation under which the extended tree satisfies ``phi``."""
    fam = fam or ExtensionFamily()
    alphabet = fam.alphabet if fam.alphabet is not None else tuple(sorted(atoms(phi)))
    total = family_size(fam.max_states, alphabet, fam.grid)
    if total > fam.limit:
        raise SizeLimitExceeded(f"extension family has {total} candidates (limit {fam.limit})", count=total)
    examined = 0
    for cont in enumerate_chains(fam.max_states, alphabet, fam.grid):
        examined += 1
        composite = tree_to_mc(t1, cont)
        if check(composite, phi):
            return Witness(cont, composite, examined)
    return NoWitnessInFamily(examined)


__all__ = [
    "ProbTree",
    "ExtensionFamily",
    "Witness",
    "NoWitnessInFamily",
    "single_node",
    "from_unfolding",
    "is_prefix",
    "suffix_at",
    "stutter_tree",
    "shrink_tree",
    "save_tree",
    "load_tree",
    "tree_to_mc",
    "extension_oracle",
]
