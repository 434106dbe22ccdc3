"""Finite Markov chains: validation, text format, generation, transforms.

Chains are immutable. Transition rows are stored as sorted tuples of
``(successor, probability)`` pairs with exact Fraction probabilities.
"""

from __future__ import annotations

import random
from itertools import product
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import InvalidChain, ParseError
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class MarkovChain:
    labels: tuple
    trans: tuple
    init: int = 0
    ap: frozenset = frozenset()

    @classmethod
    def build(cls, labels, trans, init=0, ap=None):
        """Construct from loose inputs.

        ``labels`` is a sequence of iterables of proposition names and
        ``trans`` a sequence of ``{successor: probability}`` mappings (or
        pair lists). Probabilities may be Fractions, ints or strings.
        """
        labels = tuple(frozenset(l) for l in labels)
        rows = []
        for row in trans:
            items = row.items() if hasattr(row, "items") else row
            merged = {}
            for t, p in items:
                p = parse_rational(p) if isinstance(p, str) else Fraction(p)
                merged[int(t)] = merged.get(int(t), 0) + p
            rows.append(tuple(sorted(merged.items())))
        if ap is None:
            ap = frozenset().union(*labels) if labels else frozenset()
        return cls(labels, tuple(rows), int(init), frozenset(ap))

    @property
    def n(self):
        return len(self.trans)

    @property
    def states(self):
        return range(self.n)

    def dist(self, s):
        return dict(self.trans[s])

    def successors(self, s):
        return [t for t, _ in self.trans[s]]

    def predecessors(self):
        """Per-state predecessor sets (computed once, do not mutate)."""
        return self._preds

    @cached_property
    def _preds(self):
        preds = [set() for _ in self.states]
        for s, row in enumerate(self.trans):
            for t, _ in row:
                preds[t].add(s)
        return preds

    def label_of(self, s):
        return self.labels[s]

    def replace(self, **changes):
        fields = dict(labels=self.labels, trans=self.trans, init=self.init, ap=self.ap)
        fields.update(changes)
        return MarkovChain(**fields)


def validate(mc):
    """List every well-formedness violation; an empty list means the chain is valid."""
    problems = []
    n = mc.n
    if n == 0:
        problems.append("chain has no states")
    if len(mc.labels) != n:
        problems.append(f"{len(mc.labels)} label entries for {n} states")
    if n and not 0 <= mc.init < n:
        problems.append(f"initial state {mc.init} out of range")
    for s, row in enumerate(mc.trans):
        total = Fraction(0)
        for t, p in row:
            if not 0 <= t < n:
                problems.append(f"state {s}: successor {t} out of range")
            if not 0 < p <= 1:
                problems.append(f"state {s}: probability {p} to {t} not in (0, 1]")
            total += p
        if total != 1:
            problems.append(f"state {s}: outgoing probabilities sum to {total}, not 1")
    for s, lab in enumerate(mc.labels):
        unknown = lab - mc.ap
        if unknown:
            problems.append(f"state {s}: label uses unknown propositions {sorted(unknown)}")
    return problems


def ensure_valid(mc):
    problems = validate(mc)
    if problems:
        raise InvalidChain(problems)
    return mc


# -- text format -------------------------------------------------------------


def save_mc(mc):
    lines = ["mc", f"states: {mc.n}", f"init: {mc.init}", "ap: " + " ".join(sorted(mc.ap))]
    lines = [l.rstrip() for l in lines]
    for s, lab in enumerate(mc.labels):
        if lab:
            lines.append(f"label {s}: " + " ".join(sorted(lab)))
    for s, row in enumerate(mc.trans):
        lines.append(f"trans {s}: " + " ".join(f"{t}:{format_rational(p)}" for t, p in row))
    return "\n".join(lines) + "\n"


def load_mc(text):
    """Parse the line-oriented chain format and validate the result."""
    header_seen = False
    n = init = None
    ap = None
    labels = {}
    trans = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if line != "mc":
                raise ParseError("first line must be 'mc'", line=lineno)
            header_seen = True
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", line=lineno)
        key, rest = key.strip(), rest.strip()
        try:
            if key == "states":
                n = int(rest)
            elif key == "init":
                init = int(rest)
            elif key == "ap":
                ap = frozenset(rest.split())
            elif key.startswith("label "):
                s = int(key[len("label "):])
                if s in labels:
                    raise ParseError(f"duplicate label line for state {s}", line=lineno)
                labels[s] = frozenset(rest.split())
            elif key.startswith("trans "):
                s = int(key[len("trans "):])
                if s in trans:
                    raise ParseError(f"duplicate trans line for state {s}", line=lineno)
                row = {}
                for item in rest.split():
                    t, colon, p = item.partition(":")
                    if not colon:
                        raise ParseError(f"bad transition entry {item!r}", line=lineno)
                    t = int(t)
                    if t in row:
                        raise ParseError(f"duplicate successor {t}", line=lineno)
                    row[t] = parse_rational(p)
                trans[s] = row
            else:
                raise ParseError(f"unknown key {key!r}", line=lineno)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from exc
    if not header_seen:
        raise ParseError("empty input: missing 'mc' header", line=1)
    if n is None or init is None:
        raise ParseError("missing 'states:' or 'init:' line", line=lineno if text else 1)
    for s in list(labels) + list(trans):
        if not 0 <= s < n:
            raise ParseError(f"state index {s} out of range 0..{n - 1}")
    mc = MarkovChain.build(
        [labels.get(s, ()) for s in range(n)],
        [trans.get(s, {}) for s in range(n)],
        init,
        ap if ap is not None else None,
    )
    return ensure_valid(mc)


# -- generation --------------------------------------------------------------


@dataclass(frozen=True)
class GenParams:
    state_count: int
    max_out_degree: int = 3
    ap: tuple = ("a", "b")
    seed: int = 0
    grid: tuple = (1, 2, 3)

    def __post_init__(self):
        if self.state_count < 1 or self.max_out_degree < 1:
            raise ValueError("state_count and max_out_degree must be positive")


def random_mc(params):
    """Seeded random chain; weights drawn from the grid are normalised exactly."""
    rng = random.Random(params.seed)
    n = params.state_count
    ap = tuple(sorted(params.ap))
    labels = [frozenset(a for a in ap if rng.random() < 0.5) for _ in range(n)]
    trans = []
    for _ in range(n):
        k = rng.randint(1, min(params.max_out_degree, n))
        succ = sorted(rng.sample(range(n), k))
        weights = [Fraction(rng.choice(params.grid)) for _ in succ]
        total = sum(weights)
        trans.append({t: w / total for t, w in zip(succ, weights)})
    return MarkovChain.build(labels, trans, 0, frozenset(ap))


def random_corpus(count, seed=0, max_states=8, ap=("a", "b", "c"), max_out_degree=3):
    """Deterministic list of ``count`` random chains with 1..max_states states."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        params = GenParams(
            state_count=rng.randint(1, max_states),
            max_out_degree=max_out_degree,
            ap=tuple(ap),
            seed=rng.getrandbits(32),
        )
        out.append(random_mc(params))
    return out


# -- structural transforms -----------------------------------------------------


def reroot(mc, s):
    if not 0 <= s < mc.n:
        raise ValueError(f"state {s} out of range")
    return mc.replace(init=s)


def reachable(mc, start=None):
    start = mc.init if start is None else start
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for t in mc.successors(s):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def disjoint_union(first, second):
    """Both chains side by side; ``second``'s states are shifted by ``first.n``.

    The initial state is ``first``'s.
    """
    off = first.n
    labels = first.labels + second.labels
    trans = first.trans + tuple(tuple((t + off, p) for t, p in row) for row in second.trans)
    return MarkovChain(labels, trans, first.init, first.ap | second.ap)


def unfold_to_depth(mc, depth):
    """Unfold the first ``depth`` levels from the initial state into a tree.

    Tree nodes come first in breadth-first order (index 0 is the root when
    ``depth > 0``); the original chain follows at offset ``#tree nodes`` and
    the depth-``depth`` frontier transitions into it.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if depth == 0:
        return mc
    nodes = [(mc.init,)]
    level = [0]
    for _ in range(depth - 1):
        nxt = []
        for i in level:
            for t in mc.successors(nodes[i][-1]):
                nodes.append(nodes[i] + (t,))
                nxt.append(len(nodes) - 1)
        level = nxt
    index = {path: i for i, path in enumerate(nodes)}
    off = len(nodes)
    labels = [mc.labels[path[-1]] for path in nodes] + list(mc.labels)
    trans = []
    for path in nodes:
        row = []
        for t, p in mc.trans[path[-1]]:
            child = path + (t,)
            row.append((index[child] if child in index else t + off, p))
        trans.append(tuple(sorted(row)))
    trans.extend(tuple((t + off, p) for t, p in row) for row in mc.trans)
    return MarkovChain(tuple(labels), tuple(trans), 0, mc.ap)


def tree_prefix(mc):
    """Map each tree-shaped prefix state to its unique predecessor.

    The prefix is the largest set containing the initial state (when it has
    no predecessors) and every state whose only predecessor lies in the set.
    Each such state is visited along exactly one path, so modifying it
    affects a single node of the unfolding.
    """
    preds = mc.predecessors()
    parent = {}
    if preds[mc.init]:
        return parent
    parent[mc.init] = None
    queue = deque([mc.init])
    while queue:
        s = queue.popleft()
        for t in mc.successors(s):
            if t not in parent and preds[t] == {s}:
                parent[t] = s
                queue.append(t)
    return parent


def stutter(mc, s):
    """Repeat tree-prefix state ``s`` with probability one.

    A fresh state (index ``mc.n``) copies ``s``'s label and inherits its
    distribution; ``s`` moves to it deterministically.
    """
    if s not in tree_prefix(mc):
        raise ValueError(f"state {s} is not in the tree-shaped prefix")
    copy = mc.n
    trans = list(mc.trans)
    trans.append(mc.trans[s])
    trans[s] = ((copy, Fraction(1)),)
    return MarkovChain(mc.labels + (mc.labels[s],), tuple(trans), mc.init, mc.ap)


def shrink(mc, s):
    """Delete non-initial tree-prefix state ``s``, rewiring its parent.

    The parent ``p`` reaches each successor ``u`` of ``s`` with
    ``P(p, s) * P(s, u)``. States above ``s`` are renumbered down by one.
    """
    prefix = tree_prefix(mc)
    if s not in prefix:
        raise ValueError(f"state {s} is not in the tree-shaped prefix")
    if s == mc.init:
        raise ValueError("the initial state cannot be deleted")
    p = prefix[s]
    row = dict(mc.trans[p])
    via = row.pop(s)
    for u, q in mc.trans[s]:
        row[u] = row.get(u, 0) + via * q

    def renum(t):
        return t - 1 if t > s else t

    trans = []
    for state, old in enumerate(mc.trans):
        if state == s:
            continue
        src = row.items() if state == p else old
        trans.append(tuple(sorted((renum(t), q) for t, q in src)))
    labels = mc.labels[:s] + mc.labels[s + 1:]
    return MarkovChain(labels, tuple(trans), renum(mc.init), mc.ap)


# -- exhaustive enumeration ----------------------------------------------------


def grid_distributions(k, grid):
    """All distributions over ``range(k)`` whose non-zero entries come from ``grid``."""
    grid = sorted({Fraction(g) for g in grid if Fraction(g) > 0})
    out = []

    def rec(i, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        if i == k:
            return
        rec(i + 1, remaining, acc)
        for g in grid:
            if g <= remaining:
                rec(i + 1, remaining - g, acc + [(i, g)])

    rec(0, Fraction(1), [])
    return out


def _labelsets(alphabet):
    alphabet = sorted(alphabet)
    return [frozenset(a for a, bit in zip(alphabet, bits) if bit)
            for bits in product((False, True), repeat=len(alphabet))]


def family_size(max_states, alphabet, grid):
    """Number of raw candidates :func:`enumerate_chains` inspects."""
    n_labels = 2 ** len(set(alphabet))
    return sum((n_labels * len(grid_distributions(k, grid))) ** k for k in range(1, max_states + 1))


def enumerate_chains(max_states, alphabet, grid):
    """Every chain with 1..max_states states, labels over ``alphabet`` and
    grid-valued distributions, rooted at state 0.

    Chains with states unreachable from 0 are skipped: each is equivalent
    to a smaller chain that is enumerated anyway. Order is deterministic.
    """
    ap = frozenset(alphabet)
    labelsets = _labelsets(alphabet)
    for k in range(1, max_states + 1):
        dists = grid_distributions(k, grid)
        for rows in product(dists, repeat=k):
            mc = MarkovChain(tuple(labelsets[0] for _ in range(k)), tuple(rows), 0, ap)
            if len(reachable(mc)) != k:
                continue
            for labels in product(labelsets, repeat=k):
                yield MarkovChain(tuple(labels), tuple(rows), 0, ap)
