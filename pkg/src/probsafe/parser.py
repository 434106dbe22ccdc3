"""Concrete syntax for PCTL state formulas and qualitative CTL queries.

Grammar (whitespace-insensitive, ``#`` starts a comment)::

    state   := disj
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '!' unary | primary
    primary := 'true' | 'false' | IDENT | '(' state ')'
             | 'P' CMP NUMBER '[' path ']'
    path    := 'X' state | 'F' state | 'G' state | state ('U' | 'W') state

``P=1`` is accepted as ``P>=1`` and ``P=0`` as ``P<=0``. The single
letters ``P X F G U W E A`` are reserved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import BoundOutOfRange, ParseError, SourceSpan
from .formula import (
    And,
    Atom,
    Bot,
    Cmp,
    Next,
    Not,
    Or,
    Prob,
    Top,
    Until,
    WeakUntil,
    BOT,
    TOP,
    eventually,
    globally,
)
from .rational import format_rational

KEYWORDS = {"P", "X", "F", "G", "U", "W", "E", "A", "true", "false"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>\d+/\d+|\d+(?:\.\d*)?|\.\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|<|>|=|!|&|\||\(|\)|\[|\])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'ident', 'kw', 'op', 'eof'
    text: str
    start: int
    end: int


def _byte_offsets(text):
    """Map char offsets to UTF-8 byte offsets (inputs are usually ASCII)."""
    if text.isascii():
        return None
    table = [0]
    for ch in text:
        table.append(table[-1] + len(ch.encode("utf-8")))
    return table


def tokenize(text):
    table = _byte_offsets(text)

    def b(i):
        return i if table is None else table[i]

    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(b(pos), b(pos + 1)))
        kind = m.lastgroup
        if kind != "ws":
            word = m.group()
            if kind == "ident" and word in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, word, b(m.start()), b(m.end())))
        pos = m.end()
    tokens.append(Token("eof", "", b(len(text)), b(len(text))))
    return tokens


_CMP = {"<": Cmp.LT, "<=": Cmp.LE, ">": Cmp.GT, ">=": Cmp.GE}


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, expected, tok=None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"expected {expected}, found {found}", SourceSpan(tok.start, tok.end))

    def accept(self, text):
        if self.tok.text == text and self.tok.kind in ("op", "kw"):
            return self.advance()
        return None

    def expect(self, text):
        tok = self.accept(text)
        if tok is None:
            raise self.error(repr(text))
        return tok

    def finish(self):
        if self.tok.kind != "eof":
            raise self.error("end of input")

    # state formulas

    def state(self):
        left = self.conj()
        while self.accept("|"):
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.accept("&"):
            left = And(left, self.unary())
        return left

    def unary(self):
        if self.accept("!"):
            return Not(self.unary())
        return self.primary()

    def primary(self):
        tok = self.tok
        if tok.kind == "kw" and tok.text == "true":
            self.advance()
            return TOP
        if tok.kind == "kw" and tok.text == "false":
            self.advance()
            return BOT
        if tok.kind == "ident":
            self.advance()
            return Atom(tok.text)
        if self.accept("("):
            inner = self.state()
            self.expect(")")
            return inner
        if tok.kind == "kw" and tok.text == "P":
            return self.prob()
        raise self.error("a state formula")

    def prob(self):
        start = self.advance()
        cmp_tok = self.tok
        if cmp_tok.kind != "op" or cmp_tok.text not in ("<", "<=", ">", ">=", "="):
            raise self.error("a comparison (<, <=, >, >=, =)")
        self.advance()
        num = self.tok
        if num.kind != "num":
            raise self.error("a probability bound")
        self.advance()
        q = _to_fraction(num)
        span = SourceSpan(start.start, num.end)
        if not 0 <= q <= 1:
            raise BoundOutOfRange(f"probability bound {num.text} outside [0, 1]", span)
        if cmp_tok.text == "=":
            if q == 1:
                cmp = Cmp.GE
            elif q == 0:
                cmp = Cmp.LE
            else:
                raise ParseError("'P=' only admits the bounds 0 and 1", span)
        else:
            cmp = _CMP[cmp_tok.text]
        self.expect("[")
        path = self.path()
        self.expect("]")
        return Prob(cmp, q, path)

    def path(self):
        if self.accept("X"):
            return Next(self.state())
        if self.accept("F"):
            return eventually(self.state())
        if self.accept("G"):
            return globally(self.state())
        lhs = self.state()
        if self.accept("U"):
            return Until(lhs, self.state())
        if self.accept("W"):
            return WeakUntil(lhs, self.state())
        raise self.error("'U' or 'W'")


def _to_fraction(tok):
    if "/" in tok.text:
        n, d = tok.text.split("/")
        if int(d) == 0:
            raise ParseError("zero denominator", SourceSpan(tok.start, tok.end))
        return Fraction(int(n), int(d))
    return Fraction(tok.text)


def parse_formula(text):
    """Parse a PCTL state formula."""
    p = _Parser(text)
    phi = p.state()
    p.finish()
    return phi


def parse_formula_file(text):
    """One formula per non-blank line; ``#`` comments are ignored."""
    formulas = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        try:
            formulas.append(parse_formula(body))
        except ParseError as exc:
            raise ParseError(exc.message, exc.span, line=lineno) from exc
    return formulas


# -- printing ----------------------------------------------------------------

_PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3


def print_formula(phi):
    """Render ``phi`` so that :func:`parse_formula` reproduces it exactly."""
    return _show(phi, 0)


def _show(phi, ctx):
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bot):
        return "false"
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Not):
        return "!" + _show(phi.inner, _PREC_UNARY)
    if isinstance(phi, Prob):
        return f"P{phi.cmp.value}{format_rational(phi.q)}[{_show_path(phi.path)}]"
    if isinstance(phi, And):
        prec, op = _PREC_AND, "&"
    elif isinstance(phi, Or):
        prec, op = _PREC_OR, "|"
    else:
        raise TypeError(f"not a state formula: {phi!r}")
    # operators associate to the left: a right operand of equal precedence needs parentheses
    text = f"{_show(phi.left, prec)} {op} {_show(phi.right, prec + 1)}"
    return f"({text})" if prec < ctx else text


def _show_path(path):
    if isinstance(path, Next):
        return "X " + _show(path.arg, 0)
    op = "U" if isinstance(path, Until) else "W"
    # U/W are non-associative and bind loosest inside brackets
    return f"{_show(path.lhs, 0)} {op} {_show(path.rhs, 0)}"


# -- CTL queries ---------------------------------------------------------------


def parse_ctl(text):
    """Parse ``EF φ``, ``AF φ``, ``EG φ``, ``AG φ`` or ``E[φ U ψ]`` over literals."""
    from .modelcheck import AllEventually, AllGlobally, ExistsEventually, ExistsGlobally, ExistsUntil

    p = _Parser(text)
    tok = p.tok
    if tok.kind == "kw" and tok.text == "E" and p.tokens[p.i + 1].text == "[":
        p.advance()
        p.expect("[")
        lhs = p.state()
        p.expect("U")
        rhs = p.state()
        p.expect("]")
        p.finish()
        return ExistsUntil(lhs, rhs)
    table = {
        ("E", "F"): ExistsEventually,
        ("A", "F"): AllEventually,
        ("E", "G"): ExistsGlobally,
        ("A", "G"): AllGlobally,
    }
    # "AF" lexes as one identifier; "A F" as two keywords
    if tok.kind == "ident" and len(tok.text) == 2 and (tok.text[0], tok.text[1]) in table:
        p.advance()
        arg = p.state()
        p.finish()
        return table[(tok.text[0], tok.text[1])](arg)
    if tok.kind == "kw" and tok.text in ("E", "A"):
        p.advance()
        mod = p.tok
        key = (tok.text, mod.text)
        if mod.kind == "kw" and key in table:
            p.advance()
            arg = p.state()
            p.finish()
            return table[key](arg)
        raise p.error("'F', 'G' or '['")
    raise p.error("a CTL query (EF, AF, EG, AG, E[.. U ..])")
