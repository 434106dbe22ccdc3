"""Exception types shared across the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets ``[start, end)`` into a parsed input string."""

    start: int
    end: int


class ProbSafeError(Exception):
    """Base class for all library errors."""


class ParseError(ProbSafeError):
    def __init__(self, message, span=None, line=None):
        self.message = message
        self.span = span
        self.line = line
        where = ""
        if line is not None:
            where = f"line {line}: "
        elif span is not None:
            where = f"at {span.start}..{span.end}: "
        super().__init__(where + message)


class BoundOutOfRange(ParseError):
    """A probability threshold outside ``[0, 1]``."""


class InvalidChain(ProbSafeError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid Markov chain: " + "; ".join(self.violations))


class SizeLimitExceeded(ProbSafeError):
    def __init__(self, message, count=None):
        self.count = count
        super().__init__(message)


class DepthBudgetExceeded(ProbSafeError):
    pass


class NotLiteral(ProbSafeError, ValueError):
    pass


class NotFlat(ProbSafeError, ValueError):
    pass


class StrictBoundError(NotFlat):
    """Closure of a strict-bound formula is not expressible in PCTL."""


class ConjunctionClosure(ProbSafeError, ValueError):
    """Closure does not distribute over conjunction of non-literals."""


class UnsupportedShape(ProbSafeError, ValueError):
    pass


class TreeError(ProbSafeError, ValueError):
    pass
