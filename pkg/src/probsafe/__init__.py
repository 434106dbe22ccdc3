"""Safety and liveness analysis for PCTL over finite Markov chains."""

from .counterexample import FiniteCounterexample, find_counterexample, verify_counterexample
from .errors import (
    BoundOutOfRange,
    ConjunctionClosure,
    DepthBudgetExceeded,
    InvalidChain,
    NotFlat,
    NotLiteral,
    ParseError,
    ProbSafeError,
    SizeLimitExceeded,
    StrictBoundError,
    TreeError,
    UnsupportedShape,
)
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
    dual,
    eventually,
    flat_outer_cnf,
    globally,
    is_flat,
    negate,
    to_pnf,
)
from .markov import MarkovChain, load_mc, random_mc, save_mc, validate
from .modelcheck import check, ctl_check, prob_until, sat_states
from .parser import parse_ctl, parse_formula, print_formula
from .simulation import logical_preorder_spotcheck, strong_simulation, weight_function_exists
from .taxonomy import (
    classify,
    cls_flat,
    decompose_flat,
    in_alive,
    in_live_gt,
    in_live_lt,
    in_safe,
    in_ssafe,
)
from .trees import ProbTree, extension_oracle, from_unfolding, is_prefix, shrink_tree, stutter_tree, suffix_at

__version__ = "0.1.0"

__all__ = [
    "FiniteCounterexample",
    "find_counterexample",
    "verify_counterexample",
    "BoundOutOfRange",
    "ConjunctionClosure",
    "DepthBudgetExceeded",
    "InvalidChain",
    "NotFlat",
    "NotLiteral",
    "ParseError",
    "ProbSafeError",
    "SizeLimitExceeded",
    "StrictBoundError",
    "TreeError",
    "UnsupportedShape",
    "And",
    "Atom",
    "Bot",
    "Cmp",
    "Next",
    "Not",
    "Or",
    "Prob",
    "Top",
    "Until",
    "WeakUntil",
    "BOT",
    "TOP",
    "dual",
    "eventually",
    "flat_outer_cnf",
    "globally",
    "is_flat",
    "negate",
    "to_pnf",
    "MarkovChain",
    "load_mc",
    "random_mc",
    "save_mc",
    "validate",
    "check",
    "ctl_check",
    "prob_until",
    "sat_states",
    "parse_ctl",
    "parse_formula",
    "print_formula",
    "logical_preorder_spotcheck",
    "strong_simulation",
    "weight_function_exists",
    "classify",
    "cls_flat",
    "decompose_flat",
    "in_alive",
    "in_live_gt",
    "in_live_lt",
    "in_safe",
    "in_ssafe",
    "ProbTree",
    "extension_oracle",
    "from_unfolding",
    "is_prefix",
    "shrink_tree",
    "stutter_tree",
    "suffix_at",
    "__version__",
]
