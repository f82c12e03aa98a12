"""Choreographies in the Global Calculus, their transition semantics and a logic to check them."""

from .checker import Proof, Verdict, check_proof, entails, expand_derived, quantifier_domain
from .core import State, alpha_equal, free_names, is_recursion_free, substitute_channel, unfold
from .errors import ChorError, ParseError, RecursionNotSupported, RecursionWithoutBudget
from .oracle import satisfies_naive
from .pcp import PcpInstance, bounded_search, encode_pcp, pcp_formula
from .semantics import Configuration, Transition, eval_expr, next_configs, norm, reachable, step, struct_equiv
from .syntax import (
    parse_choreography,
    parse_document,
    parse_formula,
    parse_state,
    print_choreography,
    print_formula,
)

__all__ = [
    "ChorError", "Configuration", "ParseError", "PcpInstance", "Proof", "RecursionNotSupported",
    "RecursionWithoutBudget", "State", "Transition", "Verdict", "alpha_equal", "bounded_search",
    "check_proof", "encode_pcp", "entails", "eval_expr", "expand_derived", "free_names",
    "is_recursion_free", "next_configs", "norm", "parse_choreography", "parse_document",
    "parse_formula", "parse_state", "pcp_formula", "print_choreography", "print_formula",
    "quantifier_domain", "reachable", "satisfies_naive", "step", "struct_equiv",
    "substitute_channel", "unfold",
]
