"""Formulae of the global logic.

Eight core constructors carry the meaning; the remaining node types are
sugar that :func:`chorcheck.checker.expand_derived` rewrites away.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .core import (
    ActionLabel,
    BranchL,
    ComL,
    Expr,
    InitL,
    Name,
    Sort,
    Value,
    cache_hash,
    expr_free_names,
    expr_literals,
    expr_rename_participant,
    expr_substitute_var,
    label_names,
)

# core constructors


@dataclass(frozen=True)
class Exists:
    var: str
    sort: Sort
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Neg:
    body: "Formula"


@dataclass(frozen=True)
class Action:
    """``<l> phi``.  For init labels the session channel binds in ``body``."""

    label: ActionLabel
    body: "Formula"


@dataclass(frozen=True)
class EndF:
    pass


@dataclass(frozen=True)
class Eq:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class ParF:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class May:
    body: "Formula"


# sugar


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    sort: Sort
    body: "Formula"


@dataclass(frozen=True)
class Box:
    body: "Formula"


@dataclass(frozen=True)
class BoxAction:
    label: ActionLabel
    body: "Formula"


@dataclass(frozen=True)
class NextF:
    body: "Formula"


# the label-quantified modality and "next" are the same operator
ExistsLabel = NextF


@dataclass(frozen=True)
class Interact:
    sender: str
    receiver: str
    body: "Formula"


CORE_TYPES = (Exists, And, Neg, Action, EndF, Eq, ParF, May)
SUGAR_TYPES = (TrueF, FalseF, Or, Implies, Forall, Box, BoxAction, NextF, Interact)
cache_hash(*CORE_TYPES, *SUGAR_TYPES)

Formula = Union[
    Exists, And, Neg, Action, EndF, Eq, ParF, May,
    TrueF, FalseF, Or, Implies, Forall, Box, BoxAction, NextF, Interact,
]

QUANTIFIER_SORTS = (Sort.PARTICIPANT, Sort.SHARED, Sort.SESSION, Sort.LABEL, Sort.VARIABLE)

_UNARY = (Neg, May, Box, NextF)
_BINARY = (And, ParF, Or, Implies)
_BINDERS = (Exists, Forall)
_LABELLED = (Action, BoxAction)


def is_core(f: Formula) -> bool:
    if isinstance(f, SUGAR_TYPES):
        return False
    if isinstance(f, (EndF, Eq)):
        return True
    if isinstance(f, _BINARY):
        return is_core(f.left) and is_core(f.right)
    return is_core(f.body)


def subformulas(f: Formula) -> list[Formula]:
    if isinstance(f, _BINARY):
        return [f.left, f.right]
    if isinstance(f, (TrueF, FalseF, EndF, Eq)):
        return []
    return [f.body]


def depth(f: Formula) -> int:
    subs = subformulas(f)
    return 1 + max((depth(s) for s in subs), default=0)


def free_names_formula(f: Formula) -> set[Name]:
    """Free names of ``f``; quantifiers bind, labels contribute every component."""
    if isinstance(f, (TrueF, FalseF, EndF)):
        return set()
    if isinstance(f, Eq):
        return expr_free_names(f.left) | expr_free_names(f.right)
    if isinstance(f, _BINDERS):
        return free_names_formula(f.body) - {Name(f.var, f.sort)}
    if isinstance(f, _LABELLED):
        return label_names(f.label) | free_names_formula(f.body)
    if isinstance(f, Interact):
        return {Name(f.sender, Sort.PARTICIPANT), Name(f.receiver, Sort.PARTICIPANT)} | free_names_formula(f.body)
    if isinstance(f, _BINARY):
        return free_names_formula(f.left) | free_names_formula(f.right)
    return free_names_formula(f.body)


def bound_names_formula(f: Formula) -> set[str]:
    out: set[str] = set()
    if isinstance(f, _BINDERS):
        out.add(f.var)
    if isinstance(f, _LABELLED) and isinstance(f.label, InitL):
        out.add(f.label.channel)
    for s in subformulas(f):
        out |= bound_names_formula(s)
    return out


def formula_literals(f: Formula) -> list[Value]:
    if isinstance(f, Eq):
        return expr_literals(f.left) + expr_literals(f.right)
    out: list[Value] = []
    for s in subformulas(f):
        out.extend(formula_literals(s))
    return out


def _rename_in_label(label: ActionLabel, sort: Sort, old: str, new: str) -> ActionLabel:
    def r(x: str) -> str:
        return new if x == old else x

    if sort is Sort.PARTICIPANT:
        if isinstance(label, InitL):
            return InitL(r(label.sender), r(label.receiver), label.service, label.channel)
        if isinstance(label, ComL):
            return ComL(r(label.sender), r(label.receiver), label.channel)
        return BranchL(r(label.sender), r(label.receiver), label.channel, label.label)
    if sort is Sort.SHARED and isinstance(label, InitL):
        return InitL(label.sender, label.receiver, r(label.service), label.channel)
    if sort is Sort.SESSION and not isinstance(label, InitL):
        if isinstance(label, ComL):
            return ComL(label.sender, label.receiver, r(label.channel))
        return BranchL(label.sender, label.receiver, r(label.channel), label.label)
    if sort is Sort.LABEL and isinstance(label, BranchL):
        return BranchL(label.sender, label.receiver, label.channel, r(label.label))
    return label


def _occurs_free(f: Formula, var: str, sort: Sort) -> bool:
    return Name(var, sort) in free_names_formula(f)


def _fresh_ident(base: str, avoid: set[str]) -> str:
    n = 1
    while f"{base}_{n}" in avoid:
        n += 1
    return f"{base}_{n}"


def substitute(f: Formula, var: str, sort: Sort, witness: str | Value) -> Formula:
    """Capture-avoiding ``f[witness/var]`` for a name of the given sort.

    For ``Sort.VARIABLE`` the witness is a value that replaces reads of ``var``;
    for every other sort it is an identifier.
    """
    if isinstance(f, (TrueF, FalseF, EndF)):
        return f
    if isinstance(f, Eq):
        if sort is Sort.VARIABLE:
            return Eq(expr_substitute_var(f.left, var, witness), expr_substitute_var(f.right, var, witness))
        if sort is Sort.PARTICIPANT:
            return Eq(expr_rename_participant(f.left, var, witness), expr_rename_participant(f.right, var, witness))
        return f
    if isinstance(f, _BINDERS):
        if f.var == var and f.sort is sort:
            return f
        body = f.body
        name = f.var
        if sort is not Sort.VARIABLE and f.sort is sort and f.var == witness and _occurs_free(body, var, sort):
            avoid = {n.ident for n in free_names_formula(body)} | {var, witness} | bound_names_formula(body)
            name = _fresh_ident(f.var, avoid)
            body = substitute(body, f.var, f.sort, name)
        return type(f)(name, f.sort, substitute(body, var, sort, witness))
    if isinstance(f, _LABELLED):
        label = _rename_in_label(f.label, sort, var, witness)
        body = f.body
        if isinstance(label, InitL) and sort is Sort.SESSION:
            k = label.channel
            if k == var:
                return type(f)(label, body)
            if k == witness and _occurs_free(body, var, sort):
                avoid = {n.ident for n in free_names_formula(body)} | {var, witness} | bound_names_formula(body)
                renamed = _fresh_ident(k, avoid)
                body = substitute(body, k, Sort.SESSION, renamed)
                label = InitL(label.sender, label.receiver, label.service, renamed)
        return type(f)(label, substitute(body, var, sort, witness))
    if isinstance(f, Interact):
        s, r = f.sender, f.receiver
        if sort is Sort.PARTICIPANT:
            s = witness if s == var else s
            r = witness if r == var else r
        return Interact(s, r, substitute(f.body, var, sort, witness))
    if isinstance(f, _BINARY):
        return type(f)(substitute(f.left, var, sort, witness), substitute(f.right, var, sort, witness))
    return type(f)(substitute(f.body, var, sort, witness))
