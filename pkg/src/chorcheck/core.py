"""Syntax trees of the global calculus and the name bookkeeping around them.

Choreography and expression nodes store plain identifiers; the sort of an
identifier is fixed by the position it occupies (a participant slot, a
session-channel slot, ...).  :class:`Name` pairs an identifier with its sort
and is what the free-name functions return.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Union

from .errors import ChorError, DuplicateLabel


class Sort(enum.Enum):
    PARTICIPANT = "participant"
    SHARED = "schan"
    SESSION = "kchan"
    LABEL = "label"
    VARIABLE = "expr"
    PROCVAR = "procvar"


@dataclass(frozen=True)
class Name:
    ident: str
    sort: Sort

    def __str__(self) -> str:
        return self.ident


def participant(ident: str) -> Name:
    return Name(ident, Sort.PARTICIPANT)


def cache_hash(*classes: type) -> None:
    """Memoise the field-wise hash of frozen dataclasses.

    Terms are used as set and dict keys all the time, and the generated
    ``__hash__`` would otherwise walk the whole tree on every lookup.
    """
    for cls in classes:
        compute = cls.__hash__

        def cached(self, _compute=compute):
            h = self.__dict__.get("_hash")
            if h is None:
                h = _compute(self)
                object.__setattr__(self, "_hash", h)
            return h

        cls.__hash__ = cached


# ---------------------------------------------------------------------------
# Values and expressions

Value = Union[int, bool, str]


def value_key(v: Value) -> tuple[str, Value]:
    # bool is a subclass of int, so 1 == True must not be treated as equal
    return (type(v).__name__, v)


def values_equal(a: Value, b: Value) -> bool:
    return value_key(a) == value_key(b)


@dataclass(frozen=True, eq=False)
class Lit:
    value: Value

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Lit) and values_equal(self.value, other.value)

    def __hash__(self) -> int:
        return hash(("Lit",) + value_key(self.value))


@dataclass(frozen=True)
class Var:
    """Read of a variable; resolved at the participant evaluating it."""

    name: str


@dataclass(frozen=True)
class At:
    """``e@A``: evaluate ``e`` in the store of participant ``A``."""

    expr: "Expr"
    participant: str


BINARY_OPS = ("+", "-", ".", "=", "!=", "<")


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ChorError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Not:
    operand: "Expr"


Expr = Union[Lit, Var, At, BinOp, Not]


def located(var: str, at: str) -> At:
    return At(Var(var), at)


def expr_free_names(e: Expr) -> set[Name]:
    if isinstance(e, Lit):
        return set()
    if isinstance(e, Var):
        return {Name(e.name, Sort.VARIABLE)}
    if isinstance(e, At):
        return expr_free_names(e.expr) | {participant(e.participant)}
    if isinstance(e, BinOp):
        return expr_free_names(e.left) | expr_free_names(e.right)
    if isinstance(e, Not):
        return expr_free_names(e.operand)
    raise TypeError(e)


def expr_literals(e: Expr) -> list[Value]:
    if isinstance(e, Lit):
        return [e.value]
    if isinstance(e, Var):
        return []
    if isinstance(e, At):
        return expr_literals(e.expr)
    if isinstance(e, BinOp):
        return expr_literals(e.left) + expr_literals(e.right)
    if isinstance(e, Not):
        return expr_literals(e.operand)
    raise TypeError(e)


def expr_substitute_var(e: Expr, var: str, value: Value) -> Expr:
    if isinstance(e, Lit):
        return e
    if isinstance(e, Var):
        return Lit(value) if e.name == var else e
    if isinstance(e, At):
        return At(expr_substitute_var(e.expr, var, value), e.participant)
    if isinstance(e, BinOp):
        return BinOp(e.op, expr_substitute_var(e.left, var, value), expr_substitute_var(e.right, var, value))
    if isinstance(e, Not):
        return Not(expr_substitute_var(e.operand, var, value))
    raise TypeError(e)


def expr_rename_participant(e: Expr, old: str, new: str) -> Expr:
    if isinstance(e, (Lit, Var)):
        return e
    if isinstance(e, At):
        p = new if e.participant == old else e.participant
        return At(expr_rename_participant(e.expr, old, new), p)
    if isinstance(e, BinOp):
        return BinOp(e.op, expr_rename_participant(e.left, old, new), expr_rename_participant(e.right, old, new))
    if isinstance(e, Not):
        return Not(expr_rename_participant(e.operand, old, new))
    raise TypeError(e)


# ---------------------------------------------------------------------------
# Choreographies


@dataclass(frozen=True)
class Inaction:
    pass


@dataclass(frozen=True)
class Init:
    """``A -> B : a(k). C`` -- ``k`` is bound in ``cont``."""

    sender: str
    receiver: str
    service: str
    channel: str
    cont: "Chor"


@dataclass(frozen=True)
class Com:
    """``A -> B : k<e, y>. C`` -- ``y`` names a variable at ``B``, it is not bound."""

    sender: str
    receiver: str
    channel: str
    expr: Expr
    var: str
    cont: "Chor"


@dataclass(frozen=True)
class Choice:
    sender: str
    receiver: str
    channel: str
    branches: tuple[tuple[str, "Chor"], ...]

    def __post_init__(self):
        if not self.branches:
            raise DuplicateLabel("a choice needs at least one branch")
        labels = [label for label, _ in self.branches]
        if len(set(labels)) != len(labels):
            dup = sorted(label for label in set(labels) if labels.count(label) > 1)
            raise DuplicateLabel(f"duplicate branch label(s) {', '.join(dup)}")


@dataclass(frozen=True)
class Par:
    left: "Chor"
    right: "Chor"


@dataclass(frozen=True)
class Cond:
    guard: Expr
    then: "Chor"
    orelse: "Chor"


@dataclass(frozen=True)
class RecVar:
    name: str


@dataclass(frozen=True)
class Rec:
    var: str
    body: "Chor"


Chor = Union[Inaction, Init, Com, Choice, Par, Cond, RecVar, Rec]

cache_hash(Name, Lit, Var, At, BinOp, Not, Inaction, Init, Com, Choice, Par, Cond, RecVar, Rec)

INACTION = Inaction()


def par_all(components: Iterable[Chor]) -> Chor:
    """Right-nested parallel product; the empty product is inaction."""
    items = list(components)
    if not items:
        return INACTION
    out = items[-1]
    for c in reversed(items[:-1]):
        out = Par(c, out)
    return out


def par_components(c: Chor) -> Iterator[Chor]:
    if isinstance(c, Par):
        yield from par_components(c.left)
        yield from par_components(c.right)
    else:
        yield c


def children(c: Chor) -> tuple[Chor, ...]:
    if isinstance(c, (Init, Com)):
        return (c.cont,)
    if isinstance(c, Choice):
        return tuple(cont for _, cont in c.branches)
    if isinstance(c, Par):
        return (c.left, c.right)
    if isinstance(c, Cond):
        return (c.then, c.orelse)
    if isinstance(c, Rec):
        return (c.body,)
    return ()


def subterms(c: Chor) -> Iterator[Chor]:
    stack = [c]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


# ---------------------------------------------------------------------------
# Free names


def free_names(c: Chor) -> set[Name]:
    if isinstance(c, Inaction):
        return set()
    if isinstance(c, Init):
        inner = free_names(c.cont) - {Name(c.channel, Sort.SESSION)}
        return inner | {participant(c.sender), participant(c.receiver), Name(c.service, Sort.SHARED)}
    if isinstance(c, Com):
        return (
            free_names(c.cont)
            | expr_free_names(c.expr)
            | {
                participant(c.sender),
                participant(c.receiver),
                Name(c.channel, Sort.SESSION),
                Name(c.var, Sort.VARIABLE),
            }
        )
    if isinstance(c, Choice):
        out = {participant(c.sender), participant(c.receiver), Name(c.channel, Sort.SESSION)}
        for label, cont in c.branches:
            out |= {Name(label, Sort.LABEL)} | free_names(cont)
        return out
    if isinstance(c, Par):
        return free_names(c.left) | free_names(c.right)
    if isinstance(c, Cond):
        return expr_free_names(c.guard) | free_names(c.then) | free_names(c.orelse)
    if isinstance(c, RecVar):
        return {Name(c.name, Sort.PROCVAR)}
    if isinstance(c, Rec):
        return free_names(c.body) - {Name(c.var, Sort.PROCVAR)}
    raise TypeError(c)


@functools.lru_cache(maxsize=65536)
def free_session_channels(c: Chor) -> frozenset[str]:
    if isinstance(c, Init):
        return free_session_channels(c.cont) - {c.channel}
    if isinstance(c, Com):
        return free_session_channels(c.cont) | {c.channel}
    if isinstance(c, Choice):
        out = {c.channel}
        for _, cont in c.branches:
            out |= free_session_channels(cont)
        return frozenset(out)
    out: frozenset[str] = frozenset()
    for child in children(c):
        out |= free_session_channels(child)
    return out


def free_procvars(c: Chor) -> frozenset[str]:
    if isinstance(c, RecVar):
        return frozenset({c.name})
    if isinstance(c, Rec):
        return free_procvars(c.body) - {c.var}
    out: frozenset[str] = frozenset()
    for child in children(c):
        out |= free_procvars(child)
    return out


def all_session_names(c: Chor) -> set[str]:
    """Session channels occurring anywhere in ``c``, free or bound."""
    out = set()
    for node in subterms(c):
        if isinstance(node, (Init, Com, Choice)):
            out.add(node.channel)
    return out


def chor_literals(c: Chor) -> list[Value]:
    out: list[Value] = []
    for node in subterms(c):
        if isinstance(node, Com):
            out.extend(expr_literals(node.expr))
        elif isinstance(node, Cond):
            out.extend(expr_literals(node.guard))
    return out


def is_recursion_free(c: Chor) -> bool:
    return not any(isinstance(node, (Rec, RecVar)) for node in subterms(c))


# ---------------------------------------------------------------------------
# Fresh names and substitution


def base_ident(ident: str) -> str:
    return ident.split("#", 1)[0]


def fresh_channel(k: str, avoid: Iterable[str]) -> str:
    """Least ``base#n`` (n >= 1) not in ``avoid``, where ``base`` is ``k`` minus any suffix."""
    base = base_ident(k)
    taken = set(avoid)
    n = 1
    while f"{base}#{n}" in taken:
        n += 1
    return f"{base}#{n}"


def substitute_channel(c: Chor, old: str, new: str) -> Chor:
    """Capture-avoiding ``c[new/old]`` on session channels."""
    if old == new:
        return c
    return _subst_channel(c, old, new)


def _subst_channel(c: Chor, old: str, new: str) -> Chor:
    if isinstance(c, Init):
        if c.channel == old:
            return c
        if c.channel == new and old in free_session_channels(c.cont):
            renamed = fresh_channel(new, free_session_channels(c.cont) | {old, new})
            cont = _subst_channel(c.cont, new, renamed)
            return replace(c, channel=renamed, cont=_subst_channel(cont, old, new))
        return replace(c, cont=_subst_channel(c.cont, old, new))
    if isinstance(c, Com):
        ch = new if c.channel == old else c.channel
        return replace(c, channel=ch, cont=_subst_channel(c.cont, old, new))
    if isinstance(c, Choice):
        ch = new if c.channel == old else c.channel
        return Choice(
            c.sender, c.receiver, ch, tuple((label, _subst_channel(cont, old, new)) for label, cont in c.branches)
        )
    if isinstance(c, Par):
        return Par(_subst_channel(c.left, old, new), _subst_channel(c.right, old, new))
    if isinstance(c, Cond):
        return Cond(c.guard, _subst_channel(c.then, old, new), _subst_channel(c.orelse, old, new))
    if isinstance(c, Rec):
        return Rec(c.var, _subst_channel(c.body, old, new))
    return c


def substitute_procvar(c: Chor, var: str, term: Chor) -> Chor:
    """Capture-avoiding ``c[term/var]`` on process variables."""
    return _subst_proc(c, var, term, free_session_channels(term), free_procvars(term))


def _subst_proc(c: Chor, var: str, term: Chor, term_fs: frozenset[str], term_fp: frozenset[str]) -> Chor:
    if isinstance(c, RecVar):
        return term if c.name == var else c
    if isinstance(c, Inaction):
        return c
    if isinstance(c, Rec):
        if c.var == var:
            return c
        if c.var in term_fp:
            renamed = c.var
            taken = free_procvars(c.body) | term_fp
            while renamed in taken:
                renamed += "'"
            body = _subst_proc(c.body, c.var, RecVar(renamed), frozenset(), frozenset({renamed}))
            return Rec(renamed, _subst_proc(body, var, term, term_fs, term_fp))
        return Rec(c.var, _subst_proc(c.body, var, term, term_fs, term_fp))
    if isinstance(c, Init):
        if c.channel in term_fs:
            renamed = fresh_channel(c.channel, free_session_channels(c.cont) | term_fs)
            cont = substitute_channel(c.cont, c.channel, renamed)
            return replace(c, channel=renamed, cont=_subst_proc(cont, var, term, term_fs, term_fp))
        return replace(c, cont=_subst_proc(c.cont, var, term, term_fs, term_fp))
    if isinstance(c, Com):
        return replace(c, cont=_subst_proc(c.cont, var, term, term_fs, term_fp))
    if isinstance(c, Choice):
        return replace(
            c, branches=tuple((label, _subst_proc(cont, var, term, term_fs, term_fp)) for label, cont in c.branches)
        )
    if isinstance(c, Par):
        return Par(_subst_proc(c.left, var, term, term_fs, term_fp), _subst_proc(c.right, var, term, term_fs, term_fp))
    if isinstance(c, Cond):
        return Cond(
            c.guard, _subst_proc(c.then, var, term, term_fs, term_fp), _subst_proc(c.orelse, var, term, term_fs, term_fp)
        )
    raise TypeError(c)


def unfold(c: Chor) -> Chor:
    """One-step unfolding ``rec X { C }`` to ``C[rec X { C }/X]``."""
    if not isinstance(c, Rec):
        raise ChorError(f"unfold expects a recursion, got {type(c).__name__}")
    return substitute_procvar(c.body, c.var, c)


# ---------------------------------------------------------------------------
# Canonical forms


def _sort_key(c: Chor) -> str:
    return repr(c)


def _canon(c: Chor, senv: dict[str, str], penv: dict[str, str], monoid: bool) -> Chor:
    if isinstance(c, Inaction):
        return c
    if isinstance(c, Init):
        bound = f"%{len(senv)}"
        cont = _canon(c.cont, {**senv, c.channel: bound}, penv, monoid)
        return Init(c.sender, c.receiver, c.service, bound, cont)
    if isinstance(c, Com):
        return Com(c.sender, c.receiver, senv.get(c.channel, c.channel), c.expr, c.var,
                   _canon(c.cont, senv, penv, monoid))
    if isinstance(c, Choice):
        branches = sorted((label, _canon(cont, senv, penv, monoid)) for label, cont in c.branches)
        return Choice(c.sender, c.receiver, senv.get(c.channel, c.channel), tuple(branches))
    if isinstance(c, Par):
        if not monoid:
            return Par(_canon(c.left, senv, penv, monoid), _canon(c.right, senv, penv, monoid))
        parts = [_canon(p, senv, penv, monoid) for p in par_components(c)]
        parts = [p for p in parts if not isinstance(p, Inaction)]
        return par_all(sorted(parts, key=_sort_key))
    if isinstance(c, Cond):
        return Cond(c.guard, _canon(c.then, senv, penv, monoid), _canon(c.orelse, senv, penv, monoid))
    if isinstance(c, RecVar):
        return RecVar(penv.get(c.name, c.name))
    if isinstance(c, Rec):
        bound = f"%X{len(penv)}"
        return Rec(bound, _canon(c.body, senv, {**penv, c.var: bound}, monoid))
    raise TypeError(c)


@functools.lru_cache(maxsize=65536)
def alpha_canonical(c: Chor) -> Chor:
    """Rename bound channels/process variables by binder depth and sort choice branches."""
    return _canon(c, {}, {}, monoid=False)


@functools.lru_cache(maxsize=65536)
def normal_form(c: Chor) -> Chor:
    """:func:`alpha_canonical` plus the commutative-monoid laws of ``|`` and ``0``.

    Two terms have equal normal forms iff they are structurally congruent
    without recursion unfolding.
    """
    return _canon(c, {}, {}, monoid=True)


def alpha_equal(c1: Chor, c2: Chor) -> bool:
    return alpha_canonical(c1) == alpha_canonical(c2)


# ---------------------------------------------------------------------------
# States and labels


_MISSING = object()


@dataclass(frozen=True)
class State:
    """Immutable store mapping ``(variable, participant)`` to a value."""

    entries: tuple[tuple[str, str, Lit], ...] = ()

    @classmethod
    def of(cls, mapping: dict[tuple[str, str], Value] | None = None) -> "State":
        mapping = mapping or {}
        return cls(tuple(sorted((var, at, Lit(v)) for (var, at), v in mapping.items())))

    def lookup(self, var: str, at: str):
        """Value bound at ``var@at``, or :data:`MISSING`."""
        for v, p, lit in self.entries:
            if v == var and p == at:
                return lit.value
        return _MISSING

    def __contains__(self, key: tuple[str, str]) -> bool:
        return self.lookup(*key) is not _MISSING

    def set(self, var: str, at: str, value: Value) -> "State":
        kept = [e for e in self.entries if (e[0], e[1]) != (var, at)]
        kept.append((var, at, Lit(value)))
        return State(tuple(sorted(kept, key=lambda e: (e[0], e[1]))))

    def items(self) -> list[tuple[tuple[str, str], Value]]:
        return [((v, p), lit.value) for v, p, lit in self.entries]

    def values(self) -> list[Value]:
        return [lit.value for _, _, lit in self.entries]

    def to_dict(self) -> dict[str, Value]:
        return {f"{v}@{p}": lit.value for v, p, lit in self.entries}

    def __len__(self) -> int:
        return len(self.entries)


MISSING = _MISSING


@dataclass(frozen=True)
class InitL:
    sender: str
    receiver: str
    service: str
    channel: str

    def __str__(self) -> str:
        return f"init({self.sender}, {self.receiver}, {self.service}({self.channel}))"


@dataclass(frozen=True)
class ComL:
    sender: str
    receiver: str
    channel: str

    def __str__(self) -> str:
        return f"com({self.sender}, {self.receiver}, {self.channel})"


@dataclass(frozen=True)
class BranchL:
    sender: str
    receiver: str
    channel: str
    label: str

    def __str__(self) -> str:
        return f"branch({self.sender}, {self.receiver}, {self.channel}, {self.label})"


ActionLabel = Union[InitL, ComL, BranchL]

cache_hash(State, InitL, ComL, BranchL)


def label_names(label: ActionLabel) -> set[Name]:
    out = {participant(label.sender), participant(label.receiver), Name(label.channel, Sort.SESSION)}
    if isinstance(label, InitL):
        out.add(Name(label.service, Sort.SHARED))
    elif isinstance(label, BranchL):
        out.add(Name(label.label, Sort.LABEL))
    return out


def label_to_json(label: ActionLabel) -> dict[str, str]:
    if isinstance(label, InitL):
        return {"kind": "init", "from": label.sender, "to": label.receiver,
                "service": label.service, "channel": label.channel}
    if isinstance(label, ComL):
        return {"kind": "com", "from": label.sender, "to": label.receiver, "channel": label.channel}
    return {"kind": "branch", "from": label.sender, "to": label.receiver,
            "channel": label.channel, "label": label.label}
