"""Expression evaluation and the labelled transition system of choreographies."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .core import (
    MISSING,
    INACTION,
    ActionLabel,
    At,
    BinOp,
    BranchL,
    Chor,
    Choice,
    Com,
    ComL,
    Cond,
    Expr,
    Inaction,
    Init,
    InitL,
    Lit,
    Not,
    Par,
    Rec,
    RecVar,
    State,
    Value,
    Var,
    cache_hash,
    free_session_channels,
    fresh_channel,
    is_recursion_free,
    normal_form,
    par_components,
    substitute_channel,
    unfold,
    values_equal,
)
from .errors import EvalError, RecursionNotSupported, RecursionWithoutBudget, TypeMismatch, UnboundVariable


@dataclass(frozen=True)
class Configuration:
    state: State
    chor: Chor

    def key(self) -> tuple[Chor, State]:
        """Identity up to structural congruence (alpha, ``|``/``0`` monoid laws)."""
        return (normal_form(self.chor), self.state)


@dataclass(frozen=True)
class Transition:
    label: ActionLabel
    target: Configuration


cache_hash(Configuration, Transition)


# ---------------------------------------------------------------------------
# Expressions


def _is_int(v: Value) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def eval_expr(s: State, e: Expr, at: str | None = None) -> Value:
    """Big-step evaluation; unlocated reads resolve at participant ``at``."""
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        if at is None:
            raise UnboundVariable(e.name, None)
        v = s.lookup(e.name, at)
        if v is MISSING:
            raise UnboundVariable(e.name, at)
        return v
    if isinstance(e, At):
        return eval_expr(s, e.expr, e.participant)
    if isinstance(e, Not):
        v = eval_expr(s, e.operand, at)
        if not isinstance(v, bool):
            raise TypeMismatch(f"'not' expects a boolean, got {v!r}")
        return not v
    if isinstance(e, BinOp):
        a = eval_expr(s, e.left, at)
        b = eval_expr(s, e.right, at)
        if e.op == "=":
            return type(a) is type(b) and a == b
        if e.op == "!=":
            return not (type(a) is type(b) and a == b)
        if e.op == ".":
            if isinstance(a, str) and isinstance(b, str):
                return a + b
            raise TypeMismatch(f"'.' expects strings, got {a!r} and {b!r}")
        if not (_is_int(a) and _is_int(b)):
            raise TypeMismatch(f"'{e.op}' expects integers, got {a!r} and {b!r}")
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        return a < b
    raise TypeError(e)


# ---------------------------------------------------------------------------
# Transitions


def step(cfg: Configuration) -> list[Transition]:
    """Every transition enabled from ``cfg``, in deterministic term order.

    Recursion is unfolded on demand.  Fresh session channels are the least
    ``k#n`` not free anywhere in the configuration, so the result is a pure
    function of ``cfg``.
    """
    avoid = free_session_channels(cfg.chor)
    out: list[Transition] = []
    seen = set()
    for t in _step(cfg.state, cfg.chor, avoid, frozenset()):
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def _par(left: Chor, right: Chor) -> Chor:
    if isinstance(left, Inaction):
        return right
    if isinstance(right, Inaction):
        return left
    return Par(left, right)


def _step(s: State, c: Chor, avoid: frozenset[str], unfolding: frozenset[Rec]) -> Iterator[Transition]:
    if isinstance(c, Init):
        h = fresh_channel(c.channel, avoid)
        yield Transition(InitL(c.sender, c.receiver, c.service, h),
                         Configuration(s, substitute_channel(c.cont, c.channel, h)))
    elif isinstance(c, Com):
        try:
            v = eval_expr(s, c.expr, c.sender)
        except EvalError:
            return
        yield Transition(ComL(c.sender, c.receiver, c.channel), Configuration(s.set(c.var, c.receiver, v), c.cont))
    elif isinstance(c, Choice):
        for label, cont in c.branches:
            yield Transition(BranchL(c.sender, c.receiver, c.channel, label), Configuration(s, cont))
    elif isinstance(c, Par):
        for t in _step(s, c.left, avoid, unfolding):
            yield Transition(t.label, Configuration(t.target.state, _par(t.target.chor, c.right)))
        for t in _step(s, c.right, avoid, unfolding):
            yield Transition(t.label, Configuration(t.target.state, _par(c.left, t.target.chor)))
    elif isinstance(c, Cond):
        g = guard_value(s, c.guard)
        if g is True:
            yield from _step(s, c.then, avoid, unfolding)
        elif g is False:
            yield from _step(s, c.orelse, avoid, unfolding)
    elif isinstance(c, Rec):
        # an unguarded loop such as rec X { X } never produces an action
        if c not in unfolding:
            yield from _step(s, unfold(c), avoid, unfolding | {c})


def guard_value(s: State, guard: Expr) -> bool | None:
    """The boolean a guard evaluates to, or None when it has no boolean value."""
    try:
        v = eval_expr(s, guard)
    except EvalError:
        return None
    return v if isinstance(v, bool) else None


def guard_diagnostics(cfg: Configuration) -> list[str]:
    """Messages for conditionals at the head of ``cfg`` whose guard disables both branches."""
    out = []
    for comp in par_components(cfg.chor):
        if isinstance(comp, Cond):
            try:
                v = eval_expr(cfg.state, comp.guard)
            except EvalError as exc:
                out.append(f"guard cannot be evaluated: {exc}")
                continue
            if not isinstance(v, bool):
                out.append(f"guard evaluates to non-boolean {v!r}")
    return out


def labels_match(query: ActionLabel, actual: ActionLabel) -> bool:
    if isinstance(query, InitL):
        return (
            isinstance(actual, InitL)
            and (query.sender, query.receiver, query.service) == (actual.sender, actual.receiver, actual.service)
        )
    return query == actual


def next_configs(cfg: Configuration, label: ActionLabel) -> list[tuple[Configuration, dict[str, str]]]:
    """Configurations reachable by one ``label`` step.

    An init query label matches any fresh channel; the second component maps
    the query's channel to the one actually created.  Other labels match
    syntactically and carry an empty binding.
    """
    out = []
    for t in step(cfg):
        if labels_match(label, t.label):
            binding = {label.channel: t.label.channel} if isinstance(label, InitL) else {}
            out.append((t.target, binding))
    return out


def reachable(cfg: Configuration, budget: int | None = None) -> list[Configuration]:
    """Breadth-first closure of ``cfg`` under :func:`step` (reflexive).

    Configurations are identified up to structural congruence.  With a
    budget, exploration stops at that many steps from ``cfg``.
    """
    if budget is None and not is_recursion_free(cfg.chor):
        raise RecursionWithoutBudget("reachability of a recursive choreography needs a step budget")
    seen = {cfg.key()}
    out = [cfg]
    frontier = deque([(cfg, 0)])
    while frontier:
        current, d = frontier.popleft()
        if budget is not None and d >= budget:
            continue
        for t in step(current):
            k = t.target.key()
            if k not in seen:
                seen.add(k)
                out.append(t.target)
                frontier.append((t.target, d + 1))
    return out


@dataclass
class Graph:
    nodes: list[Configuration]
    edges: list[tuple[int, ActionLabel, int]]
    complete: bool


def explore(cfg: Configuration, budget: int | None = None) -> Graph:
    """Reachable configurations with the transitions between them."""
    if budget is None and not is_recursion_free(cfg.chor):
        raise RecursionWithoutBudget("exploring a recursive choreography needs a step budget")
    index = {cfg.key(): 0}
    nodes = [cfg]
    edges = []
    complete = True
    frontier = deque([(0, 0)])
    while frontier:
        i, d = frontier.popleft()
        succ = step(nodes[i])
        if budget is not None and d >= budget:
            complete = complete and not succ
            continue
        for t in succ:
            k = t.target.key()
            if k not in index:
                index[k] = len(nodes)
                nodes.append(t.target)
                frontier.append((index[k], d + 1))
            edges.append((i, t.label, index[k]))
    return Graph(nodes, edges, complete)


# ---------------------------------------------------------------------------
# Normalisation


def norm(c: Chor) -> list[Chor]:
    """Flatten ``c`` into its multiset of non-parallel, non-inaction components."""
    if isinstance(c, (Rec, RecVar)):
        raise RecursionNotSupported("norm is defined on recursion-free choreographies only")
    if isinstance(c, Inaction):
        return []
    if isinstance(c, Par):
        return norm(c.left) + norm(c.right)
    return [c]


def product(components: list[Chor]) -> Chor:
    """Parallel product of a list; the empty product is inaction."""
    if not components:
        return INACTION
    out = components[0]
    for c in components[1:]:
        out = Par(out, c)
    return out


def struct_equiv(c1: Chor, c2: Chor) -> bool:
    if not (is_recursion_free(c1) and is_recursion_free(c2)):
        raise RecursionNotSupported("structural congruence is decided on recursion-free terms only")
    return normal_form(c1) == normal_form(c2)


def state_delta(before: State, after: State) -> dict[str, Value]:
    """Bindings of ``after`` that are new or changed relative to ``before``."""
    out = {}
    for (var, at), v in after.items():
        old = before.lookup(var, at)
        if old is MISSING or not values_equal(old, v):
            out[f"{var}@{at}"] = v
    return out
