"""Seeded random choreographies, states and formulae for property tests and sweeps."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from . import formulas as F
from .core import (
    INACTION,
    At,
    BinOp,
    BranchL,
    Chor,
    Choice,
    Com,
    ComL,
    Cond,
    Expr,
    Init,
    InitL,
    Lit,
    Not,
    Par,
    Rec,
    RecVar,
    Sort,
    State,
    Var,
    located,
    base_ident,
    children,
    free_session_channels,
    par_components,
)

PARTICIPANTS = ("A", "B", "C", "D")
SERVICES = ("a", "b")
LABELS = ("l1", "l2")
VARIABLES = ("x", "y", "z")
FREE_CHANNELS = ("k0",)
LITERALS = (0, 1, 2, True, False, "", "s")


@dataclass
class GeneratorConfig:
    participants: int = 4
    prefixes: int = 8
    par_components: int = 2
    conditionals: int = 2
    formula_depth: int = 4
    state_size: int = 3
    recursion: bool = False
    sugar: bool = False


class ChorGen:
    """Draws one term; counters enforce the prefix and conditional budgets."""

    def __init__(self, rng: random.Random, cfg: GeneratorConfig):
        self.rng = rng
        self.cfg = cfg
        self.parts = PARTICIPANTS[: max(2, cfg.participants)]
        self.prefixes_left = cfg.prefixes
        self.conds_left = cfg.conditionals
        self.counter = 0

    def pair(self) -> tuple[str, str]:
        a, b = self.rng.sample(self.parts, 2)
        return a, b

    def expr(self, depth: int = 0) -> Expr:
        r = self.rng.random()
        if depth < 1 and r < 0.3:
            op = self.rng.choice(("+", "-", ".", "=", "!=", "<"))
            return BinOp(op, self.expr(depth + 1), self.expr(depth + 1))
        if r < 0.65:
            return Var(self.rng.choice(VARIABLES))
        return Lit(self.rng.choice(LITERALS))

    def guard(self) -> Expr:
        at = self.rng.choice(self.parts)
        op = self.rng.choice(("=", "<", "!="))
        g: Expr = At(BinOp(op, Var(self.rng.choice(VARIABLES)), Lit(self.rng.choice((0, 1, 2)))), at)
        if self.rng.random() < 0.15:
            g = Not(g)
        return g

    def fresh_channel(self) -> str:
        self.counter += 1
        return f"k{self.counter}"

    def seq(self, channels: list[str], procvars: list[str]) -> Chor:
        rng = self.rng
        if self.prefixes_left <= 0 or rng.random() < 0.12:
            if procvars and rng.random() < 0.7:
                return RecVar(rng.choice(procvars))
            return INACTION
        if self.cfg.recursion and rng.random() < 0.12:
            x = f"X{len(procvars)}"
            return Rec(x, self.seq(channels, procvars + [x]))
        if self.conds_left > 0 and rng.random() < 0.15:
            self.conds_left -= 1
            return Cond(self.guard(), self.seq(channels, procvars), self.seq(channels, procvars))
        self.prefixes_left -= 1
        a, b = self.pair()
        r = rng.random()
        if r < 0.35 or not channels:
            k = self.fresh_channel() if rng.random() < 0.8 else "k"
            return Init(a, b, rng.choice(SERVICES), k, self.seq(channels + [k], procvars))
        k = rng.choice(channels)
        if r < 0.8:
            return Com(a, b, k, self.expr(), rng.choice(VARIABLES), self.seq(channels, procvars))
        labels = rng.sample(LABELS, rng.randint(1, len(LABELS)))
        return Choice(a, b, k, tuple((label, self.seq(channels, procvars)) for label in labels))

    def chor(self) -> Chor:
        n = self.rng.randint(1, max(1, self.cfg.par_components))
        comps = [self.seq(list(FREE_CHANNELS), []) for _ in range(n)]
        out = comps[0]
        for c in comps[1:]:
            out = Par(out, c)
        return out


def random_choreography(rng: random.Random, cfg: GeneratorConfig | None = None) -> Chor:
    return ChorGen(rng, cfg or GeneratorConfig()).chor()


def random_state(rng: random.Random, cfg: GeneratorConfig | None = None) -> State:
    cfg = cfg or GeneratorConfig()
    parts = PARTICIPANTS[: max(2, cfg.participants)]
    entries = {}
    for _ in range(rng.randint(0, cfg.state_size)):
        entries[(rng.choice(VARIABLES), rng.choice(parts))] = rng.choice(LITERALS)
    return State.of(entries)


class FormulaGen:
    """Draws formulae; given a choreography, labels are often taken from its prefixes."""

    def __init__(self, rng: random.Random, cfg: GeneratorConfig, chor: Chor | None = None):
        self.rng = rng
        self.cfg = cfg
        self.parts = list(PARTICIPANTS[: max(2, cfg.participants)])
        self.counter = 0
        self.hints = _prefix_labels(chor) if chor is not None else []

    def bound(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def pick(self, scope: dict[Sort, list[str]], sort: Sort, defaults) -> str:
        pool = list(defaults) + scope.get(sort, [])
        if scope.get(sort) and self.rng.random() < 0.5:
            pool = scope[sort]
        return self.rng.choice(pool)

    def label(self, scope):
        rng = self.rng
        if self.hints and rng.random() < 0.6:
            # early prefixes are the ones likely to be enabled
            label = rng.choice(self.hints[: rng.choice((1, 2, 4, len(self.hints)))])
            if isinstance(label, InitL):
                return InitL(label.sender, label.receiver, label.service, self.bound("h"))
            return label
        a = self.pick(scope, Sort.PARTICIPANT, self.parts)
        b = self.pick(scope, Sort.PARTICIPANT, self.parts)
        kind = rng.random()
        if kind < 0.35:
            return InitL(a, b, self.pick(scope, Sort.SHARED, SERVICES), self.bound("h"))
        k = self.pick(scope, Sort.SESSION, FREE_CHANNELS + ("k1", "k#1", "k1#1"))
        if kind < 0.75:
            return ComL(a, b, k)
        return BranchL(a, b, k, self.pick(scope, Sort.LABEL, LABELS))

    def expr(self, scope) -> Expr:
        rng = self.rng
        if scope.get(Sort.VARIABLE) and rng.random() < 0.3:
            # a quantified value sits in place of a literal
            return At(Var(rng.choice(scope[Sort.VARIABLE])), self.pick(scope, Sort.PARTICIPANT, self.parts))
        if rng.random() < 0.6:
            return located(rng.choice(VARIABLES), self.pick(scope, Sort.PARTICIPANT, self.parts))
        return At(Lit(rng.choice(LITERALS)), self.pick(scope, Sort.PARTICIPANT, self.parts))

    def formula(self, depth: int, scope: dict[Sort, list[str]] | None = None) -> F.Formula:
        rng = self.rng
        scope = scope or {}
        leaves = ("end", "eq")
        kinds = leaves if depth <= 0 else ("end", "eq", "and", "neg", "action", "par", "may", "exists")
        if self.cfg.sugar and depth > 0:
            kinds += ("true", "false", "or", "implies", "forall", "box", "boxaction", "next", "interact")
        kind = rng.choice(kinds)
        d = depth - 1
        if kind == "end":
            return F.EndF()
        if kind == "eq":
            left = self.expr(scope)
            if rng.random() < 0.4:
                # same read on both sides holds whenever the variable is bound
                return F.Eq(left, left)
            return F.Eq(left, self.expr(scope))
        if kind == "and":
            return F.And(self.formula(d, scope), self.formula(d, scope))
        if kind == "par":
            return F.ParF(self.formula(d, scope), self.formula(d, scope))
        if kind == "neg":
            return F.Neg(self.formula(d, scope))
        if kind == "may":
            return F.May(self.formula(d, scope))
        if kind in ("action", "boxaction"):
            label = self.label(scope)
            inner = scope
            if isinstance(label, InitL):
                inner = {**scope, Sort.SESSION: scope.get(Sort.SESSION, []) + [label.channel]}
            ctor = F.Action if kind == "action" else F.BoxAction
            return ctor(label, self.formula(d, inner))
        if kind in ("exists", "forall"):
            sort = rng.choice(F.QUANTIFIER_SORTS)
            var = self.bound({Sort.PARTICIPANT: "P", Sort.SHARED: "s", Sort.SESSION: "c",
                              Sort.LABEL: "m", Sort.VARIABLE: "v"}[sort])
            inner = {**scope, sort: scope.get(sort, []) + [var]}
            ctor = F.Exists if kind == "exists" else F.Forall
            return ctor(var, sort, self.formula(d, inner))
        if kind == "true":
            return F.TrueF()
        if kind == "false":
            return F.FalseF()
        if kind == "or":
            return F.Or(self.formula(d, scope), self.formula(d, scope))
        if kind == "implies":
            return F.Implies(self.formula(d, scope), self.formula(d, scope))
        if kind == "box":
            return F.Box(self.formula(d, scope))
        if kind == "next":
            return F.NextF(self.formula(d, scope))
        a = self.pick(scope, Sort.PARTICIPANT, self.parts)
        b = self.pick(scope, Sort.PARTICIPANT, self.parts)
        return F.Interact(a, b, self.formula(d, scope))


def _prefix_labels(c: Chor) -> list:
    """Labels the prefixes of ``c`` can fire with, channels renamed as the LTS renames them."""
    out = []
    free = free_session_channels(c)
    queue = deque([c])
    while queue:
        node = queue.popleft()
        queue.extend(children(node))
        if isinstance(node, Init):
            out.append(InitL(node.sender, node.receiver, node.service, node.channel))
        elif isinstance(node, (Com, Choice)):
            k = node.channel if node.channel in free else f"{base_ident(node.channel)}#1"
            if isinstance(node, Com):
                out.append(ComL(node.sender, node.receiver, k))
            else:
                out.extend(BranchL(node.sender, node.receiver, k, label) for label, _ in node.branches)
    return out


def random_formula(rng: random.Random, cfg: GeneratorConfig | None = None, chor: Chor | None = None) -> F.Formula:
    cfg = cfg or GeneratorConfig()
    # formula(d) has at most d + 1 levels of nesting
    levels = rng.choice([d for d in range(1, cfg.formula_depth + 1) for _ in range(d)])
    return FormulaGen(rng, cfg, chor).formula(levels - 1)


def shuffle_monoid(c: Chor, rng: random.Random) -> Chor:
    """A term equal to ``c`` modulo commutativity, associativity and unit of ``|``.

    Components are permuted, regrouped at random and padded with ``0``; the
    same happens under every prefix.
    """
    comps = [_shuffle_inside(p, rng) for p in par_components(c) if p != INACTION]
    rng.shuffle(comps)
    for _ in range(rng.randint(0, 2)):
        comps.insert(rng.randint(0, len(comps)), INACTION)
    return _regroup(comps, rng)


def _regroup(comps: list[Chor], rng: random.Random) -> Chor:
    if not comps:
        return INACTION
    if len(comps) == 1:
        return comps[0]
    cut = rng.randint(1, len(comps) - 1)
    return Par(_regroup(comps[:cut], rng), _regroup(comps[cut:], rng))


def _shuffle_inside(c: Chor, rng: random.Random) -> Chor:
    if isinstance(c, Init):
        return Init(c.sender, c.receiver, c.service, c.channel, shuffle_monoid(c.cont, rng))
    if isinstance(c, Com):
        return Com(c.sender, c.receiver, c.channel, c.expr, c.var, shuffle_monoid(c.cont, rng))
    if isinstance(c, Choice):
        branches = [(label, shuffle_monoid(b, rng)) for label, b in c.branches]
        rng.shuffle(branches)
        return Choice(c.sender, c.receiver, c.channel, tuple(branches))
    if isinstance(c, Cond):
        return Cond(c.guard, shuffle_monoid(c.then, rng), shuffle_monoid(c.orelse, rng))
    if isinstance(c, Rec):
        return Rec(c.var, shuffle_monoid(c.body, rng))
    return c
