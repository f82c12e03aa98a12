"""Direct evaluation of the satisfaction relation, kept apart from the prover.

This module deliberately shares no rule dispatch with
:mod:`chorcheck.checker`: it walks transitions itself, decomposes parallel
terms by its own splitting, and decides ``end`` through structural
congruence.  Only the LTS, the formula substitution and the quantifier
domain are common ground.
"""

from __future__ import annotations

from typing import Iterator

from . import formulas as F
from .checker import quantifier_domain
from .core import INACTION, Chor, InitL, Par, Sort, State, is_recursion_free
from .errors import EvalError, RecursionNotSupported
from .semantics import Configuration, eval_expr, norm, step, struct_equiv


def satisfies_naive(cfg: Configuration, f: F.Formula) -> bool:
    if not is_recursion_free(cfg.chor):
        raise RecursionNotSupported("the oracle handles recursion-free choreographies only")
    if not F.is_core(f):
        raise ValueError("satisfies_naive expects a formula without derived operators")
    return _sat(cfg.state, cfg.chor, f)


def _splits(parts: list[Chor]) -> Iterator[tuple[Chor, Chor]]:
    """All ways of writing ``prod(parts)`` as ``C1 | C2`` with the components dealt out."""
    if not parts:
        yield INACTION, INACTION
        return
    head, rest = parts[0], parts[1:]
    for c1, c2 in _splits(rest):
        yield _join(head, c1), c2
        yield c1, _join(head, c2)


def _join(a: Chor, b: Chor) -> Chor:
    return a if b == INACTION else Par(a, b)


def _same_value(a, b) -> bool:
    return type(a) is type(b) and a == b


def _sat(s: State, c: Chor, f: F.Formula) -> bool:
    if isinstance(f, F.EndF):
        return struct_equiv(c, INACTION)
    if isinstance(f, F.Eq):
        try:
            return _same_value(eval_expr(s, f.left), eval_expr(s, f.right))
        except EvalError:
            return False
    if isinstance(f, F.And):
        return _sat(s, c, f.left) and _sat(s, c, f.right)
    if isinstance(f, F.Neg):
        return not _sat(s, c, f.body)
    if isinstance(f, F.Action):
        q = f.label
        for t in step(Configuration(s, c)):
            if isinstance(q, InitL):
                if not isinstance(t.label, InitL):
                    continue
                if (t.label.sender, t.label.receiver, t.label.service) != (q.sender, q.receiver, q.service):
                    continue
                body = F.substitute(f.body, q.channel, Sort.SESSION, t.label.channel)
            else:
                if t.label != q:
                    continue
                body = f.body
            if _sat(t.target.state, t.target.chor, body):
                return True
        return False
    if isinstance(f, F.May):
        seen = set()
        stack = [(s, c)]
        while stack:
            s1, c1 = stack.pop()
            if (s1, c1) in seen:
                continue
            seen.add((s1, c1))
            if _sat(s1, c1, f.body):
                return True
            for t in step(Configuration(s1, c1)):
                stack.append((t.target.state, t.target.chor))
        return False
    if isinstance(f, F.ParF):
        return any(_sat(s, c1, f.left) and _sat(s, c2, f.right) for c1, c2 in _splits(norm(c)))
    if isinstance(f, F.Exists):
        cfg = Configuration(s, c)
        return any(_sat(s, c, F.substitute(f.body, f.var, f.sort, w)) for w in quantifier_domain(cfg, f.body, f.sort))
    raise TypeError(f"not a core formula: {f!r}")
