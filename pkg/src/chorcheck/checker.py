"""Decision procedure for ``C |-_sigma phi`` on recursion-free choreographies.

Each formula constructor has exactly one proof rule; :func:`entails` searches
for a derivation and optionally records it as a :class:`Proof` tree that
:func:`check_proof` can replay.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import formulas as F
from .core import (
    At,
    BranchL,
    ComL,
    Init,
    InitL,
    Lit,
    Rec,
    RecVar,
    Sort,
    Value,
    all_session_names,
    base_ident,
    chor_literals,
    free_names,
    subterms,
    value_key,
    values_equal,
)
from .errors import EvalError, RecursionNotSupported
from .semantics import Configuration, eval_expr, next_configs, norm, product, reachable

Witness = Union[str, Value]


# ---------------------------------------------------------------------------
# Derived operators


def _disjunction(parts: list[F.Formula]) -> F.Formula:
    out = parts[0]
    for p in parts[1:]:
        out = F.Or(out, p)
    return out


def _exists_all(binders: list[tuple[str, Sort]], body: F.Formula) -> F.Formula:
    for var, sort in reversed(binders):
        body = F.Exists(var, sort, body)
    return body


class _Fresh:
    def __init__(self, avoid: set[str]):
        self.avoid = set(avoid)

    def __call__(self, base: str) -> str:
        n = 1
        while f"_{base}{n}" in self.avoid:
            n += 1
        name = f"_{base}{n}"
        self.avoid.add(name)
        return name


def _names_in(f: F.Formula) -> set[str]:
    return {n.ident for n in F.free_names_formula(f)} | F.bound_names_formula(f)


def _label_disjuncts(sender: str | None, receiver: str | None, body: F.Formula, fresh: _Fresh) -> F.Formula:
    """``exists l. <l> body`` over the three label shapes, optionally pinning the endpoints."""
    parts = []
    for shape in ("init", "com", "branch"):
        binders: list[tuple[str, Sort]] = []
        a, b = sender, receiver
        if a is None:
            a, b = fresh("A"), fresh("B")
            binders += [(a, Sort.PARTICIPANT), (b, Sort.PARTICIPANT)]
        k = fresh("k")
        if shape == "init":
            srv = fresh("a")
            binders += [(srv, Sort.SHARED), (k, Sort.SESSION)]
            label = InitL(a, b, srv, k)
        elif shape == "com":
            binders += [(k, Sort.SESSION)]
            label = ComL(a, b, k)
        else:
            lab = fresh("l")
            binders += [(k, Sort.SESSION), (lab, Sort.LABEL)]
            label = BranchL(a, b, k, lab)
        parts.append(_exists_all(binders, F.Action(label, body)))
    return _disjunction(parts)


def expand_derived(f: F.Formula) -> F.Formula:
    """Rewrite every sugar node into the eight core constructors."""
    if isinstance(f, F.TrueF):
        return F.Eq(At(Lit(0), "A"), At(Lit(0), "A"))
    if isinstance(f, F.FalseF):
        return F.Eq(At(Lit(0), "A"), At(Lit(1), "A"))
    if isinstance(f, (F.EndF, F.Eq)):
        return f
    if isinstance(f, F.Or):
        return F.Neg(F.And(F.Neg(expand_derived(f.left)), F.Neg(expand_derived(f.right))))
    if isinstance(f, F.Implies):
        return expand_derived(F.Or(F.Neg(f.left), f.right))
    if isinstance(f, F.Forall):
        return F.Neg(F.Exists(f.var, f.sort, F.Neg(expand_derived(f.body))))
    if isinstance(f, F.Box):
        return F.Neg(F.May(F.Neg(expand_derived(f.body))))
    if isinstance(f, F.BoxAction):
        return F.Neg(F.Action(f.label, F.Neg(expand_derived(f.body))))
    if isinstance(f, F.NextF):
        body = expand_derived(f.body)
        return expand_derived(_label_disjuncts(None, None, body, _Fresh(_names_in(body))))
    if isinstance(f, F.Interact):
        body = expand_derived(f.body)
        fresh = _Fresh(_names_in(body) | {f.sender, f.receiver})
        return expand_derived(_label_disjuncts(f.sender, f.receiver, body, fresh))
    if isinstance(f, F.Exists):
        return F.Exists(f.var, f.sort, expand_derived(f.body))
    if isinstance(f, (F.And, F.ParF)):
        return type(f)(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, F.Action):
        return F.Action(f.label, expand_derived(f.body))
    if isinstance(f, (F.Neg, F.May)):
        return type(f)(expand_derived(f.body))
    raise TypeError(f)


# ---------------------------------------------------------------------------
# Quantifier domains


def predicted_channels(c) -> set[str]:
    """Every name the fresh-channel scheme can hand out while ``c`` runs.

    The scheme picks the least ``base#n`` not currently free, and the number
    of names with a given base can only grow by one per init prefix, so the
    candidates for each base are bounded by the init count plus the names
    already present.
    """
    inits: dict[str, int] = {}
    for node in subterms(c):
        if isinstance(node, Init):
            b = base_ident(node.channel)
            inits[b] = inits.get(b, 0) + 1
    present: dict[str, int] = {}
    for name in all_session_names(c):
        b = base_ident(name)
        present[b] = present.get(b, 0) + 1
    out = set()
    for b, count in inits.items():
        for n in range(1, count + present.get(b, 0) + 1):
            out.add(f"{b}#{n}")
    return out


def quantifier_domain(cfg: Configuration, f: F.Formula, sort: Sort) -> list[Witness]:
    """Candidate witnesses for a quantifier of ``sort`` over ``cfg`` and ``f``.

    Names of that sort free in the choreography or in ``f``; for ``expr``,
    the values stored in the state and the literals of both sides; session
    channels additionally include the channels future inits may create.
    """
    if sort is Sort.VARIABLE:
        values = cfg.state.values() + chor_literals(cfg.chor) + F.formula_literals(f)
        unique = {value_key(v): v for v in values}
        return [unique[k] for k in sorted(unique)]
    names = {n.ident for n in free_names(cfg.chor) | F.free_names_formula(f) if n.sort is sort}
    if sort is Sort.SESSION:
        names |= predicted_channels(cfg.chor)
    return sorted(names)


# ---------------------------------------------------------------------------
# Proofs


@dataclass(frozen=True)
class Proof:
    rule: str
    detail: object = None
    premises: tuple["Proof", ...] = ()


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Proof | None = None


_PROVED = Proof("proved")


def require_recursion_free(c) -> None:
    for node in subterms(c):
        if isinstance(node, (Rec, RecVar)):
            from .syntax import print_choreography

            text = print_choreography(node)
            if len(text) > 60:
                text = text[:57] + "..."
            raise RecursionNotSupported(f"the checker needs a recursion-free choreography; found {text}")


class _Prover:
    def __init__(self, record: bool):
        self.record = record
        self.memo: dict = {}
        self._reach: dict = {}
        self._next: dict = {}

    def mark(self, rule: str, detail=None, premises: tuple[Proof, ...] = ()) -> Proof:
        return Proof(rule, detail, premises) if self.record else _PROVED

    def reachable(self, cfg: Configuration) -> list[Configuration]:
        if cfg not in self._reach:
            self._reach[cfg] = reachable(cfg)
        return self._reach[cfg]

    def next(self, cfg: Configuration, label):
        key = (cfg, label)
        if key not in self._next:
            self._next[key] = next_configs(cfg, label)
        return self._next[key]

    def prove(self, cfg: Configuration, f: F.Formula) -> Proof | None:
        key = (cfg, f)
        if key in self.memo:
            return self.memo[key]
        result = self._prove(cfg, f)
        self.memo[key] = result
        return result

    def _prove(self, cfg: Configuration, f: F.Formula) -> Proof | None:
        if isinstance(f, F.EndF):
            return self.mark("P_end") if not norm(cfg.chor) else None
        if isinstance(f, F.And):
            p1 = self.prove(cfg, f.left)
            if p1 is None:
                return None
            p2 = self.prove(cfg, f.right)
            return None if p2 is None else self.mark("P_and", None, (p1, p2))
        if isinstance(f, F.Neg):
            return self.mark("P_neg") if self.prove(cfg, f.body) is None else None
        if isinstance(f, F.ParF):
            parts = norm(cfg.chor)
            n = len(parts)
            for mask in range(1 << n):
                left = [parts[i] for i in range(n) if mask >> i & 1]
                right = [parts[i] for i in range(n) if not mask >> i & 1]
                p1 = self.prove(Configuration(cfg.state, product(left)), f.left)
                if p1 is None:
                    continue
                p2 = self.prove(Configuration(cfg.state, product(right)), f.right)
                if p2 is not None:
                    chosen = tuple(i for i in range(n) if mask >> i & 1)
                    return self.mark("P_par", chosen, (p1, p2))
            return None
        if isinstance(f, F.Action):
            for index, (target, binding) in enumerate(self.next(cfg, f.label)):
                body = f.body
                for k, h in binding.items():
                    body = F.substitute(body, k, Sort.SESSION, h)
                p = self.prove(target, body)
                if p is not None:
                    return self.mark("P_action", index, (p,))
            return None
        if isinstance(f, F.May):
            for target in self.reachable(cfg):
                p = self.prove(target, f.body)
                if p is not None:
                    return self.mark("P_may", target, (p,))
            return None
        if isinstance(f, F.Exists):
            for w in quantifier_domain(cfg, f.body, f.sort):
                p = self.prove(cfg, F.substitute(f.body, f.var, f.sort, w))
                if p is not None:
                    return self.mark("P_exists", w, (p,))
            return None
        if isinstance(f, F.Eq):
            try:
                a = eval_expr(cfg.state, f.left)
                b = eval_expr(cfg.state, f.right)
            except EvalError:
                return None
            return self.mark("P_exp", a) if values_equal(a, b) else None
        raise TypeError(f"not a core formula: {f!r}")


def entails(cfg: Configuration, f: F.Formula, witness: bool = False) -> Verdict:
    """Decide ``cfg.chor |-_{cfg.state} f``; sugar in ``f`` is expanded first."""
    require_recursion_free(cfg.chor)
    prover = _Prover(record=witness)
    proof = prover.prove(cfg, expand_derived(f))
    if proof is None:
        return Verdict(False)
    return Verdict(True, proof if witness else None)


def check_proof(cfg: Configuration, f: F.Formula, proof: Proof) -> bool:
    """Replay ``proof`` against ``f`` (core or sugared) and report whether it derives ``f``."""
    return _replay(cfg, expand_derived(f), proof)


def _replay(cfg: Configuration, f: F.Formula, proof: Proof) -> bool:
    rule, detail, prem = proof.rule, proof.detail, proof.premises
    if isinstance(f, F.EndF):
        return rule == "P_end" and not norm(cfg.chor)
    if isinstance(f, F.And):
        return rule == "P_and" and len(prem) == 2 and _replay(cfg, f.left, prem[0]) and _replay(cfg, f.right, prem[1])
    if isinstance(f, F.Neg):
        return rule == "P_neg" and not entails(cfg, f.body).holds
    if isinstance(f, F.ParF):
        if rule != "P_par" or len(prem) != 2:
            return False
        parts = norm(cfg.chor)
        chosen = set(detail)
        left = product([p for i, p in enumerate(parts) if i in chosen])
        right = product([p for i, p in enumerate(parts) if i not in chosen])
        return _replay(Configuration(cfg.state, left), f.left, prem[0]) and _replay(
            Configuration(cfg.state, right), f.right, prem[1]
        )
    if isinstance(f, F.Action):
        options = next_configs(cfg, f.label)
        if rule != "P_action" or not 0 <= detail < len(options):
            return False
        target, binding = options[detail]
        body = f.body
        for k, h in binding.items():
            body = F.substitute(body, k, Sort.SESSION, h)
        return _replay(target, body, prem[0])
    if isinstance(f, F.May):
        if rule != "P_may":
            return False
        keys = {c.key() for c in reachable(cfg)}
        return detail.key() in keys and _replay(detail, f.body, prem[0])
    if isinstance(f, F.Exists):
        if rule != "P_exists" or detail not in quantifier_domain(cfg, f.body, f.sort):
            return False
        return _replay(cfg, F.substitute(f.body, f.var, f.sort, detail), prem[0])
    if isinstance(f, F.Eq):
        try:
            return rule == "P_exp" and values_equal(eval_expr(cfg.state, f.left), eval_expr(cfg.state, f.right))
        except EvalError:
            return False
    return False


def format_proof(proof: Proof, indent: int = 0) -> list[str]:
    from .syntax import print_choreography, print_state, print_value

    detail = ""
    if proof.rule == "P_exists":
        d = proof.detail
        detail = f" with {print_value(d) if not isinstance(d, str) else d}"
    elif proof.rule == "P_par":
        detail = f" taking components {list(proof.detail)} on the left"
    elif proof.rule == "P_action":
        detail = f" via transition #{proof.detail}"
    elif proof.rule == "P_may":
        cfg = proof.detail
        detail = f" reaching ({print_state(cfg.state) or 'empty'}; {print_choreography(cfg.chor)})"
    elif proof.rule == "P_exp":
        detail = f" both sides = {print_value(proof.detail)}"
    lines = ["  " * indent + proof.rule + detail]
    for p in proof.premises:
        lines.extend(format_proof(p, indent + 1))
    return lines
