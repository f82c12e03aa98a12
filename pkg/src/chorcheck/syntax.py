"""Text syntax: tokenizer, recursive-descent parsers and printers.

One grammar covers choreographies, expressions, formulae, states, session
types and whole ``.gc``/``.gl`` documents; docs/syntax.md describes it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import formulas as F
from . import session_types as T
from .core import (
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
    Sort,
    State,
    Value,
    Var,
    free_procvars,
)
from .errors import ChorError, ParseError, SourceSpan

KEYWORDS = frozenset(
    """
    if then else rec true false eps not end may box next exists forall or
    interact init com branch chor formula state type mu
    """.split()
)

SORT_KEYWORDS = {s.value: s for s in F.QUANTIFIER_SORTS}
SORT_KEYWORDS["participant"] = Sort.PARTICIPANT

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:\#[0-9]+)?)
  | (?P<int>[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op>\[\+\]|->|=>|!=|[()\[\]{}<>,:;.|&~=+\-@!?])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | string | op | eof
    text: str
    line: int
    column: int


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(file, line, col))
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


def _unquote(s: str) -> str:
    body = s[1:-1]
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), body)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


# ---------------------------------------------------------------------------
# Parser


@dataclass
class Document:
    choreographies: dict[str, Chor] = field(default_factory=dict)
    formulas: dict[str, F.Formula] = field(default_factory=dict)
    state: State | None = None
    types: dict[str, T.SessionType] = field(default_factory=dict)


class _Backtrack(Exception):
    pass


class Parser:
    def __init__(self, text: str, file: str = "<input>", closed: bool = True):
        self.file = file
        self.closed = closed
        self.tokens = tokenize(text, file)
        self.pos = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def span(self, tok: Token | None = None) -> SourceSpan:
        tok = tok or self.tok
        return SourceSpan(self.file, tok.line, tok.column)

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        return ParseError(message, self.span(tok))

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("op", "ident")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self, what: str = "identifier") -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        self.pos += 1
        return t.text

    def finish(self) -> None:
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    # -- expressions

    def expr(self) -> Expr:
        left = self.additive()
        if self.tok.kind == "op" and self.tok.text in ("=", "!=", "<"):
            op = self.tok.text
            self.pos += 1
            left = BinOp(op, left, self.additive())
        return left

    def additive(self) -> Expr:
        left = self.unary_expr()
        while self.tok.kind == "op" and self.tok.text in ("+", "-", "."):
            op = self.tok.text
            self.pos += 1
            left = BinOp(op, left, self.unary_expr())
        return left

    def unary_expr(self) -> Expr:
        if self.accept("not"):
            return Not(self.unary_expr())
        return self.postfix_expr()

    def postfix_expr(self) -> Expr:
        e = self.primary_expr()
        if self.accept("@"):
            e = At(e, self.ident("participant"))
        return e

    def primary_expr(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.pos += 1
            return Lit(int(t.text))
        if t.kind == "op" and t.text == "-" and self.peek().kind == "int":
            self.pos += 2
            return Lit(-int(self.tokens[self.pos - 1].text))
        if t.kind == "string":
            self.pos += 1
            return Lit(_unquote(t.text))
        if t.kind == "ident":
            if t.text == "true":
                self.pos += 1
                return Lit(True)
            if t.text == "false":
                self.pos += 1
                return Lit(False)
            if t.text == "eps":
                self.pos += 1
                return Lit("")
            return Var(self.ident("variable"))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(f"expected expression, found {t.text or 'end of input'!r}")

    # -- choreographies

    def chor(self, bound: frozenset[str] = frozenset()) -> Chor:
        left = self.prefix_chor(bound)
        while self.accept("|"):
            left = Par(left, self.prefix_chor(bound))
        return left

    def prefix_chor(self, bound: frozenset[str]) -> Chor:
        t = self.tok
        if t.kind == "int" and t.text == "0":
            self.pos += 1
            return Inaction()
        if self.accept("("):
            c = self.chor(bound)
            self.expect(")")
            return c
        if self.accept("if"):
            guard = self.expr()
            self.expect("then")
            then = self.prefix_chor(bound)
            self.expect("else")
            return Cond(guard, then, self.prefix_chor(bound))
        if self.accept("rec"):
            var = self.ident("process variable")
            self.expect("{")
            body = self.chor(bound | {var})
            self.expect("}")
            return Rec(var, body)
        if t.kind == "ident" and self.peek().text == "->":
            return self.interaction(bound)
        if t.kind == "ident" and t.text not in KEYWORDS:
            name = self.ident()
            if self.closed and name not in bound:
                raise self.error(f"unbound process variable {name!r}", t)
            return RecVar(name)
        raise self.error(f"expected choreography, found {t.text or 'end of input'!r}")

    def interaction(self, bound: frozenset[str]) -> Chor:
        start = self.tok
        sender = self.ident("participant")
        self.expect("->")
        receiver = self.ident("participant")
        self.expect(":")
        name = self.ident("channel")
        if self.accept("("):
            k = self.ident("session channel")
            self.expect(")")
            self.expect(".")
            return Init(sender, receiver, name, k, self.prefix_chor(bound))
        if self.accept("<"):
            e = self.expr()
            self.expect(",")
            var = self.ident("variable")
            self.expect(">")
            self.expect(".")
            return Com(sender, receiver, name, e, var, self.prefix_chor(bound))
        if self.accept("[+]"):
            self.expect("{")
            branches = []
            while True:
                label = self.ident("label")
                self.expect(":")
                branches.append((label, self.chor(bound)))
                if not self.accept(","):
                    break
            self.expect("}")
            try:
                return Choice(sender, receiver, name, tuple(branches))
            except ChorError as exc:
                raise self.error(str(exc), start) from None
        raise self.error("expected '(', '<' or '[+]' after channel")

    # -- formulas

    def formula(self) -> F.Formula:
        left = self.or_formula()
        if self.accept("=>"):
            return F.Implies(left, self.formula())
        return left

    def or_formula(self) -> F.Formula:
        left = self.par_formula()
        while self.accept("or"):
            left = F.Or(left, self.par_formula())
        return left

    def par_formula(self) -> F.Formula:
        left = self.and_formula()
        while self.accept("|"):
            left = F.ParF(left, self.and_formula())
        return left

    def and_formula(self) -> F.Formula:
        left = self.unary_formula()
        while self.accept("&"):
            left = F.And(left, self.unary_formula())
        return left

    def unary_formula(self) -> F.Formula:
        if self.accept("~"):
            return F.Neg(self.unary_formula())
        if self.accept("may"):
            return F.May(self.unary_formula())
        if self.accept("box"):
            return F.Box(self.unary_formula())
        if self.accept("next"):
            return F.NextF(self.unary_formula())
        if self.at("exists") or self.at("forall"):
            ctor = F.Exists if self.tok.text == "exists" else F.Forall
            self.pos += 1
            binders = [self.binder()]
            while self.accept(","):
                binders.append(self.binder())
            self.expect(".")
            body = self.formula()
            for var, sort in reversed(binders):
                body = ctor(var, sort, body)
            return body
        if self.accept("<"):
            label = self.label()
            self.expect(">")
            return F.Action(label, self.unary_formula())
        if self.tok.kind == "op" and self.tok.text == "[":
            self.pos += 1
            label = self.label()
            self.expect("]")
            return F.BoxAction(label, self.unary_formula())
        if self.accept("interact"):
            self.expect("(")
            a = self.ident("participant")
            self.expect(",")
            b = self.ident("participant")
            self.expect(")")
            return F.Interact(a, b, self.unary_formula())
        return self.atom_formula()

    def binder(self) -> tuple[str, Sort]:
        var = self.ident("quantified name")
        self.expect(":")
        t = self.tok
        if t.kind != "ident" or t.text not in SORT_KEYWORDS:
            raise self.error(f"unknown sort {t.text!r} (expected one of participant, schan, kchan, label, expr)")
        self.pos += 1
        return var, SORT_KEYWORDS[t.text]

    def label(self):
        t = self.tok
        if not (t.kind == "ident" and t.text in ("init", "com", "branch")):
            raise self.error("expected 'init', 'com' or 'branch'")
        self.pos += 1
        a = self.ident("participant")
        self.expect("->")
        b = self.ident("participant")
        if t.text == "init":
            service = self.ident("shared channel")
            self.expect("(")
            k = self.ident("session channel")
            self.expect(")")
            return InitL(a, b, service, k)
        k = self.ident("session channel")
        if t.text == "com":
            return ComL(a, b, k)
        self.expect("[")
        label = self.ident("label")
        self.expect("]")
        return BranchL(a, b, k, label)

    def atom_formula(self) -> F.Formula:
        if self.accept("end"):
            return F.EndF()
        if self.at("true") and not self._continues_expr(1):
            self.pos += 1
            return F.TrueF()
        if self.at("false") and not self._continues_expr(1):
            self.pos += 1
            return F.FalseF()
        if self.at("("):
            saved = self.pos
            try:
                self.pos += 1
                inner = self.formula()
                self.expect(")")
                if self._continues_expr(0):
                    raise _Backtrack
                return inner
            except (ParseError, _Backtrack):
                self.pos = saved
        return self.equality()

    def _continues_expr(self, offset: int) -> bool:
        t = self.peek(offset)
        return t.kind == "op" and t.text in ("=", "!=", "<", "+", "-", ".", "@")

    def equality(self) -> F.Formula:
        left = self.additive()
        if self.accept("="):
            return F.Eq(left, self.additive())
        if self.accept("!="):
            return F.Neg(F.Eq(left, self.additive()))
        raise self.error(f"expected '=' or '!=' in equality, found {self.tok.text or 'end of input'!r}")

    # -- states

    def state(self) -> State:
        entries: dict[tuple[str, str], Value] = {}
        if self.tok.kind == "eof" or self.at(";"):
            return State()
        while True:
            start = self.tok
            var = self.ident("variable")
            self.expect("@")
            at = self.ident("participant")
            self.expect("=")
            value = self.value()
            if (var, at) in entries:
                raise self.error(f"duplicate binding for {var}@{at}", start)
            entries[(var, at)] = value
            if not self.accept(","):
                break
        return State.of(entries)

    def value(self) -> Value:
        e = self.primary_expr()
        if not isinstance(e, Lit):
            raise self.error("expected a literal value")
        return e.value

    # -- session types

    def stype(self) -> T.SessionType:
        start = self.tok
        if start.kind == "op" and start.text in ("!", "?"):
            self.pos += 1
            ctor = T.Send if start.text == "!" else T.Recv
            self.expect("(")
            t = self.tok
            if t.text not in T.VALUE_TYPES:
                raise self.error(f"unknown value type {t.text!r}")
            self.pos += 1
            self.expect(")")
            self.expect(".")
            return ctor(t.text, self.stype())
        if self.at("&") or self.at("+"):
            ctor = T.BranchT if self.tok.text == "&" else T.SelectT
            self.pos += 1
            self.expect("{")
            branches = []
            while True:
                label = self.ident("label")
                self.expect(":")
                branches.append((label, self.stype()))
                if not self.accept(","):
                    break
            self.expect("}")
            return ctor(tuple(branches))
        if self.accept("end"):
            return T.EndT()
        if self.accept("mu"):
            var = self.ident("type variable")
            self.expect(".")
            return T.RecT(var, self.stype())
        if self.accept("("):
            t = self.stype()
            self.expect(")")
            return t
        return T.TypeVar(self.ident("session type"))

    # -- documents

    def document(self) -> Document:
        doc = Document()
        seen: set[tuple[str, str]] = set()
        while self.tok.kind != "eof":
            start = self.tok
            if self.accept("state"):
                self.expect("=")
                if doc.state is not None:
                    raise self.error("duplicate state block", start)
                doc.state = self.state()
                self.expect(";")
                continue
            kind = self.tok.text
            if kind not in ("chor", "formula", "type"):
                raise self.error("expected 'chor', 'formula', 'state' or 'type' declaration")
            self.pos += 1
            name_tok = self.tok
            name = self.ident("declaration name")
            if (kind, name) in seen:
                raise self.error(f"duplicate {kind} declaration {name!r}", name_tok)
            seen.add((kind, name))
            self.expect("=")
            if kind == "chor":
                doc.choreographies[name] = self.chor()
            elif kind == "formula":
                doc.formulas[name] = self.formula()
            else:
                doc.types[name] = self.stype()
            self.expect(";")
        return doc


def _run(text: str, file: str, rule: Callable[[Parser], object], closed: bool = True):
    try:
        p = Parser(text, file, closed)
        out = rule(p)
        p.finish()
        return out
    except RecursionError:
        raise ParseError("input nested too deeply", SourceSpan(file, 1, 1)) from None


def parse_choreography(text: str, file: str = "<input>", closed: bool = True) -> Chor:
    return _run(text, file, lambda p: p.chor(), closed)


def parse_expression(text: str, file: str = "<input>") -> Expr:
    return _run(text, file, lambda p: p.expr())


def parse_formula(text: str, file: str = "<input>") -> F.Formula:
    return _run(text, file, lambda p: p.formula())


def parse_state(text: str, file: str = "<input>") -> State:
    return _run(text, file, lambda p: p.state())


def parse_session_type(text: str, file: str = "<input>") -> T.SessionType:
    t = _run(text, file, lambda p: p.stype())
    if not T.is_closed(t):
        free = ", ".join(sorted(T.free_type_vars(t)))
        raise ParseError(f"unbound type variable(s) {free}", SourceSpan(file, 1, 1))
    return t


def parse_document(text: str, file: str = "<input>") -> Document:
    return _run(text, file, lambda p: p.document())


# ---------------------------------------------------------------------------
# Printers

_EXPR_PREC = {"=": 1, "!=": 1, "<": 1, "+": 2, "-": 2, ".": 2}


def _expr_prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _EXPR_PREC[e.op]
    if isinstance(e, Not):
        return 3
    if isinstance(e, At):
        return 4
    return 5


def print_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return "eps" if v == "" else _quote(v)


def print_expr(e: Expr, min_prec: int = 0) -> str:
    if isinstance(e, Lit):
        out = print_value(e.value)
    elif isinstance(e, Var):
        out = e.name
    elif isinstance(e, At):
        out = f"{print_expr(e.expr, 5)}@{e.participant}"
    elif isinstance(e, Not):
        out = f"not {print_expr(e.operand, 3)}"
    elif isinstance(e, BinOp):
        p = _EXPR_PREC[e.op]
        if p == 1:
            out = f"{print_expr(e.left, 2)} {e.op} {print_expr(e.right, 2)}"
        else:
            out = f"{print_expr(e.left, 2)} {e.op} {print_expr(e.right, 3)}"
    else:
        raise TypeError(e)
    return f"({out})" if _expr_prec(e) < min_prec else out


def print_choreography(c: Chor) -> str:
    if isinstance(c, Par):
        right = print_choreography(c.right)
        if isinstance(c.right, Par):
            right = f"({right})"
        return f"{print_choreography(c.left)} | {right}"
    return _print_prefix(c)


def _print_prefix(c: Chor) -> str:
    if isinstance(c, Par):
        return f"({print_choreography(c)})"
    if isinstance(c, Inaction):
        return "0"
    if isinstance(c, Init):
        return f"{c.sender} -> {c.receiver} : {c.service}({c.channel}). {_print_prefix(c.cont)}"
    if isinstance(c, Com):
        return f"{c.sender} -> {c.receiver} : {c.channel}<{print_expr(c.expr)}, {c.var}>. {_print_prefix(c.cont)}"
    if isinstance(c, Choice):
        branches = ", ".join(f"{label}: {print_choreography(cont)}" for label, cont in c.branches)
        return f"{c.sender} -> {c.receiver} : {c.channel}[+]{{{branches}}}"
    if isinstance(c, Cond):
        return f"if {print_expr(c.guard)} then {_print_prefix(c.then)} else {_print_prefix(c.orelse)}"
    if isinstance(c, RecVar):
        return c.name
    if isinstance(c, Rec):
        return f"rec {c.var} {{ {print_choreography(c.body)} }}"
    raise TypeError(c)


def print_label(label) -> str:
    if isinstance(label, InitL):
        return f"init {label.sender}->{label.receiver} {label.service}({label.channel})"
    if isinstance(label, ComL):
        return f"com {label.sender}->{label.receiver} {label.channel}"
    return f"branch {label.sender}->{label.receiver} {label.channel} [{label.label}]"


_FORMULA_PREC = {F.Implies: 1, F.Or: 2, F.ParF: 3, F.And: 4}
_FORMULA_OP = {F.Implies: "=>", F.Or: "or", F.ParF: "|", F.And: "&"}


def print_formula(f: F.Formula, min_prec: int = 0) -> str:
    if isinstance(f, (F.Exists, F.Forall)):
        kw = "exists" if isinstance(f, F.Exists) else "forall"
        out = f"{kw} {f.var}:{f.sort.value} . {print_formula(f.body)}"
        return f"({out})" if min_prec > 0 else out
    ctor = type(f)
    if ctor in _FORMULA_PREC:
        p = _FORMULA_PREC[ctor]
        if ctor is F.Implies:
            out = f"{print_formula(f.left, p + 1)} => {print_formula(f.right, p)}"
        else:
            out = f"{print_formula(f.left, p)} {_FORMULA_OP[ctor]} {print_formula(f.right, p + 1)}"
        return f"({out})" if p < min_prec else out
    if isinstance(f, F.Neg):
        return f"~{print_formula(f.body, 5)}"
    if isinstance(f, F.May):
        return f"may {print_formula(f.body, 5)}"
    if isinstance(f, F.Box):
        return f"box {print_formula(f.body, 5)}"
    if isinstance(f, F.NextF):  # also ExistsLabel
        return f"next {print_formula(f.body, 5)}"
    if isinstance(f, F.Action):
        return f"<{print_label(f.label)}> {print_formula(f.body, 5)}"
    if isinstance(f, F.BoxAction):
        return f"[{print_label(f.label)}] {print_formula(f.body, 5)}"
    if isinstance(f, F.Interact):
        return f"interact({f.sender}, {f.receiver}) {print_formula(f.body, 5)}"
    if isinstance(f, F.EndF):
        return "end"
    if isinstance(f, F.TrueF):
        return "true"
    if isinstance(f, F.FalseF):
        return "false"
    if isinstance(f, F.Eq):
        out = f"{print_expr(f.left, 2)} = {print_expr(f.right, 2)}"
        return f"({out})" if min_prec > 0 else out
    raise TypeError(f)


def print_state(s: State) -> str:
    return ", ".join(f"{var}@{at} = {print_value(v)}" for (var, at), v in s.items())


def print_session_type(t: T.SessionType) -> str:
    if isinstance(t, T.Send):
        return f"!({t.value_type}). {print_session_type(t.cont)}"
    if isinstance(t, T.Recv):
        return f"?({t.value_type}). {print_session_type(t.cont)}"
    if isinstance(t, (T.BranchT, T.SelectT)):
        sym = "&" if isinstance(t, T.BranchT) else "+"
        inner = ", ".join(f"{label}: {print_session_type(sub)}" for label, sub in t.branches)
        return f"{sym}{{{inner}}}"
    if isinstance(t, T.EndT):
        return "end"
    if isinstance(t, T.RecT):
        return f"mu {t.var}. {print_session_type(t.body)}"
    return t.name


def print_document(doc: Document) -> str:
    lines = []
    if doc.state is not None:
        lines.append(f"state = {print_state(doc.state)};")
    for name, t in doc.types.items():
        lines.append(f"type {name} = {print_session_type(t)};")
    for name, c in doc.choreographies.items():
        lines.append(f"chor {name} = {print_choreography(c)};")
    for name, f in doc.formulas.items():
        lines.append(f"formula {name} = {print_formula(f)};")
    return "\n".join(lines) + "\n"


def unbound_procvars(c: Chor) -> Iterable[str]:
    return sorted(free_procvars(c))
