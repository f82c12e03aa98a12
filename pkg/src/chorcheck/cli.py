"""``chorcheck`` command line: check formulae, simulate choreographies, run the PCP demo."""

from __future__ import annotations

import argparse
import json
import os
import random
import signal
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import formulas as F
from .checker import Proof, entails, format_proof, require_recursion_free
from .core import INACTION, State, is_recursion_free, label_to_json, normal_form
from .errors import ChorError
from .pcp import PcpInstance, bounded_search, encode_pcp, is_genuine
from .semantics import Configuration, explore, guard_diagnostics, state_delta, step
from .syntax import (
    Document,
    parse_choreography,
    parse_document,
    parse_formula,
    parse_state,
    print_choreography,
    print_formula,
    print_state,
    print_value,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TIMEOUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Timeout(Exception):
    pass


@dataclass
class RunConfig:
    source: str | None = None
    chor: str | None = None
    formula: str | None = None
    name: str | None = None
    state: str | None = None
    format: str = "text"
    budget: int | None = None
    timeout: float | None = None
    witness: bool = False
    all: bool = False
    seed: int | None = None
    pairs: str | None = None
    depth: int = 30
    show_encoding: bool = False
    progress: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# input resolution


def _read_or_inline(text: str) -> tuple[str, str]:
    """Contents and display name: a path if the file exists, otherwise the text itself."""
    path = Path(text)
    try:
        if path.is_file():
            return path.read_text(encoding="utf-8"), str(path)
    except OSError as exc:
        raise UsageError(f"cannot read {text}: {exc}") from None
    return text, "<inline>"


def _load_document(text: str, file: str, as_formula: bool = False) -> Document:
    """A document, or a bare choreography/formula wrapped into one."""
    stripped = text.lstrip()
    if stripped.startswith(("chor ", "formula ", "state ", "type ", "//")) or not stripped:
        return parse_document(text, file)
    doc = Document()
    if as_formula:
        doc.formulas["formula"] = parse_formula(text, file)
    else:
        doc.choreographies["main"] = parse_choreography(text, file)
    return doc


def _select(named: dict, wanted: str | None, what: str):
    if wanted is not None:
        if wanted not in named:
            raise UsageError(f"no {what} named {wanted!r}; available: {', '.join(named) or 'none'}")
        return wanted, named[wanted]
    if len(named) == 1:
        return next(iter(named.items()))
    if not named:
        raise UsageError(f"no {what} found in input")
    raise UsageError(f"several {what}s defined ({', '.join(named)}); pick one by name")


def resolve_configuration(rc: RunConfig) -> tuple[str, Configuration, Document]:
    text, file = _read_or_inline(rc.source)
    doc = _load_document(text, file)
    name, chor = _select(doc.choreographies, rc.chor, "choreography")
    state = doc.state or State()
    if rc.state is not None:
        stext, sfile = _read_or_inline(rc.state)
        sdoc_text = stext.strip()
        if sdoc_text.startswith("state"):
            sdoc = parse_document(stext, sfile)
            state = sdoc.state or State()
        else:
            state = parse_state(stext, sfile)
    return name, Configuration(state, chor), doc


def resolve_formulas(rc: RunConfig, doc: Document) -> dict[str, F.Formula]:
    if rc.formula is None:
        named = dict(doc.formulas)
    else:
        text, file = _read_or_inline(rc.formula)
        named = _load_document(text, file, as_formula=True).formulas
    if rc.name is not None:
        key, f = _select(named, rc.name, "formula")
        return {key: f}
    if not named:
        raise UsageError("no formula given; use --formula or declare one in the source")
    return named


# ---------------------------------------------------------------------------
# rendering


def _color_enabled(stream) -> bool:
    mode = os.environ.get("CHORCHECK_COLOR", "auto").lower()
    if mode == "always":
        return True
    if mode == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, code: str, on: bool) -> str:
    return f"\033[{code}m{text}\033[0m" if on else text


def proof_to_json(p: Proof) -> dict:
    detail = p.detail
    if isinstance(detail, Configuration):
        detail = {"state": detail.state.to_dict(), "chor": print_choreography(detail.chor)}
    elif isinstance(detail, tuple):
        detail = list(detail)
    return {"rule": p.rule, "detail": detail, "premises": [proof_to_json(q) for q in p.premises]}


def _config_json(cfg: Configuration) -> dict:
    return {"state": cfg.state.to_dict(), "chor": print_choreography(cfg.chor)}


def _steps_json(steps) -> list[dict]:
    return [
        {"index": i, "label": label_to_json(label), "delta": delta}
        for i, (label, delta) in enumerate(steps, 1)
    ]


def _delta_text(delta: dict) -> str:
    return ", ".join(f"{k} = {print_value(v)}" for k, v in delta.items())


# ---------------------------------------------------------------------------
# commands


def cmd_check(rc: RunConfig, out) -> int:
    name, cfg, doc = resolve_configuration(rc)
    require_recursion_free(cfg.chor)
    formulas = resolve_formulas(rc, doc)
    color = rc.format == "text" and _color_enabled(out)
    results = []
    for fname, f in formulas.items():
        verdict = entails(cfg, f, witness=rc.witness)
        results.append((fname, f, verdict))
        rc.progress.append(f"{fname}: {'holds' if verdict.holds else 'fails'}")
    all_hold = all(v.holds for _, _, v in results)
    if rc.format == "json":
        payload = {
            "choreography": name,
            "state": cfg.state.to_dict(),
            "results": [
                {
                    "formula": fname,
                    "text": print_formula(f),
                    "holds": v.holds,
                    "witness": proof_to_json(v.witness) if v.witness is not None else None,
                }
                for fname, f, v in results
            ],
        }
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        for fname, f, v in results:
            word = _paint("holds", "32", color) if v.holds else _paint("fails", "31", color)
            out.write(f"{fname}: {word}\n")
            if v.witness is not None:
                for line in format_proof(v.witness, 1):
                    out.write(line + "\n")
    return EXIT_OK if all_hold else EXIT_FAIL


def _status(cfg: Configuration, enabled: bool, exhausted: bool) -> str:
    if exhausted and enabled:
        return "budget exhausted"
    if normal_form(cfg.chor) == INACTION:
        return "terminated"
    return "stuck"


def cmd_simulate(rc: RunConfig, out) -> int:
    name, cfg, _ = resolve_configuration(rc)
    if rc.budget is None and not is_recursion_free(cfg.chor):
        raise UsageError("the choreography is recursive; pass --budget")
    if rc.all:
        return _simulate_all(rc, name, cfg, out)
    rng = random.Random(rc.seed) if rc.seed is not None else None
    start = cfg
    steps = []
    while True:
        options = step(cfg)
        if not options or (rc.budget is not None and len(steps) >= rc.budget):
            break
        t = rng.choice(options) if rng is not None else options[0]
        steps.append((t.label, state_delta(cfg.state, t.target.state)))
        rc.progress.append(str(t.label))
        cfg = t.target
    status = _status(cfg, bool(step(cfg)), rc.budget is not None and len(steps) >= rc.budget)
    if rc.format == "json":
        payload = {
            "choreography": name,
            "initial": _config_json(start),
            "steps": _steps_json(steps),
            "status": status,
            "final": _config_json(cfg),
        }
        if status == "stuck":
            payload["diagnostics"] = guard_diagnostics(cfg)
        out.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_OK
    out.write(f"simulating {name}\n")
    for i, (label, delta) in enumerate(steps, 1):
        line = f"{i:4d}. {label}"
        if delta:
            line += f"    {_delta_text(delta)}"
        out.write(line + "\n")
    out.write(f"status: {status} after {len(steps)} step{'s' if len(steps) != 1 else ''}\n")
    if status == "stuck":
        out.write(f"remaining: {print_choreography(cfg.chor)}\n")
        for msg in guard_diagnostics(cfg):
            out.write(f"note: {msg}\n")
    return EXIT_OK


def _simulate_all(rc: RunConfig, name: str, cfg: Configuration, out) -> int:
    g = explore(cfg, rc.budget)
    if rc.format == "json":
        payload = {
            "choreography": name,
            "nodes": [{"id": i, **_config_json(c)} for i, c in enumerate(g.nodes)],
            "edges": [{"from": a, "label": label_to_json(label), "to": b} for a, label, b in g.edges],
            "complete": g.complete,
        }
        out.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_OK
    out.write(f"reachable configurations of {name}: {len(g.nodes)}{'' if g.complete else ' (budget exhausted)'}\n")
    for i, c in enumerate(g.nodes):
        out.write(f"  [{i}] {print_state(c.state) or '-'} ; {print_choreography(c.chor)}\n")
    out.write(f"transitions: {len(g.edges)}\n")
    for a, label, b in g.edges:
        out.write(f"  [{a}] --{label}--> [{b}]\n")
    return EXIT_OK


def _trace_steps(start: Configuration, trace) -> list:
    steps, current = [], start
    for t in trace:
        steps.append((t.label, state_delta(current.state, t.target.state)))
        current = t.target
    return steps


def cmd_pcp(rc: RunConfig, out) -> int:
    if rc.pairs is None:
        raise UsageError("--pairs is required, e.g. --pairs 0:0,1:101")
    try:
        inst = PcpInstance.parse(rc.pairs)
    except ValueError as exc:
        raise UsageError(f"malformed instance: {exc}") from None
    if rc.depth < 0:
        raise UsageError("--depth must be non-negative")
    rc.progress.append(f"searching {inst} up to depth {rc.depth}")
    result = bounded_search(inst, rc.depth)
    indices = result.indices()
    final = result.final
    if rc.format == "json":
        payload = {
            "instance": [list(p) for p in inst.pairs],
            "depth_bound": rc.depth,
            "solved": result.solved,
            "explored": result.explored,
        }
        if result.solved:
            payload.update(
                depth=len(result.trace),
                sequence=indices,
                genuine=is_genuine(inst, indices),
                state=final.state.to_dict(),
                trace=_steps_json(_trace_steps(result.start, result.trace)),
            )
        if rc.show_encoding:
            payload["encoding"] = _config_json(encode_pcp(inst))
        out.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_OK if result.solved else EXIT_FAIL
    plural = "pair" if inst.n == 1 else "pairs"
    out.write(f"instance: {inst} ({inst.n} {plural})\n")
    if rc.show_encoding:
        enc = encode_pcp(inst)
        out.write(f"state: {print_state(enc.state)}\n")
        out.write(f"choreography: {print_choreography(enc.chor)}\n")
    if result.solved:
        out.write(f"SOLUTION with sequence {indices} at depth {len(result.trace)}\n")
        out.write(f"str1@A = {print_value(final.state.lookup('str1', 'A'))}\n")
        out.write(f"str2@A = {print_value(final.state.lookup('str2', 'A'))}\n")
        out.write(f"genuine: {'yes' if is_genuine(inst, indices) else 'no'}\n")
        out.write("trace:\n")
        for i, t in enumerate(result.trace, 1):
            out.write(f"{i:4d}. {t.label}\n")
    else:
        out.write(f"NO SOLUTION FOUND (bound {rc.depth})\n")
    out.write(f"explored: {result.explored} configurations\n")
    return EXIT_OK if result.solved else EXIT_FAIL


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chorcheck", description="Global Calculus choreographies and their logic.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_source=True):
        if with_source:
            sp.add_argument("source", help=".gc file, or choreography text")
            sp.add_argument("--chor", help="choreography to use when the file defines several")
            sp.add_argument("--state", help="initial state: file or inline 'x@A = 1, ...'")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--timeout", type=float, help="give up after this many seconds (exit 3)")

    c = sub.add_parser("check", help="decide whether formulae hold")
    common(c)
    c.add_argument("--formula", help=".gl file, or formula text")
    c.add_argument("--name", help="formula to check when several are declared")
    c.add_argument("--witness", action="store_true", help="print the derivation")

    s = sub.add_parser("simulate", help="run the transition system")
    common(s)
    s.add_argument("--budget", type=int, help="maximum number of steps")
    s.add_argument("--all", action="store_true", help="print the whole reachable graph")
    s.add_argument("--seed", type=int, help="pick transitions at random with this seed")

    q = sub.add_parser("pcp", help="bounded search on the PCP encoding")
    common(q, with_source=False)
    q.add_argument("--pairs", help="instance as s1:t1,s2:t2,...")
    q.add_argument("--depth", type=int, default=30, help="step bound (default 30)")
    q.add_argument("--show-encoding", action="store_true")
    return p


COMMANDS = {"check": cmd_check, "simulate": cmd_simulate, "pcp": cmd_pcp}


def _on_alarm(signum, frame):
    raise Timeout()


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    rc = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    use_alarm = rc.timeout is not None and hasattr(signal, "SIGALRM")
    if use_alarm:
        previous = signal.signal(signal.SIGALRM, _on_alarm)
        # keep firing after expiry: a raise inside a gc callback is swallowed
        signal.setitimer(signal.ITIMER_REAL, rc.timeout, 0.05)
    try:
        return COMMANDS[args.command](rc, out)
    except Timeout:
        err.write(f"chorcheck: timed out after {rc.timeout:g}s\n")
        if rc.progress:
            err.write(f"progress: {len(rc.progress)} item(s) completed; last: {rc.progress[-1]}\n")
        return EXIT_TIMEOUT
    except (UsageError, ChorError) as exc:
        err.write(f"chorcheck: {exc}\n")
        return EXIT_USAGE
    finally:
        if use_alarm:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, previous)


if __name__ == "__main__":
    sys.exit(main())
