"""Post Correspondence Problem instances as choreographies, with bounded search.

The encoding runs one recursive initiator per pair, each repeatedly writing
its index into ``r@B``, next to an appender that keeps extending
``str1@A``/``str2@A`` with the pair selected by ``r@B``.  A reachable state
with equal nonempty strings is a solution of the instance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import formulas as F
from .checker import entails
from .core import (
    INACTION,
    BinOp,
    Com,
    Cond,
    Init,
    Lit,
    Rec,
    RecVar,
    State,
    Var,
    located,
    par_all,
)
from .semantics import Configuration, Transition, state_delta, step


# instances behind the golden encodings in corpus/pcp, keyed by number of pairs
DEMO_INSTANCES = {
    1: "0:0",
    2: "01:0,1:101",
    3: "1:101,10:00,011:11",
    4: "0:01,1:10,01:0,10:1",
    5: "00:0,1:11,0:00,11:1,01:10",
}


@dataclass(frozen=True)
class PcpInstance:
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("a PCP instance needs at least one pair")
        for s, t in self.pairs:
            for word in (s, t):
                if set(word) - {"0", "1"}:
                    raise ValueError(f"word {word!r} is not over the alphabet {{0, 1}}")

    @classmethod
    def parse(cls, text: str) -> "PcpInstance":
        """Read ``s1:t1,s2:t2,...``."""
        pairs = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if chunk.count(":") != 1:
                raise ValueError(f"malformed pair {chunk!r}; expected s:t")
            s, t = chunk.split(":")
            pairs.append((s.strip(), t.strip()))
        return cls(tuple(pairs))

    def __str__(self) -> str:
        return ",".join(f"{s}:{t}" for s, t in self.pairs)

    @property
    def n(self) -> int:
        return len(self.pairs)


def random_initiators(n: int, receiver: str = "B", service: str = "a") -> list:
    return [
        Rec("X", Init(f"A{i}", receiver, service, "k", Com(f"A{i}", receiver, "k", Lit(i), "r", RecVar("X"))))
        for i in range(1, n + 1)
    ]


def appender(inst: PcpInstance, reader: str = "A", writer: str = "B", service: str = "b"):
    cascade = RecVar("X")
    for i in range(inst.n, 0, -1):
        s, t = inst.pairs[i - 1]
        append = Com(
            writer, reader, "k", BinOp(".", Var("tmp1"), Lit(s)), "str1",
            Com(writer, reader, "k", BinOp(".", Var("tmp2"), Lit(t)), "str2", RecVar("X")),
        )
        cascade = Cond(BinOp("=", located("r", writer), Lit(i)), append, cascade)
    body = Init(
        reader, writer, service, "k",
        Com(reader, writer, "k", Var("str1"), "tmp1", Com(reader, writer, "k", Var("str2"), "tmp2", cascade)),
    )
    return Rec("X", body)


def initial_state() -> State:
    return State.of({("str1", "A"): "", ("str2", "A"): "", ("tmp1", "B"): "", ("tmp2", "B"): "", ("r", "B"): 1})


def encode_pcp(inst: PcpInstance) -> Configuration:
    return Configuration(initial_state(), par_all(random_initiators(inst.n) + [appender(inst)]))


def solution_condition() -> F.Formula:
    s1, s2, eps = located("str1", "A"), located("str2", "A"), Lit("")
    return F.And(F.And(F.Eq(s1, s2), F.Neg(F.Eq(s1, eps))), F.Neg(F.Eq(s2, eps)))


def pcp_formula() -> F.Formula:
    return F.May(solution_condition())


def is_solution_state(state: State) -> bool:
    # the condition only reads the store, so any recursion-free term will do
    return entails(Configuration(state, INACTION), solution_condition()).holds


@dataclass
class SearchResult:
    instance: PcpInstance
    depth_bound: int
    solved: bool
    trace: list[Transition] = field(default_factory=list)
    start: Configuration | None = None
    explored: int = 0
    elapsed: float = 0.0

    @property
    def final(self) -> Configuration | None:
        if not self.solved:
            return None
        return self.trace[-1].target if self.trace else self.start

    def indices(self) -> list[int]:
        """Pair indices in the order they were appended."""
        return index_sequence(self.start, self.trace) if self.solved else []


def index_sequence(start: Configuration, trace: list[Transition]) -> list[int]:
    """Read ``r@B`` at the source of every transition that writes ``str1@A``."""
    out = []
    current = start
    for t in trace:
        if "str1@A" in state_delta(current.state, t.target.state):
            out.append(current.state.lookup("r", "B"))
        current = t.target
    return out


def is_genuine(inst: PcpInstance, indices: list[int]) -> bool:
    if not indices:
        return False
    top = "".join(inst.pairs[i - 1][0] for i in indices)
    bottom = "".join(inst.pairs[i - 1][1] for i in indices)
    return top == bottom


def bounded_search(inst: PcpInstance, depth: int) -> SearchResult:
    """Breadth-first search for a solution state within ``depth`` LTS steps.

    Configurations are identified up to structural congruence.  Levels are
    expanded in lexicographic order of their label traces, so the trace
    returned is the least one among those of minimal length.
    """
    t0 = time.perf_counter()
    start = encode_pcp(inst)
    seen = {start.key()}
    level: list[tuple[tuple[str, ...], Configuration, list[Transition]]] = [((), start, [])]
    explored = 1
    d = 0
    while True:
        for _, cfg, trace in level:
            if is_solution_state(cfg.state):
                return SearchResult(inst, depth, True, trace, start, explored, time.perf_counter() - t0)
        if d >= depth or not level:
            return SearchResult(inst, depth, False, [], start, explored, time.perf_counter() - t0)
        nxt = []
        for names, cfg, trace in level:
            for t in sorted(step(cfg), key=lambda t: str(t.label)):
                k = t.target.key()
                if k in seen:
                    continue
                seen.add(k)
                explored += 1
                nxt.append((names + (str(t.label),), t.target, trace + [t]))
        nxt.sort(key=lambda item: item[0])
        level = nxt
        d += 1


def replay(inst: PcpInstance, trace: list[Transition]) -> Configuration | None:
    """Re-run ``trace`` from the encoding; None if some step is not enabled."""
    current = encode_pcp(inst)
    for t in trace:
        if t not in step(current):
            return None
        current = t.target
    return current
