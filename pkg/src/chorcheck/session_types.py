"""Session types (syntax only; there is no typing judgment here)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

VALUE_TYPES = ("bool", "string", "int")


@dataclass(frozen=True)
class Send:
    value_type: str
    cont: "SessionType"


@dataclass(frozen=True)
class Recv:
    value_type: str
    cont: "SessionType"


@dataclass(frozen=True)
class BranchT:
    branches: tuple[tuple[str, "SessionType"], ...]


@dataclass(frozen=True)
class SelectT:
    branches: tuple[tuple[str, "SessionType"], ...]


@dataclass(frozen=True)
class EndT:
    pass


@dataclass(frozen=True)
class RecT:
    var: str
    body: "SessionType"


@dataclass(frozen=True)
class TypeVar:
    name: str


SessionType = Union[Send, Recv, BranchT, SelectT, EndT, RecT, TypeVar]


def free_type_vars(t: SessionType) -> set[str]:
    if isinstance(t, TypeVar):
        return {t.name}
    if isinstance(t, RecT):
        return free_type_vars(t.body) - {t.var}
    if isinstance(t, (Send, Recv)):
        return free_type_vars(t.cont)
    if isinstance(t, (BranchT, SelectT)):
        out: set[str] = set()
        for _, sub in t.branches:
            out |= free_type_vars(sub)
        return out
    return set()


def is_closed(t: SessionType) -> bool:
    return not free_type_vars(t)
