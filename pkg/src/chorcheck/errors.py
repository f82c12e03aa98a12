"""Exception hierarchy shared by every chorcheck module."""

from __future__ import annotations

from dataclasses import dataclass


class ChorError(Exception):
    pass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class ParseError(ChorError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


class DuplicateLabel(ChorError):
    pass


class EvalError(ChorError):
    pass


class UnboundVariable(EvalError):
    def __init__(self, var: str, participant: str | None):
        where = participant if participant is not None else "<unlocated>"
        super().__init__(f"unbound variable {var}@{where}")
        self.var = var
        self.participant = participant


class TypeMismatch(EvalError):
    pass


class RecursionNotSupported(ChorError):
    """Raised when a decision procedure meets a recursive choreography."""


class RecursionWithoutBudget(ChorError):
    """Raised when unbounded exploration is requested on a recursive term."""
