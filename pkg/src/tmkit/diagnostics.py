"""Diagnostics shared by every stage: severity, source spans, and the error
type raised when a stage cannot produce a result."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if min(self.start_line, self.start_col, self.end_line, self.end_col) < 1:
            raise ValueError("span positions are 1-based")
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError("span start lies after its end")

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    site: Optional[str] = None
    span: Optional[SourceSpan] = None

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def with_span(self, span: Optional[SourceSpan]) -> "Diagnostic":
        if span is None or self.span is not None:
            return self
        return Diagnostic(self.severity, self.code, self.message, self.site, span)

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        site = f" [{self.site}]" if self.site else ""
        return f"{where}{self.severity.value}[{self.code}]: {self.message}{site}"


def error(code: str, message: str, site: Optional[str] = None,
          span: Optional[SourceSpan] = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, site, span)


def warning(code: str, message: str, site: Optional[str] = None,
            span: Optional[SourceSpan] = None) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, site, span)


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


class DiagnosticError(ValueError):
    """Raised when a stage is blocked by one or more Error diagnostics."""

    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        summary = str(first) if first else "unspecified error"
        more = len(self.diagnostics) - 1
        if more > 0:
            summary += f" (+{more} more)"
        super().__init__(summary)

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]
