from __future__ import annotations

import re
from dataclasses import dataclass

from ..diagnostics import Diagnostic, SourceSpan, error

KEYWORDS = frozenset({
    "model", "thimac", "material", "immaterial",
    "create", "process", "release", "transfer", "receive", "storage",
    "flow", "trigger", "event", "region", "desc", "scenario", "choose", "inject",
})

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<string>"(?:\\.|[^"\\\n])*")
  | (?P<punct>-->|->|[{}\[\];,.=])
""", re.VERBOSE)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "keyword" | "string" | "punct" | "eof"
    text: str
    span: SourceSpan
    value: str = ""


def _unescape(body: str) -> str:
    out, i = [], 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def escape_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


def tokenize(text: str, file_name: str) -> tuple[list[Token], list[Diagnostic]]:
    """Split ``text`` into tokens.  Bad characters are reported as LEX_ERROR
    and skipped so that lexing continues."""
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, col, pos = 1, 1, 0

    def advance(chunk: str) -> tuple[int, int]:
        nonlocal line, col
        for ch in chunk:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        return line, col

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        start = (line, col)
        if m is None:
            bad = text[pos]
            if bad == '"':
                end = text.find("\n", pos)
                bad = text[pos:end if end != -1 else len(text)]
                msg = "unterminated string literal"
            else:
                msg = f"unexpected character {bad!r}"
            advance(bad[:-1])
            diags.append(error("LEX_ERROR", msg, None, SourceSpan(file_name, *start, line, col)))
            advance(bad[-1])
            pos += len(bad)
            continue
        chunk = m.group(0)
        kind = m.lastgroup
        pos = m.end()
        if kind in ("ws", "comment"):
            advance(chunk)
            continue
        advance(chunk[:-1])
        span = SourceSpan(file_name, start[0], start[1], line, col)
        advance(chunk[-1])
        if kind == "ident":
            tokens.append(Token("keyword" if chunk in KEYWORDS else "ident", chunk, span, chunk))
        elif kind == "string":
            tokens.append(Token("string", chunk, span, _unescape(chunk[1:-1])))
        else:
            tokens.append(Token("punct", chunk, span, chunk))
    tokens.append(Token("eof", "", SourceSpan(file_name, line, col, line, col)))
    return tokens, diags
