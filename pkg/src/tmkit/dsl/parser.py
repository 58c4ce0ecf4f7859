"""Recursive-descent parser for ``.tm`` model documents.

Grammar errors stop the parse at the first offending token; reference,
region and model errors are collected over the whole document.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..diagnostics import Diagnostic, DiagnosticError, SourceSpan, error, has_errors
from ..events import EventDef, extract_region
from ..metamodel import Action, ActionKind, Flow, StaticModel, Thimac, Trigger, validate_static
from ..sim.scenario import Scenario, check_scenario
from .document import ModelDocument
from .lexer import Token, tokenize

_KINDS = {k.value: k for k in ActionKind}


class _Abort(Exception):
    pass


@dataclass
class _Path:
    parts: list[str]
    span: SourceSpan

    @property
    def text(self) -> str:
        return ".".join(self.parts)


@dataclass
class _Edge:
    trigger: bool
    src: _Path
    dst: _Path
    span: SourceSpan


@dataclass
class _Event:
    name: str
    paths: list[_Path]
    desc: Optional[str]
    span: SourceSpan


@dataclass
class _Scenario:
    name: str
    directives: list[tuple]
    span: SourceSpan


@dataclass
class _Raw:
    name: str = ""
    thimacs: list[tuple[Thimac, SourceSpan]] = field(default_factory=list)
    actions: list[tuple[Action, SourceSpan]] = field(default_factory=list)
    edges: list[_Edge] = field(default_factory=list)
    events: list[_Event] = field(default_factory=list)
    scenarios: list[_Scenario] = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: list[Token], diags: list[Diagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diags = diags
        self.raw = _Raw()
        self.counters: dict[tuple[str, str], int] = {}
        self.sibling_names: set[tuple[Optional[str], str]] = set()

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def _error_span(self) -> SourceSpan:
        if self.tok.kind == "eof" and self.pos > 0:
            return self.tokens[self.pos - 1].span
        return self.tok.span

    def fail(self, message: str) -> None:
        self.diags.append(error("PARSE_ERROR", message, None, self._error_span()))
        raise _Abort()

    def describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    def accept(self, text: str) -> Optional[Token]:
        if self.tok.kind in ("punct", "keyword") and self.tok.text == text:
            tok = self.tok
            self.pos += 1
            return tok
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            self.fail(f"expected {text!r}, found {self.describe(self.tok)}")
        return tok

    def ident(self, what: str) -> Token:
        if self.tok.kind != "ident":
            if self.tok.kind == "keyword":
                self.fail(f"keyword {self.tok.text!r} cannot be used as {what}")
            self.fail(f"expected {what}, found {self.describe(self.tok)}")
        tok = self.tok
        self.pos += 1
        return tok

    def path(self) -> _Path:
        first = self.ident("a path")
        parts, end = [first.text], first.span
        while self.accept("."):
            tok = self.ident("a path segment")
            parts.append(tok.text)
            end = tok.span
        return _Path(parts, _join(first.span, end))

    # grammar

    def document(self) -> _Raw:
        self.expect("model")
        self.raw.name = self.ident("a model name").text
        self.expect("{")
        while not self.accept("}"):
            if self.tok.kind == "eof":
                self.fail("expected '}' to close the model, found end of input")
            self.item()
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.describe(self.tok)} after the model")
        return self.raw

    def item(self) -> None:
        if self.tok.text == "thimac" and self.tok.kind == "keyword":
            self.thimac(None)
        elif self.tok.text == "event" and self.tok.kind == "keyword":
            self.event()
        elif self.tok.text == "scenario" and self.tok.kind == "keyword":
            self.scenario()
        else:
            self.unknown("model item (thimac, event or scenario)")

    def unknown(self, expected: str) -> None:
        if self.tok.kind == "ident":
            self.fail(f"unknown keyword {self.tok.text!r}; expected {expected}")
        self.fail(f"expected {expected}, found {self.describe(self.tok)}")

    def thimac(self, parent: Optional[str]) -> None:
        start = self.expect("thimac").span
        name_tok = self.ident("a thimac name")
        tag = None
        if self.accept("["):
            if self.tok.text not in ("material", "immaterial") or self.tok.kind != "keyword":
                self.fail(f"expected 'material' or 'immaterial', found {self.describe(self.tok)}")
            tag = self.tok.text
            self.pos += 1
            self.expect("]")
        tid = name_tok.text if parent is None else f"{parent}.{name_tok.text}"
        if (parent, name_tok.text) in self.sibling_names:
            self.diags.append(error("DUPLICATE_NAME",
                                    f"a sibling named {name_tok.text!r} already exists", tid,
                                    name_tok.span))
        self.sibling_names.add((parent, name_tok.text))
        index = len(self.raw.thimacs)
        self.raw.thimacs.append((Thimac(tid, name_tok.text, parent, tag), name_tok.span))
        self.expect("{")
        while True:
            close = self.accept("}")
            if close:
                break
            if self.tok.kind == "eof":
                self.fail(f"expected '}}' to close thimac {tid}, found end of input")
            self.member(tid)
        thimac, _ = self.raw.thimacs[index]
        self.raw.thimacs[index] = (thimac, _join(start, close.span))

    def member(self, owner: str) -> None:
        tok = self.tok
        if tok.kind == "keyword" and tok.text == "thimac":
            self.thimac(owner)
        elif tok.kind == "keyword" and tok.text in _KINDS:
            self.action(owner)
        elif tok.kind == "keyword" and tok.text in ("flow", "trigger"):
            self.edge()
        else:
            self.unknown("thimac member (thimac, action, flow or trigger)")

    def action(self, owner: str) -> None:
        kind_tok = self.tok
        self.pos += 1
        kind = _KINDS[kind_tok.text]
        label = None
        if self.tok.kind == "ident":
            label = self.tok.text
            self.pos += 1
        storage = self.accept("storage") is not None
        end = self.expect(";")
        if label is None:
            key = (owner, kind.value)
            self.counters[key] = self.counters.get(key, 0) + 1
            aid = f"{owner}.{kind.value}#{self.counters[key]}"
        else:
            aid = f"{owner}.{label}"
        self.raw.actions.append((Action(aid, kind, owner, label, storage), _join(kind_tok.span, end.span)))

    def edge(self) -> None:
        start = self.tok
        self.pos += 1
        is_trigger = start.text == "trigger"
        src = self.path()
        self.expect("-->" if is_trigger else "->")
        dst = self.path()
        end = self.expect(";")
        self.raw.edges.append(_Edge(is_trigger, src, dst, _join(start.span, end.span)))

    def event(self) -> None:
        start = self.expect("event").span
        name = self.ident("an event name").text
        self.expect("{")
        self.expect("region")
        self.expect("{")
        paths = [self.path()]
        while self.accept(","):
            if self.tok.text == "}" and self.tok.kind == "punct":
                break
            paths.append(self.path())
        self.expect("}")
        desc = None
        if self.accept("desc"):
            if self.tok.kind != "string":
                self.fail(f"expected a string after 'desc', found {self.describe(self.tok)}")
            desc = self.tok.value
            self.pos += 1
            self.expect(";")
        end = self.expect("}")
        self.raw.events.append(_Event(name, paths, desc, _join(start, end.span)))

    def scenario(self) -> None:
        start = self.expect("scenario").span
        name = self.ident("a scenario name").text
        self.expect("{")
        directives = []
        while True:
            close = self.accept("}")
            if close:
                break
            tok = self.tok
            if self.accept("choose"):
                point = self.path()
                self.expect("=")
                pick = self.ident("a successor label")
                end = self.expect(";")
                directives.append(("choose", point, pick.text, _join(tok.span, end.span)))
            elif self.accept("inject"):
                head = self.path()
                end = self.expect(";")
                directives.append(("inject", head, None, _join(tok.span, end.span)))
            else:
                self.unknown("scenario directive (choose or inject)")
        self.raw.scenarios.append(_Scenario(name, directives, _join(start, close.span)))


def _join(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    return SourceSpan(a.file, a.start_line, a.start_col, b.end_line, b.end_col)


# ---------------------------------------------------------------------------
# resolution


def _resolve_action(model: StaticModel, path: _Path, diags: list[Diagnostic], site: str) -> Optional[str]:
    hit = model.resolve(path.text)
    if hit is None:
        diags.append(error("REF_ERROR", f"{path.text!r} does not resolve to a declared element",
                           site, path.span))
        return None
    if hit[0] != "action":
        diags.append(error("REF_ERROR", f"{path.text!r} names a thimac, not an action", site, path.span))
        return None
    return hit[1]


def _build(raw: _Raw, diags: list[Diagnostic]) -> Optional[ModelDocument]:
    spans: dict[str, SourceSpan] = {}
    thimac_ids = set()
    thimacs = []
    for t, span in raw.thimacs:
        if t.id in thimac_ids:
            continue
        thimac_ids.add(t.id)
        thimacs.append(t)
        spans[t.id] = span

    actions = []
    action_ids: set[str] = set()
    for a, span in raw.actions:
        if a.id in thimac_ids or a.id in action_ids:
            diags.append(error("DUPLICATE_ID", f"{a.id!r} is already declared", a.id, span))
            continue
        action_ids.add(a.id)
        actions.append(a)
        spans[a.id] = span

    with_create = {a.owner for a in actions if a.kind is ActionKind.CREATE}
    thimacs = [Thimac(t.id, t.name, t.parent, t.kind_note, t.id not in with_create) for t in thimacs]
    skeleton = StaticModel(raw.name, tuple(thimacs), tuple(actions))

    flows, triggers = [], []
    for e in raw.edges:
        site = f"{'trigger' if e.trigger else 'flow'}:{e.src.text}{'-->' if e.trigger else '->'}{e.dst.text}"
        src = _resolve_action(skeleton, e.src, diags, site)
        dst = _resolve_action(skeleton, e.dst, diags, site)
        if src is None or dst is None:
            continue
        key = f"trigger:{src}-->{dst}" if e.trigger else f"flow:{src}->{dst}"
        spans.setdefault(key, e.span)
        (triggers if e.trigger else flows).append((Trigger if e.trigger else Flow)(src, dst))

    model = StaticModel(raw.name, tuple(thimacs), tuple(actions), tuple(flows), tuple(triggers))
    diags.extend(validate_static(model, spans))

    events = []
    event_ids: set[str] = set()
    for ev in raw.events:
        site = f"event:{ev.name}"
        if ev.name in event_ids:
            diags.append(error("DUPLICATE_EVENT", f"event {ev.name!r} declared twice", site, ev.span))
            continue
        event_ids.add(ev.name)
        spans[site] = ev.span
        bad = False
        for p in ev.paths:
            if model.resolve(p.text) is None:
                diags.append(error("REF_ERROR", f"region path {p.text!r} does not resolve", site, p.span))
                bad = True
        if bad:
            continue
        try:
            region = extract_region(model, [p.text for p in ev.paths], site)
        except DiagnosticError as exc:
            diags.extend(d.with_span(ev.span) for d in exc.diagnostics)
            continue
        events.append(EventDef(ev.name, ev.name, region, ev.desc))

    scenarios = []
    scenario_ids: set[str] = set()
    for sc in raw.scenarios:
        site = f"scenario:{sc.name}"
        if sc.name in scenario_ids:
            diags.append(error("DUPLICATE_SCENARIO", f"scenario {sc.name!r} declared twice", site, sc.span))
            continue
        scenario_ids.add(sc.name)
        spans[site] = sc.span
        choices: dict[str, list[str]] = {}
        injections = []
        local: list[Diagnostic] = []
        for kind, path, pick, span in sc.directives:
            target = _resolve_action(model, path, local, site)
            if target is None:
                continue
            if kind == "inject":
                injections.append(target)
                continue
            if not model.is_decision_point(target):
                local.append(error("CHOICE_ERROR",
                                   f"{path.text} is not a process action with several successors",
                                   site, span))
                continue
            matches = [s for s in model.successors(target) if model.action_by_id[s].name == pick]
            if len(matches) != 1:
                why = "no" if not matches else "more than one"
                local.append(error("CHOICE_ERROR",
                                   f"{why} successor of {path.text} is labelled {pick!r}", site, span))
                continue
            choices.setdefault(target, []).append(matches[0])
        scenario = Scenario(sc.name, {k: tuple(v) for k, v in choices.items()}, tuple(injections))
        if not local:
            local = [d.with_span(sc.span) for d in check_scenario(model, scenario, site)]
        diags.extend(local)
        scenarios.append(scenario)

    if has_errors(diags):
        return None
    return ModelDocument(model, tuple(events), tuple(scenarios), spans)


def parse_with_diagnostics(text: str, file_name: str = "<string>") -> tuple[Optional[ModelDocument], list[Diagnostic]]:
    """Parse ``text``; returns the document (None on errors) and all diagnostics."""
    tokens, diags = tokenize(text, file_name)
    parser = _Parser(tokens, diags)
    try:
        raw = parser.document()
    except _Abort:
        return None, diags
    doc = _build(raw, diags)
    return doc, diags


def parse(text: str, file_name: str = "<string>") -> ModelDocument:
    """Parse a ``.tm`` document, raising DiagnosticError if it has errors."""
    doc, diags = parse_with_diagnostics(text, file_name)
    if doc is None:
        raise DiagnosticError([d for d in diags if d.is_error])
    return doc


def parse_file(path) -> ModelDocument:
    from pathlib import Path

    p = Path(path)
    return parse(p.read_text(encoding="utf-8"), str(p))
