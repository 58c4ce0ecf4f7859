"""DOT emitters for static models, dynamic models and chronologies.

Semantics are carried by shape and style only: thimacs are nested clusters,
triggers are dashed, storage is a cylinder.  No layout is emitted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

from ._util import natural_key
from .diagnostics import DiagnosticError, error
from .events import Chronology, EventDef, induce_region, is_connected
from .metamodel import StaticModel, require_valid

INDENT = "  "


class DotKind(enum.Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"
    CHRONOLOGY = "chronology"


@dataclass(frozen=True)
class DotDocument:
    text: str
    kind: DotKind

    def file_name(self, model_name: str) -> str:
        return f"{model_name}.{self.kind.value}.dot"

    def write(self, path) -> Path:
        out = Path(path)
        out.write_text(self.text, encoding="utf-8")
        return out


def quote(text: str) -> str:
    """Quote a DOT identifier or string; newlines become DOT line breaks."""
    body = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{body}"'


def _attrs(pairs: Sequence[tuple[str, str]]) -> str:
    return "[" + ", ".join(f"{k}={v}" for k, v in pairs) + "]"


def storage_node(action_id: str) -> str:
    return f"{action_id}#storage"


def _action_lines(model: StaticModel, tid: str, pad: str,
                  memberships: Mapping[str, list[str]]) -> list[str]:
    lines = []
    for a in model.actions_of(tid):
        label = a.kind.value if a.name is None else f"{a.kind.value}\n{a.name}"
        attrs = [("label", quote(label)), ("shape", "box" if a.synthesized else "ellipse")]
        if a.synthesized:
            attrs.append(("style", "dotted"))
        events = memberships.get(a.id)
        if events:
            attrs.append(("peripheries", "2"))
            attrs.append(("xlabel", quote(",".join(events))))
        lines.append(f"{pad}{quote(a.id)} {_attrs(attrs)};")
        if a.storage:
            lines.append(f"{pad}{quote(storage_node(a.id))} "
                         f"{_attrs([('label', quote('storage')), ('shape', 'cylinder')])};")
    return lines


def _cluster_lines(model: StaticModel, tid: str, depth: int,
                   memberships: Mapping[str, list[str]]) -> list[str]:
    pad = INDENT * depth
    t = model.thimac_by_id[tid]
    label = t.name if t.kind_note is None else f"{t.name}\n[{t.kind_note}]"
    lines = [f"{pad}subgraph {quote('cluster_' + tid)} {{", f"{pad}{INDENT}label={quote(label)};"]
    lines.extend(_action_lines(model, tid, pad + INDENT, memberships))
    for child in model.children_of(tid):
        lines.extend(_cluster_lines(model, child.id, depth + 1, memberships))
    lines.append(f"{pad}}}")
    return lines


def _model_lines(model: StaticModel, memberships: Mapping[str, list[str]]) -> list[str]:
    lines = [f"{INDENT}subgraph {quote('cluster_' + model.root)} {{",
             f"{INDENT * 2}label={quote(model.root)};"]
    for top in model.children_of(None):
        lines.extend(_cluster_lines(model, top.id, 2, memberships))
    lines.append(f"{INDENT}}}")
    for f in model.flows:
        lines.append(f"{INDENT}{quote(f.src)} -> {quote(f.dst)} [style=solid];")
    for t in model.triggers:
        lines.append(f"{INDENT}{quote(t.src)} -> {quote(t.dst)} [style=dashed];")
    for a in model.actions:
        if a.storage:
            lines.append(f"{INDENT}{quote(a.id)} -> {quote(storage_node(a.id))} "
                         f"[style=solid, dir=none];")
    return lines


def _wrap(name: str, lines: list[str]) -> str:
    return "\n".join([f"digraph {quote(name)} {{", *lines, "}"]) + "\n"


def export_static(model: StaticModel) -> DotDocument:
    require_valid(model)
    return DotDocument(_wrap(model.root, _model_lines(model, {})), DotKind.STATIC)


def _check_events(model: StaticModel, events: Sequence[EventDef]) -> None:
    problems = []
    for ev in events:
        unknown = [a for a in ev.region.action_ids if a not in model.action_by_id]
        if unknown:
            problems.append(error("REF_ERROR", f"event {ev.id} names unknown actions: "
                                  + ", ".join(sorted(unknown, key=natural_key)), f"event:{ev.id}"))
            continue
        if not ev.region.action_ids:
            problems.append(error("REGION_EMPTY", f"event {ev.id} has an empty region",
                                  f"event:{ev.id}"))
        elif not is_connected(induce_region(model, ev.region.action_ids)):
            problems.append(error("REGION_DISCONNECTED", f"event {ev.id} region is not connected",
                                  f"event:{ev.id}"))
    if problems:
        raise DiagnosticError(problems)


def export_dynamic(model: StaticModel, events: Sequence[EventDef]) -> DotDocument:
    """Static export with event regions overlaid.

    DOT clusters cannot overlap, so a region is shown by doubled node borders
    and an ``xlabel`` naming its events, plus one legend box per event.
    """
    require_valid(model)
    _check_events(model, events)
    ordered = sorted(events, key=lambda e: natural_key(e.id))
    memberships: dict[str, list[str]] = {}
    for ev in ordered:
        for aid in ev.region.action_ids:
            memberships.setdefault(aid, []).append(ev.id)
    lines = _model_lines(model, memberships)
    if ordered:
        lines.append(f"{INDENT}subgraph {quote('cluster_#events')} {{")
        lines.append(f"{INDENT * 2}label={quote('events')};")
        for ev in ordered:
            text = ev.id if ev.description is None else f"{ev.id}\n{ev.description}"
            count = len(ev.region.action_ids)
            text += f"\n({count} action{'' if count == 1 else 's'})"
            lines.append(f"{INDENT * 2}{quote('event:' + ev.id)} "
                         f"{_attrs([('label', quote(text)), ('shape', 'box'), ('peripheries', '2')])};")
        lines.append(f"{INDENT}}}")
    return DotDocument(_wrap(model.root, lines), DotKind.DYNAMIC)


def export_chronology(chronology: Chronology, name: str = "chronology",
                      labels: Optional[Mapping[str, str]] = None) -> DotDocument:
    labels = labels or {}
    lines = [f"{INDENT}node [shape=box];"]
    for node in sorted(chronology.nodes, key=natural_key):
        text = labels.get(node)
        label = node if text is None else f"{node}\n{text}"
        lines.append(f"{INDENT}{quote(node)} [label={quote(label)}];")
    for src, dst in sorted(chronology.forward_edges, key=lambda e: (natural_key(e[0]), natural_key(e[1]))):
        lines.append(f"{INDENT}{quote(src)} -> {quote(dst)} [style=solid];")
    for src, dst in sorted(chronology.repeat_edges, key=lambda e: (natural_key(e[0]), natural_key(e[1]))):
        lines.append(f'{INDENT}{quote(src)} -> {quote(dst)} [style=dashed, label="repeat"];')
    return DotDocument(_wrap(name, lines), DotKind.CHRONOLOGY)
