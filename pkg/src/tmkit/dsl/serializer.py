from __future__ import annotations

from ..diagnostics import DiagnosticError, error, has_errors
from ..metamodel import StaticModel, validate_static
from .document import ModelDocument
from .lexer import escape_string

INDENT = "  "


def _thimac_lines(model: StaticModel, tid: str, depth: int) -> list[str]:
    pad = INDENT * depth
    t = model.thimac_by_id[tid]
    tag = f" [{t.kind_note}]" if t.kind_note else ""
    lines = [f"{pad}thimac {t.name}{tag} {{"]
    inner = pad + INDENT
    # the model already keeps actions in kind-then-label order
    for a in model.actions_of(tid):
        if a.synthesized:
            continue
        words = [a.kind.value]
        if a.name is not None:
            words.append(a.name)
        if a.storage:
            words.append("storage")
        lines.append(f"{inner}{' '.join(words)};")
    for child in model.children_of(tid):
        lines.extend(_thimac_lines(model, child.id, depth + 1))
    owned = {a.id for a in model.actions_of(tid)}
    for f in model.flows:
        if f.src in owned:
            lines.append(f"{inner}flow {f.src} -> {f.dst};")
    for t in model.triggers:
        if t.src in owned:
            lines.append(f"{inner}trigger {t.src} --> {t.dst};")
    lines.append(f"{pad}}}")
    return lines


def serialize(doc: ModelDocument) -> str:
    """Emit canonical text for a valid document.

    Synthesized implicit creates are omitted; they are re-derived on demand.
    """
    model = doc.model
    if has_errors(validate_static(model)):
        raise DiagnosticError([d for d in validate_static(model) if d.is_error])
    for a in model.actions:
        if "#" in a.id and any(a.id in e.region for e in doc.events):
            raise DiagnosticError([error("UNADDRESSABLE", f"unlabelled action {a.id} is used by an event",
                                         a.id)])
    lines = [f"model {model.root} {{"]
    for top in model.children_of(None):
        lines.extend(_thimac_lines(model, top.id, 1))
    for ev in doc.events:
        lines.append(f"{INDENT}event {ev.id} {{")
        lines.append(f"{INDENT * 2}region {{ {', '.join(ev.region.sorted_actions())} }}")
        if ev.description is not None:
            lines.append(f"{INDENT * 2}desc {escape_string(ev.description)};")
        lines.append(f"{INDENT}}}")
    for sc in doc.scenarios:
        lines.append(f"{INDENT}scenario {sc.id} {{")
        for point in sorted(sc.choices):
            for pick in sc.choices[point]:
                label = model.action_by_id[pick].name
                if label is None:
                    raise DiagnosticError([error("UNADDRESSABLE",
                                                 f"choice {pick} of {point} has no label", point)])
                lines.append(f"{INDENT * 2}choose {point} = {label};")
        for head in sc.injections:
            lines.append(f"{INDENT * 2}inject {head};")
        lines.append(f"{INDENT}}}")
    lines.append("}")
    return "\n".join(lines) + "\n"
