"""Core thinging-machine types and static well-formedness checks.

A model is a forest of thimacs (thing/machines) under an implicit root named
after the model.  Each thimac owns actions of the five generic kinds; flows
move things between actions and triggers only enable.  All values are
immutable once built.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Optional

from ._util import natural_key
from .diagnostics import Diagnostic, DiagnosticError, SourceSpan, error, warning

SYNTHETIC_CREATE_LABEL = "create!"
MATERIAL_TAGS = ("material", "immaterial")


class ActionKind(enum.Enum):
    CREATE = "create"
    PROCESS = "process"
    RELEASE = "release"
    TRANSFER = "transfer"
    RECEIVE = "receive"

    @property
    def order(self) -> int:
        return _KIND_ORDER[self]


# canonical emission order
_KIND_ORDER = {
    ActionKind.CREATE: 0,
    ActionKind.RECEIVE: 1,
    ActionKind.PROCESS: 2,
    ActionKind.RELEASE: 3,
    ActionKind.TRANSFER: 4,
}

_LEGAL_WITHIN = frozenset({
    (ActionKind.TRANSFER, ActionKind.RECEIVE),
    (ActionKind.RECEIVE, ActionKind.PROCESS),
    (ActionKind.RECEIVE, ActionKind.RELEASE),
    (ActionKind.PROCESS, ActionKind.RELEASE),
    (ActionKind.CREATE, ActionKind.PROCESS),
    (ActionKind.CREATE, ActionKind.RELEASE),
    (ActionKind.RELEASE, ActionKind.TRANSFER),
})
_LEGAL_ACROSS = frozenset({(ActionKind.TRANSFER, ActionKind.TRANSFER)})


def flow_legal(from_kind: ActionKind, to_kind: ActionKind, same_thimac: bool) -> bool:
    """Whether a thing may flow from an action of ``from_kind`` to one of
    ``to_kind``.  Inside a thimac things go transfer -> receive ->
    process/release -> transfer; between thimacs only transfer -> transfer."""
    table = _LEGAL_WITHIN if same_thimac else _LEGAL_ACROSS
    return (from_kind, to_kind) in table


@dataclass(frozen=True)
class Thimac:
    id: str
    name: str
    parent: Optional[str] = None
    kind_note: Optional[str] = None
    implicit_create: bool = False


@dataclass(frozen=True)
class Action:
    id: str
    kind: ActionKind
    owner: str
    name: Optional[str] = None
    storage: bool = False

    @property
    def synthesized(self) -> bool:
        return self.kind is ActionKind.CREATE and self.name == SYNTHETIC_CREATE_LABEL


@dataclass(frozen=True)
class Flow:
    src: str
    dst: str


@dataclass(frozen=True)
class Trigger:
    src: str
    dst: str


def _preorder(thimacs: tuple[Thimac, ...]) -> tuple[Thimac, ...]:
    """Parents before children, siblings in declaration order.  Thimacs not
    reachable from a top-level one (bad parents, cycles) keep their place at
    the end so validation can still report them."""
    children: dict[Optional[str], list[Thimac]] = defaultdict(list)
    for t in thimacs:
        children[t.parent].append(t)
    out: list[Thimac] = []
    seen: set[int] = set()
    stack = list(reversed(children[None]))
    while stack:
        t = stack.pop()
        if id(t) in seen:
            continue
        seen.add(id(t))
        out.append(t)
        stack.extend(reversed(children[t.id]))
    out.extend(t for t in thimacs if id(t) not in seen)
    return tuple(out)


def _edge_key(edge) -> tuple:
    return (natural_key(edge.src), natural_key(edge.dst))


@dataclass(frozen=True)
class StaticModel:
    """The timeless diagram.

    Thimacs are kept in pre-order (siblings in declaration order).  Actions,
    flows and triggers are kept in canonical order so that two models with the
    same elements compare equal regardless of how they were declared.
    """

    root: str
    thimacs: tuple[Thimac, ...] = ()
    actions: tuple[Action, ...] = ()
    flows: tuple[Flow, ...] = ()
    triggers: tuple[Trigger, ...] = ()

    def __post_init__(self) -> None:
        thimacs = _preorder(tuple(self.thimacs))
        position = {t.id: i for i, t in enumerate(thimacs)}
        actions = tuple(sorted(
            self.actions,
            key=lambda a: (position.get(a.owner, len(position)), a.kind.order,
                           natural_key(a.name or ""), natural_key(a.id)),
        ))
        object.__setattr__(self, "thimacs", thimacs)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "flows", tuple(sorted(self.flows, key=_edge_key)))
        object.__setattr__(self, "triggers", tuple(sorted(self.triggers, key=_edge_key)))

    # lookups

    @cached_property
    def thimac_by_id(self) -> dict[str, Thimac]:
        return {t.id: t for t in self.thimacs}

    @cached_property
    def action_by_id(self) -> dict[str, Action]:
        return {a.id: a for a in self.actions}

    @cached_property
    def _actions_by_owner(self) -> dict[str, list[Action]]:
        out: dict[str, list[Action]] = defaultdict(list)
        for a in self.actions:
            out[a.owner].append(a)
        return out

    @cached_property
    def _children(self) -> dict[Optional[str], list[Thimac]]:
        out: dict[Optional[str], list[Thimac]] = defaultdict(list)
        for t in self.thimacs:
            out[t.parent].append(t)
        return out

    @cached_property
    def _out_flows(self) -> dict[str, list[Flow]]:
        out: dict[str, list[Flow]] = defaultdict(list)
        for f in self.flows:
            out[f.src].append(f)
        return out

    @cached_property
    def _out_triggers(self) -> dict[str, list[Trigger]]:
        out: dict[str, list[Trigger]] = defaultdict(list)
        for t in self.triggers:
            out[t.src].append(t)
        return out

    def actions_of(self, thimac_id: str) -> list[Action]:
        return list(self._actions_by_owner.get(thimac_id, ()))

    def children_of(self, thimac_id: Optional[str]) -> list[Thimac]:
        """Direct sub-thimacs; ``None`` gives the top-level thimacs."""
        return list(self._children.get(thimac_id, ()))

    def out_flows(self, action_id: str) -> list[Flow]:
        return list(self._out_flows.get(action_id, ()))

    def out_triggers(self, action_id: str) -> list[Trigger]:
        return list(self._out_triggers.get(action_id, ()))

    def successors(self, action_id: str) -> list[str]:
        """Targets of all outgoing flows then triggers."""
        return [f.dst for f in self.out_flows(action_id)] + [
            t.dst for t in self.out_triggers(action_id)]

    def is_decision_point(self, action_id: str) -> bool:
        a = self.action_by_id.get(action_id)
        return a is not None and a.kind is ActionKind.PROCESS and len(self.successors(action_id)) >= 2

    def create_of(self, thimac_id: str) -> Optional[Action]:
        for a in self.actions_of(thimac_id):
            if a.kind is ActionKind.CREATE:
                return a
        return None

    def resolve(self, path: str) -> Optional[tuple[str, str]]:
        """Resolve a dotted path from the root to ``("thimac"|"action", id)``."""
        if path in self.thimac_by_id:
            return ("thimac", path)
        if path in self.action_by_id:
            return ("action", path)
        return None


# ---------------------------------------------------------------------------
# validation


def validate_static(model: StaticModel,
                    spans: Optional[Mapping[str, SourceSpan]] = None) -> list[Diagnostic]:
    """Return every well-formedness violation in ``model``; empty means valid."""
    spans = spans or {}
    diags: list[Diagnostic] = []

    def report(d: Diagnostic) -> None:
        diags.append(d.with_span(spans.get(d.site)) if d.site else d)

    seen: set[str] = set()
    for t in model.thimacs:
        if t.id in seen:
            report(error("DUPLICATE_ID", f"thimac id {t.id!r} declared twice", t.id))
        seen.add(t.id)
        if t.kind_note is not None and t.kind_note not in MATERIAL_TAGS:
            report(error("BAD_TAG", f"unknown tag {t.kind_note!r} on {t.id}", t.id))

    by_id = model.thimac_by_id
    for t in model.thimacs:
        if t.parent is not None and t.parent not in by_id:
            report(error("UNKNOWN_PARENT", f"parent {t.parent!r} of {t.id} does not exist", t.id))

    for t in model.thimacs:
        walked = {t.id}
        cur = by_id[t.id].parent
        while cur is not None and cur in by_id:
            if cur in walked:
                report(error("CONTAINMENT_CYCLE", f"thimac {t.id} is its own ancestor", t.id))
                break
            walked.add(cur)
            cur = by_id[cur].parent

    sibling_names: dict[tuple, str] = {}
    for t in model.thimacs:
        key = (t.parent, t.name)
        if key in sibling_names and sibling_names[key] != t.id:
            report(error("DUPLICATE_NAME", f"sibling thimacs share the name {t.name!r}", t.id))
        sibling_names.setdefault(key, t.id)

    seen = set()
    labels: dict[tuple[str, str], str] = {}
    creates: dict[str, list[Action]] = defaultdict(list)
    for a in model.actions:
        if a.id in seen or a.id in by_id:
            report(error("DUPLICATE_ID", f"action id {a.id!r} is not unique", a.id))
        seen.add(a.id)
        if a.owner not in by_id:
            report(error("UNKNOWN_OWNER", f"owner {a.owner!r} of action {a.id} does not exist", a.id))
            continue
        if a.name is not None:
            if (a.owner, a.name) in labels:
                report(error("DUPLICATE_LABEL", f"label {a.name!r} used twice in {a.owner}", a.id))
            labels[(a.owner, a.name)] = a.id
        if a.kind is ActionKind.CREATE:
            creates[a.owner].append(a)

    for owner, cs in creates.items():
        if len(cs) > 1:
            report(error("MULTIPLE_CREATE", f"thimac {owner} has {len(cs)} create actions", cs[1].id))
        if by_id[owner].implicit_create and any(not c.synthesized for c in cs):
            report(error("IMPLICIT_CREATE_CONFLICT",
                         f"thimac {owner} is implicitly created but declares a create action",
                         owner))

    actions = model.action_by_id
    seen_flows: set[tuple[str, str]] = set()
    for f in model.flows:
        site = f"flow:{f.src}->{f.dst}"
        missing = [x for x in (f.src, f.dst) if x not in actions]
        for x in missing:
            report(error("REF_ERROR", f"flow endpoint {x!r} does not resolve", site))
        if missing:
            continue
        if (f.src, f.dst) in seen_flows:
            report(error("DUPLICATE_FLOW", f"flow {f.src} -> {f.dst} declared twice", site))
        seen_flows.add((f.src, f.dst))
        a, b = actions[f.src], actions[f.dst]
        if not flow_legal(a.kind, b.kind, a.owner == b.owner):
            where = "within one thimac" if a.owner == b.owner else "across thimacs"
            report(error("FLOW_ILLEGAL",
                         f"illegal flow {a.kind.value} -> {b.kind.value} {where}: {f.src} -> {f.dst}",
                         site))

    seen_triggers: set[tuple[str, str]] = set()
    for t in model.triggers:
        site = f"trigger:{t.src}-->{t.dst}"
        missing = [x for x in (t.src, t.dst) if x not in actions]
        for x in missing:
            report(error("REF_ERROR", f"trigger endpoint {x!r} does not resolve", site))
        if missing:
            continue
        if t.src == t.dst:
            report(error("TRIGGER_SELF", f"trigger from {t.src} to itself", site))
        if (t.src, t.dst) in seen_triggers:
            report(error("DUPLICATE_TRIGGER", f"trigger {t.src} --> {t.dst} declared twice", site))
        seen_triggers.add((t.src, t.dst))
        if (t.src, t.dst) in seen_flows:
            report(error("TRIGGER_DUPLICATES_FLOW",
                         f"trigger {t.src} --> {t.dst} duplicates a flow", site))

    touched: set[str] = set()
    for e in (*model.flows, *model.triggers):
        touched.update((e.src, e.dst))
    for a in model.actions:
        if a.id in touched or a.synthesized:
            continue
        if a.kind is ActionKind.TRANSFER:
            report(warning("DANGLING_TRANSFER", f"transfer {a.id} has no incoming or outgoing edge", a.id))
        else:
            report(warning("ORPHAN_ACTION", f"action {a.id} is not connected to any flow or trigger", a.id))
    return diags


def require_valid(model: StaticModel) -> None:
    errors = [d for d in validate_static(model) if d.is_error]
    if errors:
        raise DiagnosticError(errors)


def expand_implicit_creates(model: StaticModel) -> StaticModel:
    """Give every implicitly created thimac a synthesized, edge-less create
    action labelled ``create!``.  Idempotent; the input is left untouched."""
    require_valid(model)
    added = []
    for t in model.thimacs:
        if t.implicit_create and model.create_of(t.id) is None:
            added.append(Action(f"{t.id}.{SYNTHETIC_CREATE_LABEL}", ActionKind.CREATE, t.id,
                                SYNTHETIC_CREATE_LABEL))
    if not added:
        return model
    return replace(model, actions=model.actions + tuple(added))


# ---------------------------------------------------------------------------
# programmatic construction


@dataclass
class ModelBuilder:
    """Mutable helper that mints ids the same way the parser does.

    >>> b = ModelBuilder("M")
    >>> t = b.thimac("T")
    >>> b.action(t, ActionKind.CREATE, "c")
    'T.c'
    """

    root: str
    _thimacs: list[Thimac] = field(default_factory=list)
    _actions: list[Action] = field(default_factory=list)
    _flows: list[Flow] = field(default_factory=list)
    _triggers: list[Trigger] = field(default_factory=list)
    _counters: dict = field(default_factory=lambda: defaultdict(int))

    def thimac(self, name: str, parent: Optional[str] = None,
               kind_note: Optional[str] = None) -> str:
        tid = name if parent is None else f"{parent}.{name}"
        self._thimacs.append(Thimac(tid, name, parent, kind_note, implicit_create=False))
        return tid

    def action(self, owner: str, kind: ActionKind, name: Optional[str] = None,
               storage: bool = False) -> str:
        if name is None:
            self._counters[(owner, kind)] += 1
            aid = f"{owner}.{kind.value}#{self._counters[(owner, kind)]}"
        else:
            aid = f"{owner}.{name}"
        self._actions.append(Action(aid, kind, owner, name, storage))
        return aid

    def flow(self, src: str, dst: str) -> None:
        self._flows.append(Flow(src, dst))

    def trigger(self, src: str, dst: str) -> None:
        self._triggers.append(Trigger(src, dst))

    def build(self) -> StaticModel:
        """Freeze; thimacs without an explicit create become implicitly created."""
        has_create = {a.owner for a in self._actions if a.kind is ActionKind.CREATE}
        thimacs = [replace(t, implicit_create=t.id not in has_create) for t in self._thimacs]
        return StaticModel(self.root, tuple(thimacs), tuple(self._actions),
                           tuple(self._flows), tuple(self._triggers))


def iter_ancestors(model: StaticModel, thimac_id: str) -> Iterable[str]:
    cur = model.thimac_by_id[thimac_id].parent
    while cur is not None:
        yield cur
        cur = model.thimac_by_id[cur].parent
