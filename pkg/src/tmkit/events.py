"""Regions, event definitions, chronology derivation and coverage."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ._util import natural_key
from .diagnostics import DiagnosticError, error
from .metamodel import Flow, StaticModel, Trigger


@dataclass(frozen=True)
class Region:
    """A connected subdiagram of a static model.

    The id is derived from the member actions, so two events declared over
    the same actions share one region.
    """

    id: str
    action_ids: frozenset[str]
    induced_flows: frozenset[Flow]
    induced_triggers: frozenset[Trigger]

    def __contains__(self, action_id: str) -> bool:
        return action_id in self.action_ids

    def sorted_actions(self) -> list[str]:
        return sorted(self.action_ids, key=natural_key)


@dataclass(frozen=True)
class EventDef:
    id: str
    name: str
    region: Region
    description: Optional[str] = None


@dataclass(frozen=True)
class Chronology:
    nodes: tuple[str, ...]
    forward_edges: frozenset[tuple[str, str]]
    repeat_edges: frozenset[tuple[str, str]]

    def successors(self, event_id: str, repeat: bool = False) -> list[str]:
        edges = self.repeat_edges if repeat else self.forward_edges
        return sorted((b for a, b in edges if a == event_id), key=natural_key)

    def forward_ancestors(self) -> dict[str, frozenset[str]]:
        preds: dict[str, set[str]] = {n: set() for n in self.nodes}
        for a, b in self.forward_edges:
            preds[b].add(a)
        memo: dict[str, frozenset[str]] = {}

        def walk(n: str) -> frozenset[str]:
            if n not in memo:
                acc: set[str] = set()
                for p in preds[n]:
                    acc.add(p)
                    acc |= walk(p)
                memo[n] = frozenset(acc)
            return memo[n]

        for n in self.nodes:
            walk(n)
        return memo


@dataclass(frozen=True)
class Coverage:
    covered: frozenset[str]
    uncovered: frozenset[str]

    @property
    def ratio(self) -> float:
        total = len(self.covered) + len(self.uncovered)
        return len(self.covered) / total if total else 0.0


def region_id_for(action_ids: Iterable[str]) -> str:
    digest = hashlib.sha1("\n".join(sorted(action_ids)).encode("utf-8")).hexdigest()
    return "R" + digest[:10]


def induce_region(model: StaticModel, action_ids: Iterable[str]) -> Region:
    """Build a region from action ids without the connectivity check."""
    ids = frozenset(action_ids)
    flows = frozenset(f for f in model.flows if f.src in ids and f.dst in ids)
    triggers = frozenset(t for t in model.triggers if t.src in ids and t.dst in ids)
    return Region(region_id_for(ids), ids, flows, triggers)


def is_connected(region: Region) -> bool:
    # union-find over the undirected induced graph
    parent = {a: a for a in region.action_ids}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in (*region.induced_flows, *region.induced_triggers):
        parent[find(e.src)] = find(e.dst)
    return len({find(a) for a in region.action_ids}) <= 1


def extract_region(model: StaticModel, paths: Sequence[str], site: Optional[str] = None) -> Region:
    """Resolve element paths to a connected region.

    A thimac path selects the thimac's own actions but not those of its
    sub-thimacs.  Raises DiagnosticError with REF_ERROR, REGION_EMPTY or
    REGION_DISCONNECTED.
    """
    diags = []
    ids: set[str] = set()
    for p in paths:
        hit = model.resolve(p)
        if hit is None:
            diags.append(error("REF_ERROR", f"region path {p!r} does not resolve", site))
        elif hit[0] == "thimac":
            ids.update(a.id for a in model.actions_of(hit[1]))
        else:
            ids.add(hit[1])
    if diags:
        raise DiagnosticError(diags)
    if not ids:
        raise DiagnosticError([error("REGION_EMPTY", "region selects no actions", site)])
    region = induce_region(model, ids)
    if not is_connected(region):
        raise DiagnosticError([error(
            "REGION_DISCONNECTED",
            "region actions do not form a connected subdiagram: " + ", ".join(region.sorted_actions()),
            site)])
    return region


def boundary_pairs(model: StaticModel, events: Sequence[EventDef]) -> set[tuple[str, str]]:
    """Event pairs (a, b) joined by an edge that leaves a's region and enters b's."""
    pairs = set()
    for edge in (*model.flows, *model.triggers):
        leaving = [e for e in events if edge.src in e.region and edge.dst not in e.region]
        entering = [e for e in events if edge.dst in e.region and edge.src not in e.region]
        for a in leaving:
            for b in entering:
                if a.id != b.id:
                    pairs.add((a.id, b.id))
    return pairs


def _reaches(adj: dict[str, set[str]], start: str, goal: str) -> bool:
    stack, seen = [start], {start}
    while stack:
        n = stack.pop()
        if n == goal:
            return True
        for m in adj[n]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return False


def derive_chronology(model: StaticModel, events: Sequence[EventDef]) -> Chronology:
    """Order events by the boundary edges between their regions.

    Candidate edges are inserted in (source, target) id order; an edge that
    would close a cycle among the edges accepted so far becomes a repeat edge.
    """
    ids = [e.id for e in events]
    dupes = sorted({i for i in ids if ids.count(i) > 1}, key=natural_key)
    if dupes:
        raise DiagnosticError([error("DUPLICATE_EVENT", f"event id {d!r} declared twice", d)
                               for d in dupes])
    ordered = sorted(events, key=lambda e: natural_key(e.id))
    nodes = tuple(e.id for e in ordered)
    adj: dict[str, set[str]] = {n: set() for n in nodes}
    forward, repeat = set(), set()
    for a, b in sorted(boundary_pairs(model, ordered),
                       key=lambda p: (natural_key(p[0]), natural_key(p[1]))):
        if _reaches(adj, b, a):
            repeat.add((a, b))
        else:
            adj[a].add(b)
            forward.add((a, b))
    return Chronology(nodes, frozenset(forward), frozenset(repeat))


def coverage(model: StaticModel, events: Sequence[EventDef]) -> Coverage:
    """Partition model actions into those inside some event region and the rest.

    A synthesized implicit create counts as covered when any event covers
    another action of the same thimac.
    """
    covered: set[str] = set()
    for e in events:
        covered |= e.region.action_ids
    all_ids = {a.id for a in model.actions}
    covered &= all_ids
    owners = {model.action_by_id[a].owner for a in covered}
    for a in model.actions:
        if a.synthesized and a.owner in owners:
            covered.add(a.id)
    return Coverage(frozenset(covered), frozenset(all_ids - covered))
