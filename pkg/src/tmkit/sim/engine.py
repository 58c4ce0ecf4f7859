"""Deterministic event-firing simulator.

Things and trigger signals sit as *marks* on actions.  An event is enabled
when a mark sits inside its region; the lowest-id enabled event whose forward
chronology ancestors are all idle fires atomically in one tick, carrying the
mark through the region's actions.  Edges leaving the region leave new marks
behind for later events.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Callable, Optional, Union

from .._util import natural_key
from ..diagnostics import Diagnostic, DiagnosticError, error, warning
from ..events import Chronology, EventDef, derive_chronology
from ..metamodel import ActionKind, StaticModel, expand_implicit_creates
from .scenario import Scenario, check_scenario

if TYPE_CHECKING:
    from ..dsl.document import ModelDocument

DEFAULT_BUDGET = 10_000


class Mode(enum.Enum):
    EXISTENCE = "existence"
    SUBSISTENCE = "subsistence"


class SimulationError(DiagnosticError):
    @property
    def code(self) -> str:
        return self.diagnostics[0].code


@dataclass(frozen=True)
class Occurrence:
    event_id: str
    region_id: str
    start_tick: int
    end_tick: int


@dataclass(frozen=True)
class InformationRecord:
    """Footprint of a completed occurrence.  ``carrier`` is None while the
    information only subsists, and names a thimac once it is carried."""

    id: str
    event_id: str
    region_id: str
    tick: int
    carrier: Optional[str] = None


@dataclass
class Thing:
    id: str
    thimac: str
    origin: str
    location: str
    tags: set[str] = field(default_factory=set)
    parked_at: Optional[str] = None


@dataclass(frozen=True)
class Mark:
    seq: int
    action: str
    thing: Optional[str]
    signal: bool
    tags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Fired:
    occurrence: Occurrence


@dataclass(frozen=True)
class Done:
    diagnostics: tuple[Diagnostic, ...] = ()


Observer = Callable[["SimState", EventDef, int], None]


@dataclass
class SimState:
    model: StaticModel
    events: tuple[EventDef, ...]
    scenario: Scenario
    chronology: Chronology
    clock: int = 0
    modes: dict[str, Mode] = field(default_factory=dict)
    registry: dict[str, int] = field(default_factory=dict)
    things: dict[str, Thing] = field(default_factory=dict)
    storage: dict[str, deque] = field(default_factory=dict)
    marks: list[Mark] = field(default_factory=list)
    trace: list[Occurrence] = field(default_factory=list)
    footprints: list[InformationRecord] = field(default_factory=list)
    carried: dict[str, InformationRecord] = field(default_factory=dict)
    carrier_history: dict[str, list[str]] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    observers: list[Observer] = field(default_factory=list)
    finished: bool = False
    _ancestors: dict[str, frozenset[str]] = field(default_factory=dict)
    _choice_cursor: dict[str, int] = field(default_factory=dict)
    _seq: itertools.count = field(default_factory=itertools.count)
    _park_order: dict[str, int] = field(default_factory=dict)
    _ids: dict[str, itertools.count] = field(
        default_factory=lambda: {"thing": itertools.count(1), "info": itertools.count(1)})

    @property
    def region_ids(self) -> set[str]:
        return {e.region.id for e in self.events}

    def parked(self, action_id: str) -> list[str]:
        return list(self.storage.get(action_id, ()))


@dataclass(frozen=True)
class RunResult:
    trace: tuple[Occurrence, ...]
    modes: dict[str, Mode]
    registry: dict[str, int]
    footprints: tuple[InformationRecord, ...]
    carried: dict[str, InformationRecord]
    diagnostics: tuple[Diagnostic, ...]
    completed: bool


# ---------------------------------------------------------------------------
# setup


def _reachable(model: StaticModel, heads) -> set[str]:
    seen, stack = set(heads), list(heads)
    while stack:
        for nxt in model.successors(stack.pop()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def init(doc: "ModelDocument", scenario_id: Optional[str] = None) -> SimState:
    """Prepare a run of ``doc`` under the named scenario (None: no choices, no injections)."""
    if scenario_id is None:
        scenario = Scenario("default")
    else:
        scenario = doc.scenario(scenario_id)
        if scenario is None:
            raise SimulationError([error("UNKNOWN_SCENARIO", f"no scenario named {scenario_id!r}")])
    model = expand_implicit_creates(doc.model)
    problems = check_scenario(model, scenario)
    if problems:
        raise SimulationError(problems)
    missing = [
        error("MISSING_CHOICE", f"decision point {a} is reachable but scenario "
                                f"{scenario.id!r} does not choose a successor", a)
        for a in sorted(_reachable(model, scenario.injections), key=natural_key)
        if model.is_decision_point(a) and a not in scenario.choices
    ]
    if missing:
        raise SimulationError(missing)

    events = tuple(sorted(doc.events, key=lambda e: natural_key(e.id)))
    chronology = derive_chronology(model, events)
    state = SimState(model, events, scenario, chronology)
    state._ancestors = chronology.forward_ancestors()
    state.modes = {e.region.id: Mode.SUBSISTENCE for e in events}
    for head in scenario.injections:
        thing = _new_thing(state, head)
        _add_mark(state, head, thing.id, signal=False, tags=frozenset())
    return state


def _new_thing(state: SimState, action_id: str, tags=()) -> Thing:
    action = state.model.action_by_id[action_id]
    thing = Thing(f"t{next(state._ids['thing'])}", action.owner, action_id, action_id, set(tags))
    state.things[thing.id] = thing
    return thing


def _add_mark(state: SimState, action: str, thing: Optional[str], signal: bool, tags) -> None:
    state.marks.append(Mark(next(state._seq), action, thing, signal, frozenset(tags)))


# ---------------------------------------------------------------------------
# stepping


def enabled_events(state: SimState) -> list[EventDef]:
    marked = {m.action for m in state.marks}
    return [e for e in state.events if marked & e.region.action_ids]


def step(state: SimState) -> Union[Fired, Done]:
    """Fire the next enabled event, or report Done when none is enabled."""
    if state.finished:
        return Done()
    enabled = enabled_events(state)
    if not enabled:
        state.finished = True
        stuck = []
        covered = set().union(*(e.region.action_ids for e in state.events)) if state.events else set()
        for m in state.marks:
            if m.action not in covered:
                what = f"thing {m.thing}" if m.thing else "a trigger signal"
                stuck.append(warning("STUCK_THING", f"{what} waits at {m.action}, which no event covers",
                                     m.action))
        state.diagnostics.extend(stuck)
        return Done(tuple(stuck))
    busy = {e.id for e in enabled}
    # an event waits while one of its forward chronology ancestors still has work
    chosen = next((e for e in enabled if not (state._ancestors.get(e.id, frozenset()) & busy)), enabled[0])
    return Fired(_fire(state, chosen))


def _fire(state: SimState, event: EventDef) -> Occurrence:
    region = event.region
    mark = min((m for m in state.marks if m.action in region), key=lambda m: m.seq)
    state.marks.remove(mark)
    state.clock += 1
    tick = state.clock
    state.modes[region.id] = Mode.EXISTENCE
    try:
        work = deque([(mark.action, mark.thing, mark.signal, mark.tags)])
        visited = {mark.action}
        while work:
            _visit(state, region, work, visited, *work.popleft())
        for observer in list(state.observers):
            observer(state, event, tick)
    finally:
        state.modes[region.id] = Mode.SUBSISTENCE
    occ = Occurrence(event.id, region.id, tick, tick)
    state.trace.append(occ)
    state.registry.setdefault(region.id, tick)
    state.footprints.append(InformationRecord(f"I{next(state._ids['info'])}", event.id, region.id, tick))
    return occ


def _visit(state: SimState, region, work, visited, action_id, thing_id, signal, tags) -> None:
    model = state.model
    action = model.action_by_id[action_id]
    if action.kind is ActionKind.CREATE and (signal or thing_id is None):
        thing_id = _new_thing(state, action_id, tags).id
    elif signal and thing_id is None:
        thing_id = _pickup(state, action.owner)
        if thing_id is None and model.thimac_by_id[action.owner].implicit_create:
            create = model.create_of(action.owner)
            thing_id = _new_thing(state, create.id, tags).id

    if thing_id is not None:
        thing = state.things[thing_id]
        thing.tags |= tags
        tags = frozenset(thing.tags)
        thing.location = action_id
        for rid in sorted(thing.tags):
            _move_carrier(state, rid, action.owner)

    flows = [f.dst for f in model.out_flows(action_id)]
    triggers = [t.dst for t in model.out_triggers(action_id)]
    if model.is_decision_point(action_id):
        pick = _choose(state, action_id)
        flows, triggers = ([pick], []) if pick in flows else ([], [pick])

    def route(dst: str, carried: Optional[str], is_signal: bool) -> None:
        if dst in region and dst not in visited:
            visited.add(dst)
            work.append((dst, carried, is_signal, tags))
        else:
            _add_mark(state, dst, carried, is_signal, tags)

    for dst in triggers:
        route(dst, None, True)
    if flows:
        # a thing cannot split; it follows the first flow in canonical order
        route(flows[0], thing_id, False)
    elif thing_id is not None:
        _rest(state, state.things[thing_id], action)


def _pickup(state: SimState, owner: str) -> Optional[str]:
    heads = [(state._park_order[buf[0]], a.id)
             for a in state.model.actions_of(owner)
             if a.storage and (buf := state.storage.get(a.id))]
    if not heads:
        return None
    _, action_id = min(heads)
    thing_id = state.storage[action_id].popleft()
    state.things[thing_id].parked_at = None
    return thing_id


def _rest(state: SimState, thing: Thing, action) -> None:
    thing.location = action.id
    if action.storage:
        thing.parked_at = action.id
        state.storage.setdefault(action.id, deque()).append(thing.id)
        state._park_order[thing.id] = next(state._seq)
    elif action.kind in (ActionKind.RELEASE, ActionKind.TRANSFER):
        state.diagnostics.append(warning(
            "STUCK_THING", f"thing {thing.id} halted at {action.id} with no continuation and no storage",
            action.id))


def _choose(state: SimState, action_id: str) -> str:
    picks = state.scenario.choices.get(action_id)
    if not picks:
        raise SimulationError([error("MISSING_CHOICE",
                                     f"scenario {state.scenario.id!r} has no choice for {action_id}",
                                     action_id)])
    n = state._choice_cursor.get(action_id, 0)
    state._choice_cursor[action_id] = n + 1
    return picks[min(n, len(picks) - 1)]


def _move_carrier(state: SimState, record_id: str, owner: str) -> None:
    rec = state.carried.get(record_id)
    if rec is not None and rec.carrier != owner:
        state.carried[record_id] = replace(rec, carrier=owner)
        state.carrier_history[record_id].append(owner)


# ---------------------------------------------------------------------------
# running and queries


def run(state: SimState, budget: int = DEFAULT_BUDGET) -> RunResult:
    """Step until Done or until ``budget`` steps have fired (BUDGET error)."""
    fired = 0
    completed = False
    while True:
        try:
            outcome = step(state)
        except SimulationError as exc:
            state.diagnostics.extend(exc.diagnostics)
            break
        if isinstance(outcome, Done):
            completed = True
            break
        fired += 1
        if fired >= budget:
            if enabled_events(state):
                state.diagnostics.append(error(
                    "BUDGET", f"step budget of {budget} exhausted; a repeat loop may be livelocked"))
                break
            continue
    return result(state, completed)


def result(state: SimState, completed: bool = True) -> RunResult:
    return RunResult(tuple(state.trace), dict(state.modes), dict(state.registry),
                     tuple(state.footprints), dict(state.carried), tuple(state.diagnostics),
                     completed)


def _known_region(state: SimState, region_id: str) -> None:
    if region_id not in state.modes:
        raise SimulationError([error("UNKNOWN_REGION", f"no event has region {region_id!r}")])


def mode_of(state: SimState, region_id: str) -> Mode:
    _known_region(state, region_id)
    return state.modes[region_id]


def is_negative(state: SimState, region_id: str) -> bool:
    """True while no occurrence over the region has happened in this run."""
    _known_region(state, region_id)
    return region_id not in state.registry


def _entry_of(model: StaticModel, thimac_id: str) -> Optional[str]:
    create = model.create_of(thimac_id)
    if create is not None and not create.synthesized:
        return create.id
    targets = {f.dst for f in model.flows}
    for a in model.actions_of(thimac_id):
        if a.kind is ActionKind.TRANSFER and a.id not in targets:
            return a.id
    return create.id if create is not None else None


def carry(state: SimState, record_id: str, carrier_thimac_id: str) -> InformationRecord:
    """Load a subsisting footprint onto a carrier thimac.

    A thing tagged with the record id appears at the carrier's entry, so
    later steps propagate it; the subsisting original stays in the footprints.
    """
    original = next((r for r in state.footprints if r.id == record_id), None)
    if original is None:
        raise SimulationError([error("UNKNOWN_RECORD", f"no footprint {record_id!r}")])
    if record_id in state.carried:
        raise SimulationError([error("ALREADY_CARRIED", f"{record_id} is already carried")])
    if carrier_thimac_id not in state.model.thimac_by_id:
        raise SimulationError([error("UNKNOWN_CARRIER", f"no thimac {carrier_thimac_id!r}")])
    entry = _entry_of(state.model, carrier_thimac_id)
    if entry is None:
        raise SimulationError([error("UNKNOWN_CARRIER", f"{carrier_thimac_id} has no create or entry transfer")])
    record = replace(original, carrier=carrier_thimac_id)
    state.carried[record_id] = record
    state.carrier_history[record_id] = [carrier_thimac_id]
    thing = _new_thing(state, entry, {record_id})
    _add_mark(state, entry, thing.id, signal=False, tags={record_id})
    state.finished = False
    return record
