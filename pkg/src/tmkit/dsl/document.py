from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from ..diagnostics import SourceSpan
from ..events import EventDef
from ..metamodel import StaticModel
from ..sim.scenario import Scenario


@dataclass(frozen=True)
class ModelDocument:
    """A parsed ``.tm`` file: the static model plus its events and scenarios.

    Spans are excluded from equality, so a re-parsed document compares equal
    to the original when the elements match.
    """

    model: StaticModel
    events: tuple[EventDef, ...] = ()
    scenarios: tuple[Scenario, ...] = ()
    spans: Mapping[str, SourceSpan] = field(default_factory=dict, compare=False, hash=False)

    @property
    def name(self) -> str:
        return self.model.root

    def event(self, event_id: str) -> EventDef:
        for e in self.events:
            if e.id == event_id:
                return e
        raise KeyError(event_id)

    def scenario(self, scenario_id: str) -> Optional[Scenario]:
        for s in self.scenarios:
            if s.id == scenario_id:
                return s
        return None
