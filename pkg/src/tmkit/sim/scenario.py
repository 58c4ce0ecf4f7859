from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..diagnostics import Diagnostic, error
from ..metamodel import ActionKind, StaticModel


@dataclass(frozen=True)
class Scenario:
    """Scenario control for a simulation run.

    ``choices`` maps a decision point (a process action with two or more
    successors) to the successor action ids taken on successive visits; the
    last entry repeats once the queue is exhausted.  ``injections`` are the
    transfer (or create) actions where external things enter, in order.
    """

    id: str
    choices: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    injections: tuple[str, ...] = ()


def check_scenario(model: StaticModel, scenario: Scenario, site: str | None = None) -> list[Diagnostic]:
    diags = []
    site = site or f"scenario:{scenario.id}"
    for point, picks in scenario.choices.items():
        if not model.is_decision_point(point):
            diags.append(error("CHOICE_ERROR",
                               f"{point} is not a process action with several successors", site))
            continue
        successors = set(model.successors(point))
        for pick in picks:
            if pick not in successors:
                diags.append(error("CHOICE_ERROR", f"{pick} is not a successor of {point}", site))
        if not picks:
            diags.append(error("CHOICE_ERROR", f"empty choice for {point}", site))
    for head in scenario.injections:
        action = model.action_by_id.get(head)
        if action is None:
            diags.append(error("REF_ERROR", f"injection {head!r} does not resolve", site))
        elif action.kind not in (ActionKind.TRANSFER, ActionKind.CREATE):
            diags.append(error("INJECT_ERROR",
                               f"things can only be injected at a transfer or create action, not {head}",
                               site))
    return diags
