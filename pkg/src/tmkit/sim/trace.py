"""Line-oriented trace format used for golden files.

Each occurrence line ``tick=<n> event=<id> region=<id>`` is followed by the
footprint it registered, ``info=<id> event=<id> tick=<n> carrier=-``.  Carried
records are listed after all occurrences with their current carrier.
"""

from __future__ import annotations

from typing import Union

from .engine import RunResult, SimState, result


def format_trace(run: Union[RunResult, SimState]) -> str:
    if isinstance(run, SimState):
        run = result(run)
    footprints = {r.tick: r for r in run.footprints}
    lines = []
    for occ in run.trace:
        lines.append(f"tick={occ.end_tick} event={occ.event_id} region={occ.region_id}")
        rec = footprints[occ.end_tick]
        lines.append(_info_line(rec.id, rec.event_id, rec.tick, rec.carrier))
    for rid in sorted(run.carried, key=lambda r: int(r[1:])):
        rec = run.carried[rid]
        lines.append(_info_line(rec.id, rec.event_id, rec.tick, rec.carrier))
    return "".join(line + "\n" for line in lines)


def _info_line(rid: str, event_id: str, tick: int, carrier) -> str:
    return f"info={rid} event={event_id} tick={tick} carrier={carrier or '-'}"
