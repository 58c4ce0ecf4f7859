"""Simulation of the dynamic model: event firing, existence/subsistence
modes, first-occurrence registry and information footprints."""

from .engine import (
    DEFAULT_BUDGET, Done, Fired, InformationRecord, Mark, Mode, Occurrence, RunResult,
    SimState, SimulationError, Thing, carry, enabled_events, init, is_negative, mode_of,
    result, run, step,
)
from .scenario import Scenario, check_scenario
from .trace import format_trace

__all__ = [
    "DEFAULT_BUDGET", "Done", "Fired", "InformationRecord", "Mark", "Mode", "Occurrence",
    "RunResult", "Scenario", "SimState", "SimulationError", "Thing", "carry", "check_scenario",
    "enabled_events", "format_trace", "init", "is_negative", "mode_of", "result", "run", "step",
]
