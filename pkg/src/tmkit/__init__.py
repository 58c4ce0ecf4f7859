"""Thinging machine (TM) conceptual models: metamodel, ``.tm`` language,
events and chronology, simulation and DOT export."""

__version__ = "0.1.0"

from .diagnostics import Diagnostic, DiagnosticError, Severity, SourceSpan
from .dsl import ModelDocument, parse, parse_file, parse_with_diagnostics, serialize
from .events import (Chronology, Coverage, EventDef, Region, coverage, derive_chronology,
                     extract_region)
from .export import DotDocument, DotKind, export_chronology, export_dynamic, export_static
from .metamodel import (Action, ActionKind, Flow, ModelBuilder, StaticModel, Thimac, Trigger,
                        expand_implicit_creates, flow_legal, validate_static)
from .sim import Mode, Scenario, carry, format_trace, init, is_negative, mode_of, run, step

__all__ = [
    "Action", "ActionKind", "Chronology", "Coverage", "Diagnostic", "DiagnosticError",
    "DotDocument", "DotKind", "EventDef", "Flow", "Mode", "ModelBuilder", "ModelDocument",
    "Region", "Scenario", "Severity", "SourceSpan", "StaticModel", "Thimac", "Trigger",
    "carry", "coverage", "derive_chronology", "expand_implicit_creates", "export_chronology",
    "export_dynamic", "export_static", "extract_region", "flow_legal", "format_trace", "init",
    "is_negative",
    "mode_of", "parse", "parse_file", "parse_with_diagnostics", "run", "serialize", "step",
    "validate_static",
]
