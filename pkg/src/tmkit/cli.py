"""``tm`` command-line entry point.

Exit codes: 0 on success, 1 when error diagnostics were reported, 2 for
usage and I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO

from . import __version__
from .diagnostics import Diagnostic, DiagnosticError, has_errors
from .dsl import ModelDocument, parse_with_diagnostics
from .events import coverage, derive_chronology
from .export import export_chronology, export_dynamic, export_static
from .metamodel import ActionKind
from .sim import DEFAULT_BUDGET, format_trace, init, is_negative, run

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_USAGE = 2


class _UsageError(Exception):
    pass


def _report(diags: Iterable[Diagnostic], doc: Optional[ModelDocument], err: TextIO) -> None:
    for d in diags:
        # runtime diagnostics only know their site; borrow the span from the document
        if d.span is None and doc is not None and d.site in doc.spans:
            d = d.with_span(doc.spans[d.site])
        print(d, file=err)


def _load(path: str, err: TextIO) -> tuple[Optional[ModelDocument], bool]:
    """Parse ``path``; returns (document or None, had_errors)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from exc
    doc, diags = parse_with_diagnostics(text, path)
    _report(diags, doc, err)
    return doc, doc is None or has_errors(diags)


def cmd_validate(args, out: TextIO, err: TextIO) -> int:
    doc, failed = _load(args.file, err)
    if failed:
        return EXIT_DIAGNOSTICS
    model = doc.model
    print(f"ok: {args.file}: {len(model.thimacs)} thimacs, {len(model.actions)} actions, "
          f"{len(doc.events)} events, {len(doc.scenarios)} scenarios", file=out)
    return EXIT_OK


def cmd_events(args, out: TextIO, err: TextIO) -> int:
    doc, failed = _load(args.file, err)
    if failed:
        return EXIT_DIAGNOSTICS
    for ev in doc.events:
        desc = f"  {ev.description}" if ev.description else ""
        n = len(ev.region.action_ids)
        print(f"{ev.id}  {n} action{'' if n == 1 else 's'}  region={ev.region.id}{desc}", file=out)
    cov = coverage(doc.model, doc.events)
    total = len(cov.covered) + len(cov.uncovered)
    print(f"coverage: {len(cov.covered)}/{total} actions ({cov.ratio * 100:.1f}%)", file=out)
    chron = derive_chronology(doc.model, doc.events)
    print("chronology:", file=out)
    for node in chron.nodes:
        fwd = chron.successors(node)
        rep = chron.successors(node, repeat=True)
        if fwd:
            print(f"  {node} -> {', '.join(fwd)}", file=out)
        if rep:
            print(f"  {node} -repeat-> {', '.join(rep)}", file=out)
    return EXIT_OK


def cmd_simulate(args, out: TextIO, err: TextIO) -> int:
    if args.budget < 1:
        raise _UsageError("--budget must be positive")
    doc, failed = _load(args.file, err)
    if failed:
        return EXIT_DIAGNOSTICS
    try:
        state = init(doc, args.scenario)
    except DiagnosticError as exc:
        _report(exc.diagnostics, doc, err)
        return EXIT_DIAGNOSTICS
    res = run(state, args.budget)
    _report(res.diagnostics, doc, err)
    trace = format_trace(res)
    if args.trace:
        try:
            Path(args.trace).write_text(trace, encoding="utf-8")
        except OSError as exc:
            raise _UsageError(f"cannot write {args.trace}: {exc}") from exc
    else:
        out.write(trace)
    print(f"occurrences: {len(res.trace)}", file=out)
    print(f"registered regions: {len(res.registry)}/{len(doc.events)}", file=out)
    print(f"footprints: {len(res.footprints)}", file=out)
    fired = Counter(o.event_id for o in res.trace)
    for ev in doc.events:
        status = "negative" if is_negative(state, ev.region.id) else f"fired x{fired[ev.id]}"
        print(f"  {ev.id}: {status}", file=out)
    return EXIT_DIAGNOSTICS if has_errors(res.diagnostics) else EXIT_OK


def cmd_export(args, out: TextIO, err: TextIO) -> int:
    doc, failed = _load(args.file, err)
    if failed:
        return EXIT_DIAGNOSTICS
    try:
        if args.kind == "static":
            dot = export_static(doc.model)
        elif args.kind == "dynamic":
            dot = export_dynamic(doc.model, doc.events)
        else:
            labels = {e.id: e.description for e in doc.events if e.description}
            dot = export_chronology(derive_chronology(doc.model, doc.events), doc.name, labels)
    except DiagnosticError as exc:
        _report(exc.diagnostics, doc, err)
        return EXIT_DIAGNOSTICS
    if args.out == "-":
        out.write(dot.text)
        return EXIT_OK
    target = Path(args.out) if args.out else Path(dot.file_name(doc.name))
    try:
        dot.write(target)
    except OSError as exc:
        raise _UsageError(f"cannot write {target}: {exc}") from exc
    print(f"wrote {target}", file=out)
    return EXIT_OK


def cmd_stats(args, out: TextIO, err: TextIO) -> int:
    doc, failed = _load(args.file, err)
    if failed:
        return EXIT_DIAGNOSTICS
    model = doc.model
    kinds = Counter(a.kind for a in model.actions)
    rows = [
        ("thimacs", len(model.thimacs)),
        ("actions", len(model.actions)),
        *((f"  {k.value}", kinds[k]) for k in ActionKind),
        ("flows", len(model.flows)),
        ("triggers", len(model.triggers)),
        ("storages", sum(1 for a in model.actions if a.storage)),
        ("implicit creates", sum(1 for t in model.thimacs if t.implicit_create)),
        ("events", len(doc.events)),
        ("scenarios", len(doc.scenarios)),
    ]
    for name, value in rows:
        print(f"{name}: {value}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tm", description="Thinging machine model toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("validate", help="parse and check a .tm file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("events", help="list events, coverage and chronology")
    p.add_argument("file")
    p.set_defaults(func=cmd_events)

    p = sub.add_parser("simulate", help="run a scenario and print its trace")
    p.add_argument("file")
    p.add_argument("--scenario", default=None, help="scenario id (default: no injections)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--trace", default=None, help="write the trace here instead of stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", help="write a DOT document")
    p.add_argument("file")
    p.add_argument("--kind", choices=("static", "dynamic", "chronology"), default="static")
    p.add_argument("--out", default=None, help="output path, '-' for stdout "
                   "(default: <model>.<kind>.dot)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("stats", help="print element counts")
    p.add_argument("file")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help/--version and 2 for bad usage
        return int(exc.code or 0)
    try:
        return args.func(args, out, err)
    except _UsageError as exc:
        print(f"tm: error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
