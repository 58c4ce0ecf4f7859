"""Bundled ``.tm`` fixture corpus."""

from __future__ import annotations

from pathlib import Path

FIXTURE_DIR = Path(__file__).resolve().parent

NAMES = ("smart_factory", "loan_broker", "cat_mat", "bulb_punchcard", "traffic")


def path(name: str) -> Path:
    """Path of a bundled fixture, with or without the ``.tm`` suffix."""
    stem = name[:-3] if name.endswith(".tm") else name
    if stem not in NAMES:
        raise KeyError(f"unknown fixture {name!r}")
    return FIXTURE_DIR / f"{stem}.tm"


def load(name: str):
    from ..dsl import parse_file
    return parse_file(path(name))
