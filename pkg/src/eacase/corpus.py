"""Loader for the executable fixture corpus shipped with the repository.

Fixtures live in the top-level ``corpus/`` directory: worked cases
(``.eac``), argument patterns (``.eap``), deliberately defective inputs
under ``defects/``, and ``expectations.json`` with frozen expected values
the test suite asserts against. Set ``EACASE_CORPUS`` to point somewhere
else (useful in packaged installs).
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from . import dsl, patterns
from .model import Case, CaseError
from .patterns import Pattern

CORPUS_ENV = "EACASE_CORPUS"


class UnknownFixture(CaseError):
    def __init__(self, name: str):
        super().__init__(f"no corpus fixture named {name!r}")
        self.name = name


def corpus_dir() -> Path:
    override = os.environ.get(CORPUS_ENV)
    if override:
        return Path(override)
    return Path(__file__).resolve().parents[2] / "corpus"


def fixture_path(name: str) -> Path:
    """Resolve a fixture name to its file; defects use a ``defects/`` prefix."""
    base = corpus_dir()
    for candidate in (
        base / f"{name}.eac",
        base / f"{name}.eap",
        base / "defects" / f"{name}.eac",
    ):
        if candidate.is_file():
            return candidate
    raise UnknownFixture(name)


def fixture_names() -> list[str]:
    base = corpus_dir()
    names = [p.stem for p in base.glob("*.eac")]
    names += [p.stem for p in base.glob("*.eap")]
    names += [p.stem for p in (base / "defects").glob("*.eac")]
    return sorted(names)


def fixture_source(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


def load_fixture(name: str) -> Case | Pattern:
    """Parse a fixture strictly; defect fixtures raise their parse error."""
    path = fixture_path(name)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".eap":
        return patterns.parse_pattern_strict(text, path.stem)
    return dsl.parse_strict(text, path.stem)


def expectations() -> dict:
    """The frozen expected values for the whole corpus."""
    path = corpus_dir() / "expectations.json"
    return json.loads(path.read_text(encoding="utf-8"))
