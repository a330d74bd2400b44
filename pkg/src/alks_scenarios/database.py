"""Scenario database files: one JSON object per line, UTF-8.

Each line carries a ``kind`` key (``brake``, ``cutin`` or ``swerve``) followed
by the fields of the matching scenario class.  Floats are written with
``repr`` precision, so a write/read cycle is lossless.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, List

from .extraction import SCENARIO_TYPES, ScenarioRecord


def scenario_from_dict(data: dict) -> ScenarioRecord:
    data = dict(data)
    kind = data.pop("kind", None)
    if kind not in SCENARIO_TYPES:
        raise ValueError(f"unknown scenario kind {kind!r}")
    data["lane_widths"] = tuple(data["lane_widths"])
    return SCENARIO_TYPES[kind](**data)


def dumps_lines(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def atomic_write_text(path, text: str):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_database(scenarios: Iterable[ScenarioRecord], path) -> Path:
    atomic_write_text(path, dumps_lines(s.to_dict() for s in scenarios))
    return Path(path)


def read_database(path) -> List[ScenarioRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(scenario_from_dict(json.loads(line)))
            except (ValueError, TypeError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad scenario record: {exc}") from None
    return out
