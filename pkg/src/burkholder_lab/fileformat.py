"""JSON martingale files.

::

    {"version": 1,
     "tree": {"branch_prob": "1", "value": "0",
              "children": [{"branch_prob": "0.5", "value": "1", "children": []},
                           {"branch_prob": "0.5", "value": "-1", "children": []}]}}

Numbers are decimal strings with 17 significant digits, which round-trips
every double exactly. Sibling probabilities must sum to 1 within 1e-9, all
leaves must share one depth and the root value must be 0.
"""

from __future__ import annotations

import json
from pathlib import Path

from .tree import AdaptedProcess, TreeError, from_nested, to_nested

FORMAT_VERSION = 1
PROB_TOL = 1e-9


class FileFormatError(ValueError):
    pass


def martingale_to_dict(proc: AdaptedProcess) -> dict:
    return {"version": FORMAT_VERSION, "tree": to_nested(proc)}


def martingale_from_dict(obj) -> AdaptedProcess:
    if not isinstance(obj, dict):
        raise FileFormatError("top level: expected an object")
    if obj.get("version") != FORMAT_VERSION:
        raise FileFormatError(f"version: expected {FORMAT_VERSION}, got {obj.get('version')!r}")
    if "tree" not in obj:
        raise FileFormatError("top level: missing field 'tree'")
    try:
        proc = from_nested(obj["tree"], prob_tol=PROB_TOL)
    except TreeError as exc:
        raise FileFormatError(str(exc)) from None
    if proc.values[0] != 0.0:
        raise FileFormatError(f"tree: root value must be 0, got {proc.values[0]!r}")
    return proc


def loads(text: str) -> AdaptedProcess:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return martingale_from_dict(obj)


def dumps(proc: AdaptedProcess) -> str:
    return json.dumps(martingale_to_dict(proc), indent=1)


def load(path) -> AdaptedProcess:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc.strerror}") from None
    try:
        return loads(text)
    except FileFormatError as exc:
        raise FileFormatError(f"{path}: {exc}") from None


def dump(proc: AdaptedProcess, path) -> None:
    Path(path).write_text(dumps(proc) + "\n")
