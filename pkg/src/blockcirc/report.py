"""CSV / JSON writers shared by the command line tools."""

from __future__ import annotations

import csv
import io
import json
import os
from fractions import Fraction
from pathlib import Path

import numpy as np

OUT_ENV = "BLOCKCIRC_OUT"


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def output_dir(arg: str | None) -> Path | None:
    d = arg or os.environ.get(OUT_ENV)
    return Path(d) if d else None


def write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def emit(name: str, header, rows, manifest: dict, out: str | None, fmt: str, stream) -> list[Path]:
    """Write a table plus its manifest to ``out`` (or stdout when no directory is set)."""
    rows = [list(r) for r in rows]
    if fmt == "json":
        body = json_text({"manifest": manifest, "columns": list(header),
                          "rows": [[_jsonable(v) for v in r] for r in rows]})
    else:
        body = csv_text(header, rows)
    d = output_dir(out)
    if d is None:
        stream.write(body)
        return []
    table = d / f"{name}.{fmt}"
    man = d / f"{name}.manifest.json"
    write_text(table, body)
    write_text(man, json_text(manifest))
    return [table, man]
