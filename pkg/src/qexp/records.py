"""Tabular output schemas and their CSV / JSON / table encodings.

Every CSV column has a fixed type so that parsing and re-emitting a file
reproduces it byte for byte: floats are written with 17 significant
digits (which round-trips any double), words stay strings.
"""

from __future__ import annotations

import csv
import io
import json

SCHEMAS: dict[str, tuple[tuple[str, str], ...]] = {
    "base": (
        ("q0", "float"),
        ("q1", "float"),
        ("ell", "float"),
        ("r", "float"),
        ("right", "float"),
        ("greedy_switch", "float"),
        ("lazy_switch", "float"),
        ("strict", "bool"),
    ),
    "expansion": (("step", "int"), ("x", "float"), ("digit", "optint")),
    "stepfn": (("piece_index", "int"), ("left", "float"), ("right", "float"), ("value", "float")),
    "transfer": (
        ("n", "int"),
        ("l1_increment", "float"),
        ("breakpoint_count", "int"),
        ("mass_outside_support", "float"),
    ),
    "partition": (
        ("word", "str"),
        ("left", "float"),
        ("right", "float"),
        ("image_right", "float"),
        ("weight", "float"),
    ),
    "report": (
        ("statistic", "str"),
        ("q0", "float"),
        ("q1", "float"),
        ("depth", "int"),
        ("n_samples", "int"),
        ("seed", "int"),
        ("mean", "float"),
        ("stderr", "float"),
    ),
    "verify": (
        ("number", "int"),
        ("name", "str"),
        ("passed", "bool"),
        ("seconds", "float"),
        ("detail", "str"),
    ),
}


def _fmt(value, typ: str) -> str:
    if typ == "float":
        return "%.17g" % value
    if typ == "bool":
        return "true" if value else "false"
    if typ == "optint" and value is None:
        return ""
    if typ in ("int", "optint"):
        return str(int(value))
    return str(value)


def _parse(text: str, typ: str):
    if typ == "float":
        return float(text)
    if typ == "bool":
        if text not in ("true", "false"):
            raise ValueError(f"not a boolean: {text!r}")
        return text == "true"
    if typ == "optint":
        return None if text == "" else int(text)
    if typ == "int":
        return int(text)
    return text


def _columns(schema: str):
    return SCHEMAS[schema]


def to_csv(schema: str, rows: list[dict]) -> str:
    cols = _columns(schema)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([c for c, _ in cols])
    for row in rows:
        w.writerow([_fmt(row[c], t) for c, t in cols])
    return buf.getvalue()


def from_csv(schema: str, text: str) -> list[dict]:
    cols = _columns(schema)
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != [c for c, _ in cols]:
        raise ValueError(f"header {header} does not match schema {schema!r}")
    return [{c: _parse(v, t) for (c, t), v in zip(cols, line)} for line in reader if line]


def to_json(schema: str, rows: list[dict]) -> str:
    cols = _columns(schema)
    return json.dumps([{c: row[c] for c, _ in cols} for row in rows], indent=2) + "\n"


def from_json(schema: str, text: str) -> list[dict]:
    cols = _columns(schema)
    return [{c: row[c] for c, _ in cols} for row in json.loads(text)]


def to_table(schema: str, rows: list[dict]) -> str:
    """Aligned, rounded text for reading at a terminal (not meant to be parsed)."""
    cols = _columns(schema)

    def cell(v, t):
        if t == "float":
            return f"{v:.6g}"
        return _fmt(v, t)

    cells = [[c for c, _ in cols]] + [[cell(row[c], t) for c, t in cols] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(cols))]
    return "".join("  ".join(s.rjust(w) for s, w in zip(r, widths)).rstrip() + "\n" for r in cells)


def emit(schema: str, rows: list[dict], fmt: str = "csv") -> str:
    if fmt == "csv":
        return to_csv(schema, rows)
    if fmt == "json":
        return to_json(schema, rows)
    if fmt == "table":
        return to_table(schema, rows)
    raise ValueError(f"unknown format {fmt!r}")


def parse(schema: str, text: str, fmt: str = "csv") -> list[dict]:
    if fmt == "csv":
        return from_csv(schema, text)
    if fmt == "json":
        return from_json(schema, text)
    raise ValueError(f"format {fmt!r} cannot be parsed")
