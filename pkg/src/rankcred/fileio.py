"""CSV ingestion and emission of datasets and result artifacts."""

from __future__ import annotations

import csv
import io
import math
import re
from importlib import resources
from pathlib import Path

import numpy as np

from .domain import Dataset, DomainError, Entity

# pinned output format: 12 significant digits, '.' decimal, no locale
FMT = "%.12g"


def fmt(v: float) -> str:
    return FMT % float(v)


def _parse_float(text: str, row: int, column: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DomainError(f"row {row}, column {column!r}: {text!r} is not a number")
    if not math.isfinite(v):
        raise DomainError(f"row {row}, column {column!r}: non-finite value {text!r}")
    return v


def parse_dataset(source) -> Dataset:
    """Read a dataset from a CSV path or CSV text.

    Required columns: id, y, d.  Optional: x1..xp (consecutive), gold.
    Column order is free.  Row numbers in error messages count the header
    as row 1.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and "," not in source):
        text = Path(source).read_text()
    else:
        text = source
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise DomainError("empty input: no CSV header found")
    fields = [f.strip() for f in reader.fieldnames]
    for required in ("id", "y", "d"):
        if required not in fields:
            raise DomainError(f"missing required column {required!r} (found {fields})")
    x_cols = sorted(
        (f for f in fields if re.fullmatch(r"x\d+", f)),
        key=lambda f: int(f[1:]),
    )
    if x_cols != [f"x{k}" for k in range(1, len(x_cols) + 1)]:
        raise DomainError(f"covariate columns must be consecutive x1..xp, found {x_cols}")
    has_gold_col = "gold" in fields

    entities = []
    for rownum, rec in enumerate(reader, start=2):
        rec = {(k.strip() if k else k): (v.strip() if v else v) for k, v in rec.items()}
        ident = rec.get("id") or ""
        if not ident:
            raise DomainError(f"row {rownum}, column 'id': empty id")
        y = _parse_float(rec["y"], rownum, "y")
        d = _parse_float(rec["d"], rownum, "d")
        if d <= 0:
            raise DomainError(f"row {rownum}, column 'd': d={d} must be > 0")
        x = tuple(_parse_float(rec[c], rownum, c) for c in x_cols)
        gold = None
        if has_gold_col and rec.get("gold"):
            gold = _parse_float(rec["gold"], rownum, "gold")
        entities.append(Entity(id=ident, y=y, d=d, x=x, gold=gold))
    if not entities:
        raise DomainError("no data rows found")
    return Dataset(entities=tuple(entities))


def emit_dataset(ds: Dataset) -> str:
    """Inverse of parse_dataset (round-trips through the pinned format)."""
    cols = ["id", "y", "d"] + [f"x{k}" for k in range(1, ds.p + 1)]
    if ds.has_gold:
        cols.append("gold")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(cols)
    for e in ds.entities:
        row = [e.id, fmt(e.y), fmt(e.d)] + [fmt(v) for v in e.x]
        if ds.has_gold:
            row.append(fmt(e.gold))
        writer.writerow(row)
    return out.getvalue()


def baseball_dataset() -> Dataset:
    """The bundled 18-player batting-average fixture."""
    text = resources.files("rankcred.data").joinpath("baseball.csv").read_text()
    return parse_dataset(text)


def write_matrix_csv(path, probs: np.ndarray, ids: list[str]) -> None:
    """m x m credible matrix; rows are ranks 1..m, columns the entities."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["rank"] + ids)
        for k in range(probs.shape[0]):
            writer.writerow([k + 1] + [fmt(v) for v in probs[k]])


def write_rows_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
