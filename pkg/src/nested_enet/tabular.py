"""Delimited matrix files, label files and JSON helpers used by the CLI.

Matrix layout: the first row holds feature ids (its first cell names the
sample-id column), every following row is a sample id followed by numeric
cells. Tab or comma separators are detected from the header line.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class Table:
    sample_ids: tuple[str, ...]
    feature_ids: tuple[str, ...]
    values: np.ndarray


def _delimiter(header: str, path) -> str:
    if "\t" in header:
        return "\t"
    if "," in header:
        return ","
    raise DataError(f"{path}:1: cannot detect delimiter (expected tab or comma)")


def _parse_float(cell: str, path, line: int, col: int) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise DataError(f"{path}:{line}:{col}: not a number: {cell!r}") from None
    if not math.isfinite(v):
        raise DataError(f"{path}:{line}:{col}: non-finite value {cell!r}")
    return v


def _duplicates(items) -> list[str]:
    seen: set[str] = set()
    return sorted({x for x in items if x in seen or seen.add(x)})


def read_matrix(path: str | Path) -> Table:
    """Read a sample x feature matrix; errors name the offending line and column."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DataError(f"{path}: empty file")
    delim = _delimiter(lines[0], path)
    rows = list(csv.reader(lines, delimiter=delim))
    header = [c.strip() for c in rows[0]]
    features = header[1:]
    if not features:
        raise DataError(f"{path}:1: no feature columns")
    dups = _duplicates(features)
    if dups:
        raise DataError(f"{path}:1: duplicated feature ids: {', '.join(dups)}")
    sample_ids, values = [], []
    for line, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"{path}:{line}: expected {len(header)} cells, found {len(row)}")
        sample_ids.append(row[0].strip())
        values.append([_parse_float(c.strip(), path, line, col) for col, c in enumerate(row[1:], start=2)])
    if not values:
        raise DataError(f"{path}: no samples")
    dups = _duplicates(sample_ids)
    if dups:
        raise DataError(f"{path}: duplicated sample ids: {', '.join(dups)}")
    return Table(tuple(sample_ids), tuple(features), np.array(values, dtype=np.float64))


def read_labels(path: str | Path, sample_ids, classification: bool) -> np.ndarray:
    """Two-column file (sample id, response), header optional; matched by id."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    if not lines:
        raise DataError(f"{path}: empty file")
    delim = _delimiter(lines[0], path)
    found: dict[str, float] = {}
    for line, row in enumerate(csv.reader(lines, delimiter=delim), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise DataError(f"{path}:{line}: expected 2 cells, found {len(row)}")
        sid, cell = row[0].strip(), row[1].strip()
        if line == 1:
            try:
                float(cell)
            except ValueError:
                continue  # header
        v = _parse_float(cell, path, line, 2)
        if classification and v not in (1.0, -1.0):
            raise DataError(f"{path}:{line}:2: label must be +1 or -1, got {cell!r}")
        if sid in found:
            raise DataError(f"{path}:{line}: duplicated sample id {sid!r}")
        found[sid] = v
    missing = [s for s in sample_ids if s not in found]
    if missing:
        raise DataError(f"{path}: no label for samples: {', '.join(missing[:10])}")
    return np.array([found[s] for s in sample_ids])


def split_label_column(table: Table, column: str, path, classification: bool) -> tuple[Table, np.ndarray]:
    """Remove the named column from ``table`` and return it as responses."""
    if column not in table.feature_ids:
        raise DataError(f"{path}: no column named {column!r}")
    j = table.feature_ids.index(column)
    y = table.values[:, j].copy()
    if classification:
        bad = np.flatnonzero(np.abs(y) != 1.0)
        if bad.size:
            i = int(bad[0])
            raise DataError(f"{path}:{i + 2}:{j + 2}: label must be +1 or -1, got {y[i]!r}")
    keep = [k for k in range(len(table.feature_ids)) if k != j]
    rest = Table(table.sample_ids, tuple(table.feature_ids[k] for k in keep), table.values[:, keep])
    return rest, y


def fmt(v: float) -> str:
    return repr(float(v))


def write_matrix(path: str | Path, sample_ids, feature_ids, values, corner: str = "sample") -> None:
    rows = ["\t".join([corner, *feature_ids])]
    for sid, row in zip(sample_ids, np.asarray(values)):
        rows.append("\t".join([sid, *(fmt(v) for v in row)]))
    Path(path).write_text("\n".join(rows) + "\n")


def write_labels(path: str | Path, sample_ids, values, header: str = "response") -> None:
    rows = ["\t".join(["sample", header])]
    rows += [f"{sid}\t{fmt(v)}" for sid, v in zip(sample_ids, values)]
    Path(path).write_text("\n".join(rows) + "\n")


def dump_json(path: str | Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n")
