"""CSV ingestion and serialization of ObservedMatrix.

Format: one header row of variable names, one row per individual, missing
cells empty or ``NA``.  Kinds are auto-detected (integer valued with at most
ten distinct values => ordinal) unless given explicitly or by a
``<stem>.kinds.json`` sidecar written next to the CSV.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .types import CONTINUOUS, ORDINAL, DataError, ObservedMatrix

MISSING_TOKENS = {"", "NA", "na", "NaN", "nan"}
MAX_ORDINAL_LEVELS = 10


def detect_kind(col: np.ndarray) -> str:
    obs = col[~np.isnan(col)]
    if obs.size and np.all(obs == np.round(obs)) and np.unique(obs).size <= MAX_ORDINAL_LEVELS:
        return ORDINAL
    return CONTINUOUS


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".kinds.json")


def load_kinds(path) -> dict:
    with open(path) as fh:
        kinds = json.load(fh)
    if not isinstance(kinds, dict):
        raise DataError(f"{path}: kinds file must map variable names to kinds")
    return {str(k): str(v) for k, v in kinds.items()}


def read_csv(path, kinds=None) -> ObservedMatrix:
    """Parse a data CSV.

    Parameters
    ----------
    kinds : dict or str path, optional
        Mapping of column name to ``"ordinal"``/``"continuous"``; unlisted
        columns are auto-detected.  When omitted, a sidecar kinds file is
        used if present.
    """
    path = Path(path)
    if kinds is None and sidecar_path(path).exists():
        kinds = load_kinds(sidecar_path(path))
    elif isinstance(kinds, (str, Path)):
        kinds = load_kinds(kinds)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        rows = []
        for r, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: row {r} has {len(row)} cells, expected {len(header)}")
            vals = []
            for c, cell in enumerate(row):
                cell = cell.strip()
                if cell in MISSING_TOKENS:
                    vals.append(np.nan)
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}: row {r}, column {header[c]!r}: cannot parse {cell!r}"
                    ) from None
            rows.append(vals)
    values = np.array(rows, dtype=float).reshape(len(rows), len(header))
    kinds = kinds or {}
    unknown = set(kinds) - set(header)
    if unknown:
        raise DataError(f"kinds given for unknown columns: {sorted(unknown)}")
    col_kinds = [kinds.get(h) or detect_kind(values[:, j]) for j, h in enumerate(header)]
    return ObservedMatrix(values, tuple(col_kinds), tuple(header))


def _format(v: float, kind: str) -> str:
    if np.isnan(v):
        return "NA"
    if kind == ORDINAL:
        return str(int(v))
    return repr(float(v))


def write_csv(data: ObservedMatrix, path, sidecar: bool = True) -> Path:
    """Write data (and by default its kinds sidecar) so that read_csv round-trips it."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(data.var_names)
        for row in data.values:
            w.writerow([_format(v, k) for v, k in zip(row, data.var_kinds)])
    if sidecar:
        with open(sidecar_path(path), "w") as fh:
            json.dump(dict(zip(data.var_names, data.var_kinds)), fh, indent=1)
    return path
