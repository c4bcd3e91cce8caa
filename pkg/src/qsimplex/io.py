"""Instance ingestion: LP JSON format and a fixed-MPS subset reader.

JSON layout::

    {"m": 2, "n": 3,
     "A": {"cols": [[[0, 1.0]], [[1, 2.0]], [[0, 1.0], [1, 1.0]]]},
     "b": [1.0, 2.0],
     "c": [0.0, -1.0, 0.5]}

``A.cols[j]`` lists ``[row, value]`` pairs for column j.  The MPS reader
accepts the NAME/ROWS/COLUMNS/RHS/ENDATA sections with equality rows and
one objective row only (whitespace-delimited fields).
"""

from __future__ import annotations

import json

import numpy as np
import scipy.sparse as sp

from .lp import LpInstance


class InstanceFormatError(ValueError):
    """Malformed instance file; carries a human-readable location."""


def instance_to_dict(instance: LpInstance) -> dict:
    A = instance.A
    cols = []
    for j in range(instance.n):
        start, end = A.indptr[j], A.indptr[j + 1]
        cols.append([[int(i), float(v)] for i, v in zip(A.indices[start:end], A.data[start:end])])
    return {
        "m": instance.m,
        "n": instance.n,
        "A": {"cols": cols},
        "b": [float(x) for x in instance.b],
        "c": [float(x) for x in instance.c],
    }


def instance_from_dict(doc: dict) -> LpInstance:
    try:
        m, n = int(doc["m"]), int(doc["n"])
        cols = doc["A"]["cols"]
        b, c = doc["b"], doc["c"]
    except (KeyError, TypeError) as exc:
        raise InstanceFormatError(f"missing or malformed field: {exc}") from exc
    if len(cols) != n:
        raise InstanceFormatError(f"A.cols has {len(cols)} columns, expected n={n}")
    rows_idx, cols_idx, vals = [], [], []
    for j, entries in enumerate(cols):
        for entry in entries:
            i, v = int(entry[0]), float(entry[1])
            if not 0 <= i < m:
                raise InstanceFormatError(f"row index {i} out of range in column {j}")
            rows_idx.append(i)
            cols_idx.append(j)
            vals.append(v)
    A = sp.csc_matrix((vals, (rows_idx, cols_idx)), shape=(m, n))
    return LpInstance(A, np.asarray(b, dtype=float), np.asarray(c, dtype=float))


def write_lp_json(instance: LpInstance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance), fh, indent=1)
        fh.write("\n")


def read_lp_json(path) -> LpInstance:
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(doc)


def read_mps(path) -> LpInstance:
    """Fixed-MPS subset: NAME / ROWS (N + E only) / COLUMNS / RHS / ENDATA."""
    with open(path) as fh:
        lines = fh.readlines()

    section = None
    objective_row = None
    row_order: list[str] = []
    row_index: dict[str, int] = {}
    col_order: list[str] = []
    col_entries: dict[str, list[tuple[str, float]]] = {}
    obj_coeffs: dict[str, float] = {}
    rhs: dict[str, float] = {}

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        if not line[0].isspace():
            head = line.split()[0].upper()
            if head in ("NAME", "ROWS", "COLUMNS", "RHS", "ENDATA"):
                section = head
                if head == "ENDATA":
                    break
                continue
            raise InstanceFormatError(f"line {lineno}: unsupported section {head!r} "
                                      "(reader handles NAME/ROWS/COLUMNS/RHS/ENDATA)")
        fields = line.split()
        if section == "ROWS":
            kind, name = fields[0].upper(), fields[1]
            if kind == "N":
                if objective_row is not None:
                    raise InstanceFormatError(f"line {lineno}: multiple objective rows")
                objective_row = name
            elif kind == "E":
                row_index[name] = len(row_order)
                row_order.append(name)
            else:
                raise InstanceFormatError(f"line {lineno}: row type {kind!r} unsupported "
                                          "(equality rows only)")
        elif section == "COLUMNS":
            col, pairs = fields[0], fields[1:]
            if len(pairs) % 2:
                raise InstanceFormatError(f"line {lineno}: odd row/value field count")
            if col not in col_entries:
                col_entries[col] = []
                col_order.append(col)
            for row_name, value in zip(pairs[::2], pairs[1::2]):
                v = float(value)
                if row_name == objective_row:
                    obj_coeffs[col] = obj_coeffs.get(col, 0.0) + v
                elif row_name in row_index:
                    col_entries[col].append((row_name, v))
                else:
                    raise InstanceFormatError(f"line {lineno}: unknown row {row_name!r}")
        elif section == "RHS":
            pairs = fields[1:]
            if len(pairs) % 2:
                raise InstanceFormatError(f"line {lineno}: odd row/value field count")
            for row_name, value in zip(pairs[::2], pairs[1::2]):
                if row_name not in row_index:
                    raise InstanceFormatError(f"line {lineno}: unknown RHS row {row_name!r}")
                rhs[row_name] = float(value)
        elif section in ("NAME", None):
            continue

    if objective_row is None:
        raise InstanceFormatError("no objective (N) row found")
    m, n = len(row_order), len(col_order)
    if m == 0 or n == 0:
        raise InstanceFormatError("empty ROWS or COLUMNS section")
    rows_idx, cols_idx, vals = [], [], []
    for j, col in enumerate(col_order):
        for row_name, v in col_entries[col]:
            rows_idx.append(row_index[row_name])
            cols_idx.append(j)
            vals.append(v)
    A = sp.csc_matrix((vals, (rows_idx, cols_idx)), shape=(m, n))
    b = np.array([rhs.get(name, 0.0) for name in row_order])
    c = np.array([obj_coeffs.get(col, 0.0) for col in col_order])
    return LpInstance(A, b, c)


def read_instance(path) -> LpInstance:
    """Dispatch on file extension: .mps -> MPS reader, else LP JSON."""
    if str(path).lower().endswith(".mps"):
        return read_mps(path)
    return read_lp_json(path)
