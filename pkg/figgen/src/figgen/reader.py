"""Parser for the simulator's CSV contract.

Two layouts are understood:

- matrix: optional '#'-comment provenance block, then a header row whose
  first cell is "rows\\cols" (e.g. "t\\omega_d" or "Omega\\omega_d") and
  whose remaining cells are column-axis values; each body row starts with
  the row-axis value.
- columns: provenance block, then a plain header ("t,N,Sz" or
  "omega_d,number,...") and numeric rows.

NaN cells (flagged sweep failures) are kept as NaN.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class MalformedCSV(Exception):
    """Input does not follow the CSV contract."""


class MissingColumns(Exception):
    """A requested column is absent."""


@dataclass
class ParsedCSV:
    layout: str  # "matrix" | "columns"
    provenance: dict = field(default_factory=dict)
    # matrix layout
    rows_label: str = None
    cols_label: str = None
    row_values: np.ndarray = None
    col_values: np.ndarray = None
    data: np.ndarray = None
    # columns layout
    columns: list = None

    def column(self, name: str) -> np.ndarray:
        if self.layout != "columns":
            raise MissingColumns(f"matrix layout has no named column {name!r}")
        if name not in self.columns:
            raise MissingColumns(f"column {name!r} not in {self.columns}")
        return self.data[:, self.columns.index(name)]


def _parse_float(token: str, context: str) -> float:
    token = token.strip()
    if token.lower() in ("nan", ""):
        return float("nan")
    try:
        return float(token)
    except ValueError as e:
        raise MalformedCSV(f"non-numeric value {token!r} in {context}") from e


def parse_csv(path) -> ParsedCSV:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = f.read()
    except OSError as e:
        raise MalformedCSV(f"cannot read {path}: {e}") from e

    provenance = {}
    lines = []
    for line in raw.splitlines():
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if "=" in body:
                key, _, value = body.partition("=")
                provenance[key.strip()] = value.strip()
            continue
        if line.strip():
            lines.append(line)
    if len(lines) < 2:
        raise MalformedCSV(f"{path}: no data rows")

    header = [c.strip() for c in lines[0].split(",")]
    if len(header) < 2:
        raise MalformedCSV(f"{path}: header has fewer than two columns")

    n_cols = len(header)
    body = []
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != n_cols:
            raise MalformedCSV(
                f"{path}: row {i} has {len(cells)} cells, expected {n_cols}"
            )
        body.append([_parse_float(c, f"{path}: row {i}") for c in cells])
    table = np.asarray(body, dtype=float)

    if "\\" in header[0]:
        rows_label, _, cols_label = header[0].partition("\\")
        try:
            col_values = np.array([float(c) for c in header[1:]])
        except ValueError as e:
            raise MalformedCSV(f"{path}: matrix header values not numeric") from e
        return ParsedCSV(
            layout="matrix",
            provenance=provenance,
            rows_label=rows_label,
            cols_label=cols_label,
            row_values=table[:, 0],
            col_values=col_values,
            data=table[:, 1:],
        )
    return ParsedCSV(
        layout="columns",
        provenance=provenance,
        columns=header,
        data=table,
    )
