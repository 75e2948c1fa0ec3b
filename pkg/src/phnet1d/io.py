"""Plain-text exchange formats: coordinate triplets and simulation CSV."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import scipy.sparse as sp

__all__ = ["write_triplets", "read_triplets", "write_result_csv",
           "read_result_csv", "CSV_COLUMNS"]

CSV_COLUMNS = ("t", "H", "dHdt", "power", "u1", "u2", "y1", "y2")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_triplets(path, matrix) -> int:
    """Write the nonzeros of `matrix` as ``row col value`` lines (0-based).

    The first line is a ``# shape rows cols`` comment so that trailing
    all-zero rows or columns survive the round trip. Returns the number of
    entries written.
    """
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write(f"# shape {coo.shape[0]} {coo.shape[1]}\n")
        for k in order:
            if coo.data[k] != 0:
                fh.write(f"{coo.row[k]} {coo.col[k]} {_fmt(coo.data[k])}\n")
    return int(np.count_nonzero(coo.data))


def read_triplets(path, shape=None) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if shape is None and parts[:1] == ["shape"]:
                    shape = (int(parts[1]), int(parts[2]))
                continue
            r, c, v = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    return sp.csr_matrix((vals, (rows, cols)), shape=shape)


def write_result_csv(path, result) -> None:
    """Write a simulation result with header ``t,H,dHdt,power,u1,u2,y1,y2``."""
    cols = np.column_stack([result.times, result.hamiltonian, result.dHdt,
                            result.power, result.inputs, result.outputs])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in cols:
            writer.writerow([_fmt(v) for v in row])


def read_result_csv(path) -> dict:
    """Read a result CSV into a dict of column arrays."""
    data = np.genfromtxt(Path(path), delimiter=",", names=True)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}
