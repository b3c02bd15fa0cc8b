"""Row-dictionary elimination for large, sparse systems.

Rows are fed in index order and reduced against the pivots found so far
(lowest column first), then a final back-substitution pass produces the
reduced row echelon form.  Pure Python; fill-in is whatever the input gives.
"""

from __future__ import annotations

import numpy as np

from homcert.linalg.matrix import Matrix


def _axpy(row: dict, coef: int, pivot_row: dict, p: int) -> None:
    # row -= coef * pivot_row, in place
    for j, v in pivot_row.items():
        w = (row.get(j, 0) - coef * v) % p
        if w:
            row[j] = w
        else:
            row.pop(j, None)


def _forward(m: Matrix) -> dict[int, dict]:
    """Echelon rows keyed by pivot column (not back-substituted)."""
    p = m.p
    pivot_rows: dict[int, dict] = {}
    csr = m.csr
    indptr, indices, data = csr.indptr, csr.indices, csr.data
    for i in range(m.rows):
        lo, hi = indptr[i], indptr[i + 1]
        if lo == hi:
            continue
        row = {int(j): int(v) for j, v in zip(indices[lo:hi], data[lo:hi])}
        while row:
            lead = min(row)
            prow = pivot_rows.get(lead)
            if prow is None:
                break
            _axpy(row, row[lead], prow, p)
        if not row:
            continue
        lead = min(row)
        s = pow(row[lead], p - 2, p)
        if s != 1:
            row = {j: (v * s) % p for j, v in row.items()}
        pivot_rows[lead] = row
    return pivot_rows


def sparse_rank(m: Matrix) -> int:
    return len(_forward(m))


def sparse_rref(m: Matrix) -> tuple[list[dict], list[int]]:
    """Return ``(rows, pivots)`` with rows in reduced echelon form, sorted by pivot."""
    p = m.p
    pivot_rows = _forward(m)
    pivots = sorted(pivot_rows)
    # highest pivot first: every row used for elimination is already clean, so
    # it cannot reintroduce pivot columns and one sweep per row suffices
    for idx in range(len(pivots) - 1, -1, -1):
        lead = pivots[idx]
        row = pivot_rows[lead]
        for c in [k for k in row if k != lead and k in pivot_rows]:
            coef = row.get(c)
            if coef:
                _axpy(row, coef, pivot_rows[c], p)
    return [pivot_rows[c] for c in pivots], pivots


def rows_to_matrix(rows: list[dict], nrows: int, ncols: int, p: int) -> Matrix:
    entries = [(i, j, v) for i, row in enumerate(rows) for j, v in row.items()]
    return Matrix.from_entries(nrows, ncols, entries, p)


def rows_to_dense(rows: list[dict], ncols: int) -> np.ndarray:
    out = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, v in row.items():
            out[i, j] = v
    return out
