"""Dense mod-p elimination kernels.

Two elimination orders are provided, each with a numba and a pure-numpy
implementation:

* ``rref_columns`` sweeps columns left to right and picks the lowest row
  index holding a nonzero entry as pivot (Gauss-Jordan).
* ``rref_rows`` feeds rows one at a time into a growing reduced basis.

Both return the unique reduced row echelon form, so their outputs must agree
bit for bit.  Set ``HOMCERT_DISABLE_NUMBA=1`` to force the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("HOMCERT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by HOMCERT_DISABLE_NUMBA")
    from numba import njit
except ImportError:  # pragma: no cover - depends on environment
    njit = None

USE_NUMBA = njit is not None


def inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


# -- numpy reference path -------------------------------------------------------


def _rref_columns_np(a, p, inv):
    rows, cols = a.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * inv[a[r, c]]) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots[r] = c
        r += 1
    return r, pivots[:r].copy()


def _rref_rows_np(a, p, inv):
    rows, cols = a.shape
    basis = np.zeros((min(rows, cols), cols), dtype=np.int64)
    lead = np.empty(min(rows, cols), dtype=np.int64)
    k = 0
    for i in range(rows):
        v = a[i].copy()
        for t in range(k):
            coef = v[lead[t]]
            if coef:
                v = (v - coef * basis[t]) % p
        nz = np.flatnonzero(v)
        if nz.size == 0:
            continue
        c = nz[0]
        v = (v * inv[v[c]]) % p
        if k:
            col = basis[:k, c].copy()
            hit = np.flatnonzero(col)
            if hit.size:
                basis[hit] = (basis[hit] - np.outer(col[hit], v)) % p
        basis[k] = v
        lead[k] = c
        k += 1
    order = np.argsort(lead[:k], kind="stable")
    a[:, :] = 0
    a[:k] = basis[order]
    return k, lead[:k][order].copy()


# -- numba path -----------------------------------------------------------------

if USE_NUMBA:

    @njit(cache=True)
    def _rref_columns_nb(a, p, inv):
        rows, cols = a.shape
        pivots = np.empty(min(rows, cols), dtype=np.int64)
        r = 0
        for c in range(cols):
            if r == rows:
                break
            piv = -1
            for i in range(r, rows):
                if a[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(cols):
                    tmp = a[r, j]
                    a[r, j] = a[piv, j]
                    a[piv, j] = tmp
            s = inv[a[r, c]]
            if s != 1:
                for j in range(c, cols):
                    a[r, j] = (a[r, j] * s) % p
            for i in range(rows):
                if i == r:
                    continue
                f = a[i, c]
                if f == 0:
                    continue
                for j in range(c, cols):
                    if a[r, j] != 0:
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
            pivots[r] = c
            r += 1
        return r, pivots[:r].copy()

    @njit(cache=True)
    def _rref_rows_nb(a, p, inv):
        rows, cols = a.shape
        m = min(rows, cols)
        basis = np.zeros((m, cols), dtype=np.int64)
        lead = np.empty(m, dtype=np.int64)
        v = np.empty(cols, dtype=np.int64)
        k = 0
        for i in range(rows):
            for j in range(cols):
                v[j] = a[i, j]
            for t in range(k):
                coef = v[lead[t]]
                if coef != 0:
                    for j in range(cols):
                        if basis[t, j] != 0:
                            v[j] = (v[j] - coef * basis[t, j]) % p
            c = -1
            for j in range(cols):
                if v[j] != 0:
                    c = j
                    break
            if c < 0:
                continue
            s = inv[v[c]]
            for j in range(cols):
                v[j] = (v[j] * s) % p
            for t in range(k):
                f = basis[t, c]
                if f != 0:
                    for j in range(cols):
                        if v[j] != 0:
                            basis[t, j] = (basis[t, j] - f * v[j]) % p
            for j in range(cols):
                basis[k, j] = v[j]
            lead[k] = c
            k += 1
        order = np.argsort(lead[:k], kind="mergesort")
        for i in range(rows):
            for j in range(cols):
                a[i, j] = 0
        out = np.empty(k, dtype=np.int64)
        for t in range(k):
            for j in range(cols):
                a[t, j] = basis[order[t], j]
            out[t] = lead[order[t]]
        return k, out

    _rref_columns = _rref_columns_nb
    _rref_rows = _rref_rows_nb
else:
    _rref_columns = _rref_columns_np
    _rref_rows = _rref_rows_np


def rref_dense(a: np.ndarray, p: int, order: str = "columns", use_numba: bool | None = None):
    """Reduce ``a`` (copied) mod ``p``; return ``(reduced, rank, pivot_cols)``."""
    work = np.ascontiguousarray(np.asarray(a, dtype=np.int64) % p)
    inv = inverse_table(p)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba and not USE_NUMBA:
        raise RuntimeError("numba kernels requested but numba is unavailable or disabled")
    if order == "columns":
        fn = _rref_columns_nb if use_numba else _rref_columns_np
    elif order == "rows":
        fn = _rref_rows_nb if use_numba else _rref_rows_np
    else:
        raise ValueError(f"unknown elimination order {order!r}")
    if work.size == 0:
        return work, 0, np.empty(0, dtype=np.int64)
    rank, pivots = fn(work, np.int64(p), inv)
    return work, int(rank), pivots


def warm_up() -> None:
    """Compile (or load from cache) both numba kernels so later timings exclude JIT cost."""
    if USE_NUMBA:
        tiny = np.array([[1, 1], [0, 1]], dtype=np.int64)
        rref_dense(tiny, 2, "columns")
        rref_dense(tiny, 2, "rows")
