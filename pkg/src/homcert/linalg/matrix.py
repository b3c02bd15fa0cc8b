"""Immutable sparse matrices over a prime field.

Storage is a canonical CSR layout (sorted column indices, no stored zeros,
entries in ``1..p-1``), so two equal matrices have identical buffers and an
identical :meth:`Matrix.digest`.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from homcert.errors import DimensionMismatch, FieldMismatch


def _canon(csr: sp.csr_matrix, p: int) -> sp.csr_matrix:
    csr = sp.csr_matrix(csr, dtype=np.int64, copy=True)
    csr.data %= p
    csr.eliminate_zeros()
    csr.sum_duplicates()
    csr.sort_indices()
    csr.indices = csr.indices.astype(np.int64, copy=False)
    csr.indptr = csr.indptr.astype(np.int64, copy=False)
    return csr


class Matrix:
    """A ``rows x cols`` matrix over F_p backed by canonical CSR storage."""

    __slots__ = ("p", "_csr", "_digest")

    def __init__(self, csr, p: int, *, _trusted: bool = False):
        self.p = int(p)
        self._csr = csr if _trusted else _canon(sp.csr_matrix(csr), self.p)
        self._digest = None

    # construction -------------------------------------------------------------

    @classmethod
    def from_dense(cls, a, p: int) -> "Matrix":
        a = np.asarray(a, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2:
            raise DimensionMismatch(f"expected a 2-d array, got shape {a.shape}")
        return cls(sp.csr_matrix(a % p), p)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries, p: int) -> "Matrix":
        """Build from ``{(i, j): value}`` or an iterable of ``(i, j, value)``."""
        if isinstance(entries, dict):
            items = [(i, j, v) for (i, j), v in entries.items()]
        else:
            items = list(entries)
        for i, j, _ in items:
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionMismatch(f"entry ({i}, {j}) outside {rows}x{cols}")
        if items:
            r, c, v = (np.asarray(x, dtype=np.int64) for x in zip(*items))
        else:
            r = c = v = np.zeros(0, dtype=np.int64)
        return cls(sp.coo_matrix((v % p, (r, c)), shape=(rows, cols)).tocsr(), p)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "Matrix":
        return cls(sp.csr_matrix((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "Matrix":
        return cls(sp.identity(n, dtype=np.int64, format="csr"), p)

    @classmethod
    def from_columns(cls, columns: Sequence[np.ndarray], nrows: int, p: int) -> "Matrix":
        if len(columns) == 0:
            return cls.zeros(nrows, 0, p)
        return cls.from_dense(np.column_stack([np.asarray(c, dtype=np.int64) for c in columns]), p)

    # accessors ---------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self._csr.shape

    @property
    def rows(self) -> int:
        return self._csr.shape[0]

    @property
    def cols(self) -> int:
        return self._csr.shape[1]

    @property
    def nnz(self) -> int:
        return int(self._csr.nnz)

    @property
    def csr(self) -> sp.csr_matrix:
        # callers must not mutate
        return self._csr

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray().astype(np.int64, copy=False)

    def entries(self) -> dict[tuple[int, int], int]:
        coo = self._csr.tocoo()
        return {(int(i), int(j)): int(v) for i, j, v in zip(coo.row, coo.col, coo.data)}

    def row(self, i: int) -> dict[int, int]:
        lo, hi = self._csr.indptr[i], self._csr.indptr[i + 1]
        return {int(j): int(v) for j, v in zip(self._csr.indices[lo:hi], self._csr.data[lo:hi])}

    def __getitem__(self, key):
        i, j = key
        return int(self._csr[i, j])

    def is_zero(self) -> bool:
        return self._csr.nnz == 0

    def digest(self) -> str:
        """SHA-256 over ``p``, shape and the canonical CSR buffers."""
        if self._digest is None:
            h = hashlib.sha256()
            h.update(np.array([self.p, *self.shape], dtype=np.int64).tobytes())
            h.update(self._csr.indptr.astype(np.int64).tobytes())
            h.update(self._csr.indices.astype(np.int64).tobytes())
            h.update(self._csr.data.astype(np.int64).tobytes())
            self._digest = h.hexdigest()
        return self._digest

    # arithmetic --------------------------------------------------------------

    def _check(self, other: "Matrix"):
        if other.p != self.p:
            raise FieldMismatch(f"F_{self.p} vs F_{other.p}")

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            self._check(other)
            if self.cols != other.rows:
                raise DimensionMismatch(f"{self.shape} @ {other.shape}")
            return Matrix(self._csr @ other._csr, self.p)
        v = np.asarray(other, dtype=np.int64)
        if v.shape[0] != self.cols:
            raise DimensionMismatch(f"{self.shape} @ vector of length {v.shape[0]}")
        return np.asarray(self._csr @ v, dtype=np.int64) % self.p

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return Matrix(self._csr + other._csr, self.p)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} - {other.shape}")
        return Matrix(self._csr - other._csr, self.p)

    def __neg__(self) -> "Matrix":
        return Matrix(-self._csr, self.p)

    def scale(self, c: int) -> "Matrix":
        c %= self.p
        if c == 1:
            return self
        return Matrix(self._csr * c, self.p)

    @property
    def T(self) -> "Matrix":
        return Matrix(self._csr.T.tocsr(), self.p)

    def kron(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(sp.kron(self._csr, other._csr, format="csr"), self.p)

    def submatrix(self, rows=None, cols=None) -> "Matrix":
        m = self._csr
        if rows is not None:
            m = m[np.asarray(rows, dtype=np.int64), :]
        if cols is not None:
            m = m[:, np.asarray(cols, dtype=np.int64)]
        return Matrix(m, self.p)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and self.digest() == other.digest()

    def __hash__(self):
        return hash(self.digest())

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols} over F_{self.p}, nnz={self.nnz})"


def hstack(blocks: Iterable[Matrix]) -> Matrix:
    blocks = list(blocks)
    p = blocks[0].p
    return Matrix(sp.hstack([b.csr for b in blocks], format="csr"), p)


def vstack(blocks: Iterable[Matrix]) -> Matrix:
    blocks = list(blocks)
    p = blocks[0].p
    return Matrix(sp.vstack([b.csr for b in blocks], format="csr"), p)


def block_diag(blocks: Iterable[Matrix]) -> Matrix:
    blocks = list(blocks)
    p = blocks[0].p
    return Matrix(sp.block_diag([b.csr for b in blocks], format="csr"), p)


def kron_all(factors: Sequence[Matrix]) -> Matrix:
    out = factors[0]
    for f in factors[1:]:
        out = out.kron(f)
    return out


def vec_kron(vectors: Sequence[np.ndarray], p: int) -> np.ndarray:
    out = np.asarray(vectors[0], dtype=np.int64)
    for v in vectors[1:]:
        out = np.kron(out, np.asarray(v, dtype=np.int64)) % p
    return out % p
