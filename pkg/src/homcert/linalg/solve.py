"""Rank, kernels and affine solution sets over F_p.

Every routine accepts ``backend`` in ``{"auto", "dense", "sparse"}``.  ``auto``
uses the dense numba/numpy kernels up to dimension 512 and the row-dictionary
eliminator above that.  Pivoting is deterministic (lowest row, then lowest
column), so all outputs are reproducible byte for byte.
"""

from __future__ import annotations

import contextlib
import contextvars
import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from homcert.errors import DimensionMismatch
from homcert.linalg import _kernels
from homcert.linalg.matrix import Matrix
from homcert.linalg.sparse import sparse_rank, rows_to_dense, sparse_rref

SPARSE_THRESHOLD = 512
BACKENDS = ("auto", "dense", "sparse")

_default_backend = contextvars.ContextVar("homcert_backend", default="auto")


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily change the backend used when callers pass ``backend=None``."""
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    token = _default_backend.set(name)
    try:
        yield
    finally:
        _default_backend.reset(token)


def current_backend() -> str:
    return _default_backend.get()


def resolve_backend(backend: str | None, shape: tuple[int, int]) -> str:
    backend = backend or _default_backend.get()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "auto":
        return "dense" if max(shape, default=0) <= SPARSE_THRESHOLD else "sparse"
    return backend


@dataclass(frozen=True)
class RREF:
    reduced: Matrix
    rank: int
    pivots: tuple[int, ...]


def _rref_core(m: Matrix, backend: str | None, order: str) -> tuple[np.ndarray, tuple[int, ...]]:
    """Nonzero rows of the RREF (dense ``rank x cols`` array) and pivot columns."""
    kind = resolve_backend(backend, m.shape)
    if kind == "sparse":
        rows, pivots = sparse_rref(m)
        return rows_to_dense(rows, m.cols), tuple(pivots)
    reduced, rank, pivots = _kernels.rref_dense(m.to_dense(), m.p, order=order)
    return reduced[:rank], tuple(int(c) for c in pivots)


def rref_rank(m: Matrix, backend: str | None = None, order: str = "columns") -> RREF:
    """Reduced row echelon form, rank and pivot columns of ``m``."""
    top, pivots = _rref_core(m, backend, order)
    full = np.zeros(m.shape, dtype=np.int64)
    full[: len(pivots)] = top
    return RREF(Matrix.from_dense(full, m.p) if m.rows else Matrix.zeros(0, m.cols, m.p), len(pivots), pivots)


def rank(m: Matrix, backend: str | None = None, order: str = "columns") -> int:
    if m.rows == 0 or m.cols == 0 or m.is_zero():
        return 0
    if resolve_backend(backend, m.shape) == "sparse":
        return sparse_rank(m)
    return len(_rref_core(m, backend, order)[1])


def _kernel_from_rref(top: np.ndarray, pivots, ncols: int, p: int) -> np.ndarray:
    free = [c for c in range(ncols) if c not in set(pivots)]
    K = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        K[k, f] = 1
        for r, c in enumerate(pivots):
            K[k, c] = (-top[r, f]) % p
    return K


def kernel_basis(m: Matrix, backend: str | None = None, order: str = "columns") -> np.ndarray:
    """Rows form a basis of ``{x : m x = 0}``; one row per free column."""
    if m.rows == 0 or m.is_zero():
        return np.eye(m.cols, dtype=np.int64)
    top, pivots = _rref_core(m, backend, order)
    return _kernel_from_rref(top, pivots, m.cols, m.p)


def row_space(vectors: np.ndarray, p: int, backend: str | None = None) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced basis of the span of the rows of ``vectors`` plus pivot columns."""
    vectors = np.asarray(vectors, dtype=np.int64)
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[1] if vectors.ndim == 2 else 0), dtype=np.int64), ()
    return _rref_core(Matrix.from_dense(vectors, p), backend, "columns")


def column_space_basis(m: Matrix, backend: str | None = None) -> np.ndarray:
    """Rows are a reduced basis of the image of ``m``."""
    if m.cols == 0 or m.is_zero():
        return np.zeros((0, m.rows), dtype=np.int64)
    return _rref_core(m.T, backend, "columns")[0]


def complement_positions(pivots, n: int) -> list[int]:
    s = set(pivots)
    return [c for c in range(n) if c not in s]


@dataclass(frozen=True, eq=False)
class AffineSolutionSet:
    """``particular + span(kernel_basis rows)`` inside F_p^n."""

    particular: np.ndarray
    kernel_basis: np.ndarray
    p: int

    def __post_init__(self):
        part = np.asarray(self.particular, dtype=np.int64) % self.p
        kb = np.asarray(self.kernel_basis, dtype=np.int64).reshape(-1, part.shape[0]) % self.p
        part.setflags(write=False)
        kb.setflags(write=False)
        object.__setattr__(self, "particular", part)
        object.__setattr__(self, "kernel_basis", kb)

    @property
    def ambient_dim(self) -> int:
        return int(self.particular.shape[0])

    @property
    def dim(self) -> int:
        return int(self.kernel_basis.shape[0])

    def size(self) -> int:
        return self.p ** self.dim

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.int64) % self.p
        diff = (x - self.particular) % self.p
        if self.dim == 0:
            return not diff.any()
        stacked = np.vstack([self.kernel_basis, diff])
        return len(row_space(stacked, self.p, "dense")[1]) == self.dim

    def members(self):
        """Yield every element; only sensible when ``size()`` is small."""
        for coeffs in itertools.product(range(self.p), repeat=self.dim):
            if self.dim:
                yield (self.particular + np.asarray(coeffs, dtype=np.int64) @ self.kernel_basis) % self.p
            else:
                yield self.particular.copy()

    def canonical(self) -> "AffineSolutionSet":
        """Reduced kernel basis, particular point zero on its pivot columns."""
        if self.dim == 0:
            return self
        top, pivots = row_space(self.kernel_basis, self.p, "dense")
        x = self.particular.copy()
        for r, c in enumerate(pivots):
            if x[c]:
                x = (x - x[c] * top[r]) % self.p
        return AffineSolutionSet(x, top, self.p)

    def __eq__(self, other):
        if not isinstance(other, AffineSolutionSet):
            return NotImplemented
        if self.p != other.p or self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        a, b = self.canonical(), other.canonical()
        return np.array_equal(a.particular, b.particular) and np.array_equal(a.kernel_basis, b.kernel_basis)

    def __repr__(self):
        return f"AffineSolutionSet(ambient={self.ambient_dim}, dim={self.dim}, p={self.p})"


def solve_affine(a: Matrix, b, backend: str | None = None, order: str = "columns") -> AffineSolutionSet | None:
    """All ``x`` with ``a x = b``, or ``None`` when ``b`` is not in the image.

    The particular solution is zero on every free coordinate.
    """
    b = np.asarray(b, dtype=np.int64).reshape(-1) % a.p
    if b.shape[0] != a.rows:
        raise DimensionMismatch(f"right-hand side has length {b.shape[0]}, matrix has {a.rows} rows")
    n = a.cols
    if a.rows == 0:
        return AffineSolutionSet(np.zeros(n, dtype=np.int64), np.eye(n, dtype=np.int64), a.p)
    aug = Matrix(sp.hstack([a.csr, sp.csr_matrix(b.reshape(-1, 1))], format="csr"), a.p)
    top, pivots = _rref_core(aug, backend, order)
    if pivots and pivots[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = top[r, n]
    K = _kernel_from_rref(top[:, :n], pivots, n, a.p)
    return AffineSolutionSet(x, K, a.p)


def intersect_affine_with_kernel(
    s: AffineSolutionSet, b: Matrix, backend: str | None = None
) -> AffineSolutionSet | None:
    """Members of ``s`` killed by ``b``; ``None`` when there are none."""
    if b.cols != s.ambient_dim:
        raise DimensionMismatch(f"matrix has {b.cols} columns, affine set lives in dimension {s.ambient_dim}")
    p = s.p
    bx = b @ s.particular
    if s.dim == 0:
        return s if not bx.any() else None
    bk = Matrix.from_dense((b.csr @ s.kernel_basis.T) % p, p) if b.rows else Matrix.zeros(0, s.dim, p)
    t = solve_affine(bk, (-bx) % p, backend=backend)
    if t is None:
        return None
    particular = (s.particular + t.particular @ s.kernel_basis) % p
    kernel = (t.kernel_basis @ s.kernel_basis) % p if t.dim else np.zeros((0, s.ambient_dim), dtype=np.int64)
    return AffineSolutionSet(particular, kernel, p)
