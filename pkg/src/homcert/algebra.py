"""Finite-dimensional commutative local algebras over F_p.

An algebra is stored through its regular representation: ``left_mult(u)`` is
the matrix of multiplication by the ``u``-th basis element, so the structure
constant ``c_{uv}^w`` is ``left_mult(u)[w, v]``.  Tensor products build these
matrices lazily as Kronecker products; basis order is left-factor major.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from homcert.errors import (
    FieldMismatch,
    IndexOutOfRange,
    InvalidExponent,
    NotAssociative,
    NotCommutative,
    NotLocal,
    UnitError,
    ValidationError,
)
from homcert.linalg import Matrix, PrimeField, row_space, vec_kron


class FiniteDimAlgebra:
    def __init__(
        self,
        field: PrimeField,
        basis_labels: Sequence[str],
        left_mult,
        unit,
        maxideal_basis=None,
        *,
        name: str | None = None,
        factors: tuple["FiniteDimAlgebra", ...] = (),
    ):
        self.field = field
        self.p = field.p
        self.basis_labels = tuple(basis_labels)
        self.dim = len(self.basis_labels)
        self.name = name or f"algebra(dim={self.dim})"
        self.factors = factors
        self.unit = field.vector(unit)
        self.unit.setflags(write=False)
        if callable(left_mult):
            self._left_mult_fn = left_mult
            self._left_mult = {}
        else:
            mats = list(left_mult)
            if len(mats) != self.dim:
                raise ValidationError(f"expected {self.dim} multiplication matrices, got {len(mats)}")
            self._left_mult_fn = None
            self._left_mult = dict(enumerate(mats))
        self._maxideal = None
        self._maxideal_fn = None
        self._generators = None
        if callable(maxideal_basis):
            self._maxideal_fn = maxideal_basis
        elif maxideal_basis is not None:
            self._maxideal = _as_rows(maxideal_basis, self.dim, self.p)

    def __repr__(self):
        return f"FiniteDimAlgebra({self.name} over F_{self.p}, dim={self.dim})"

    # structure ----------------------------------------------------------------

    def left_mult(self, u: int) -> Matrix:
        """Matrix of ``v -> e_u * v`` in the fixed basis."""
        m = self._left_mult.get(u)
        if m is None:
            if not 0 <= u < self.dim:
                raise IndexOutOfRange(f"basis index {u} out of range for dim {self.dim}")
            m = self._left_mult_fn(u)
            self._left_mult[u] = m
        return m

    def mult_operator(self, a) -> Matrix:
        """Matrix of multiplication by the element with coordinates ``a``."""
        a = self.field.vector(a)
        out = Matrix.zeros(self.dim, self.dim, self.p)
        for u in np.flatnonzero(a):
            out = out + self.left_mult(int(u)).scale(int(a[u]))
        return out

    def mult(self, a, b) -> np.ndarray:
        return self.mult_operator(a) @ self.field.vector(b)

    def basis_vector(self, u: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[u] = 1
        return v

    def element(self, label: str) -> np.ndarray:
        try:
            return self.basis_vector(self.basis_labels.index(label))
        except ValueError:
            raise KeyError(f"no basis element labelled {label!r}") from None

    def structure_constant(self, u: int, v: int, w: int) -> int:
        return self.left_mult(u)[w, v]

    def mult_table(self) -> list[tuple[int, int, int, int]]:
        """Nonzero structure constants as ``(u, v, w, c)`` triples."""
        out = []
        for u in range(self.dim):
            for (w, v), c in sorted(self.left_mult(u).entries().items(), key=lambda t: (t[0][1], t[0][0])):
                out.append((u, v, w, c))
        out.sort()
        return out

    @property
    def maxideal_basis(self) -> np.ndarray:
        """Rows span the designated maximal ideal."""
        if self._maxideal is None:
            if self._maxideal_fn is None:
                raise ValidationError(f"{self.name} has no designated maximal ideal")
            self._maxideal = _as_rows(self._maxideal_fn(), self.dim, self.p)
        return self._maxideal

    def algebra_generators(self) -> np.ndarray:
        """Rows generating the maximal ideal and, with the unit, the whole algebra.

        For a tensor of base factors these are the images of each factor's
        maximal-ideal basis, which is far smaller than a basis of the ideal.
        """
        if not self.factors:
            return self.maxideal_basis
        if self._generators is None:
            rows = []
            for j, f in enumerate(self.factors):
                for g in f.maxideal_basis:
                    parts = [fac.unit for fac in self.factors]
                    parts[j] = g
                    rows.append(vec_kron(parts, self.p))
            self._generators = _as_rows(rows, self.dim, self.p)
        return self._generators

    def tensor_index(self, digits: Sequence[int]) -> int:
        """Flat basis index of ``e_{d1} (x) ... (x) e_{dk}`` for a tensor of base factors."""
        if len(digits) != len(self.factors):
            raise IndexOutOfRange("digit count does not match the number of tensor factors")
        idx = 0
        for d, f in zip(digits, self.factors):
            idx = idx * f.dim + d
        return idx


def _as_rows(vectors, dim: int, p: int) -> np.ndarray:
    arr = np.asarray(vectors, dtype=np.int64)
    if arr.size == 0:
        arr = np.zeros((0, dim), dtype=np.int64)
    arr = arr.reshape(-1, dim) % p
    arr.setflags(write=False)
    return arr


# construction -----------------------------------------------------------------


def truncated_polynomial_algebra(field: PrimeField, e: int, var: str = "x") -> FiniteDimAlgebra:
    """``k[var]/(var^e)`` with monomial basis and maximal ideal ``(var)``."""
    if e < 2:
        raise InvalidExponent(f"exponent must be at least 2, got {e}")
    labels = ["1", var] + [f"{var}^{i}" for i in range(2, e)]
    mats = [
        Matrix.from_entries(e, e, [(i + j, j, 1) for j in range(e) if i + j < e], field.p) for i in range(e)
    ]
    unit = np.eye(e, dtype=np.int64)[0]
    return FiniteDimAlgebra(
        field, labels, mats, unit, np.eye(e, dtype=np.int64)[1:], name=f"F_{field.p}[{var}]/({var}^{e})"
    )


def field_algebra(field: PrimeField) -> FiniteDimAlgebra:
    """The one-dimensional algebra ``k`` itself (maximal ideal zero)."""
    return FiniteDimAlgebra(field, ["1"], [Matrix.identity(1, field.p)], [1], np.zeros((0, 1)), name=f"F_{field.p}")


def algebra_from_structure_constants(
    field: PrimeField,
    basis_labels: Sequence[str],
    mult_table,
    unit,
    maxideal_basis,
    name: str | None = None,
) -> FiniteDimAlgebra:
    """Build from ``(u, v, w, c)`` triples meaning ``e_u e_v = sum c e_w`` and verify it.

    Raises ``NotAssociative``, ``NotCommutative``, ``UnitError`` or ``NotLocal``.
    """
    dim = len(basis_labels)
    entries: list[dict] = [dict() for _ in range(dim)]
    for t in mult_table:
        u, v, w, c = (int(x) for x in t)
        if not all(0 <= x < dim for x in (u, v, w)):
            raise ValidationError(f"structure constant index out of range in {tuple(t)}")
        entries[u][(w, v)] = (entries[u].get((w, v), 0) + c) % field.p
    mats = [Matrix.from_entries(dim, dim, entries[u], field.p) for u in range(dim)]
    alg = FiniteDimAlgebra(field, basis_labels, mats, unit, maxideal_basis, name=name)
    verify_algebra(alg)
    return alg


@functools.lru_cache(maxsize=256)
def tensor_algebra(a: FiniteDimAlgebra, b: FiniteDimAlgebra) -> FiniteDimAlgebra:
    """``a (x)_k b`` with left-major basis order and maximal ideal ``m_a (x) b + a (x) m_b``."""
    if a.p != b.p:
        raise FieldMismatch(f"cannot tensor algebras over F_{a.p} and F_{b.p}")
    db = b.dim
    labels = [f"{la}⊗{lb}" for la in a.basis_labels for lb in b.basis_labels]

    def left(u):
        return a.left_mult(u // db).kron(b.left_mult(u % db))

    def maxideal():
        p = a.p
        gens = [vec_kron([m, b.basis_vector(w)], p) for m in a.maxideal_basis for w in range(db)]
        gens += [vec_kron([a.basis_vector(u), n], p) for u in range(a.dim) for n in b.maxideal_basis]
        if not gens:
            return np.zeros((0, a.dim * db), dtype=np.int64)
        return row_space(np.array(gens), p)[0]

    factors = (a.factors or (a,)) + (b.factors or (b,))
    return FiniteDimAlgebra(
        a.field,
        labels,
        left,
        vec_kron([a.unit, b.unit], a.p),
        maxideal,
        name=f"({a.name})⊗({b.name})",
        factors=factors,
    )


@functools.lru_cache(maxsize=64)
def tensor_power(r1: FiniteDimAlgebra, n: int) -> FiniteDimAlgebra:
    """``R_n``: the ``n``-fold tensor power, built left to right."""
    if n < 1:
        raise IndexOutOfRange(f"tensor power needs n >= 1, got {n}")
    out = r1
    for _ in range(n - 1):
        out = tensor_algebra(out, r1)
    if n > 1:
        out.name = f"({r1.name})^⊗{n}"
    return out


# morphisms ----------------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraMorphism:
    source: FiniteDimAlgebra
    target: FiniteDimAlgebra
    matrix: Matrix

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ self.source.field.vector(x)

    def verify(self) -> None:
        """Check unit and multiplicativity on every pair of source basis elements."""
        if not np.array_equal(self(self.source.unit), self.target.unit):
            raise UnitError("morphism does not preserve the unit")
        for u in range(self.source.dim):
            eu = self(self.source.basis_vector(u))
            op = self.target.mult_operator(eu)
            for v in range(u, self.source.dim):
                lhs = self(self.source.mult(self.source.basis_vector(u), self.source.basis_vector(v)))
                rhs = op @ self(self.source.basis_vector(v))
                if not np.array_equal(lhs, rhs):
                    raise NotAssociative(f"morphism not multiplicative on basis pair ({u}, {v})")


def factor_embedding(r1: FiniteDimAlgebra, n: int, j: int) -> AlgebraMorphism:
    """``Phi_j : R_1 -> R_n``, the inclusion of the ``j``-th tensor factor (1-based)."""
    if not 1 <= j <= n:
        raise IndexOutOfRange(f"factor index {j} outside 1..{n}")
    target = tensor_power(r1, n)
    p = r1.p
    cols = []
    for u in range(r1.dim):
        parts = [r1.unit] * n
        parts[j - 1] = r1.basis_vector(u)
        cols.append(vec_kron(parts, p))
    return AlgebraMorphism(r1, target, Matrix.from_columns(cols, target.dim, p))


def stage_inclusion(r1: FiniteDimAlgebra, n: int) -> AlgebraMorphism:
    """``R_n -> R_{n+1}``, ``r -> r (x) 1``."""
    src, tgt = tensor_power(r1, n), tensor_power(r1, n + 1)
    unit_col = Matrix.from_dense(r1.unit.reshape(-1, 1), r1.p)
    return AlgebraMorphism(src, tgt, Matrix.identity(src.dim, r1.p).kron(unit_col))


# verification -------------------------------------------------------------------


@dataclass(frozen=True)
class LocalityCertificate:
    nilpotency_index: int
    codimension: int
    ideal_dims: tuple[int, ...]


def verify_algebra(a: FiniteDimAlgebra) -> LocalityCertificate:
    """Exhaustively check unit, commutativity, associativity, then locality."""
    ident = Matrix.identity(a.dim, a.p)
    if a.mult_operator(a.unit) != ident:
        raise UnitError("unit does not act as the identity")
    for u in range(a.dim):
        lu = a.left_mult(u)
        for v in range(a.dim):
            if not np.array_equal(lu @ a.basis_vector(v), a.left_mult(v) @ a.basis_vector(u)):
                raise NotCommutative(f"e_{u} e_{v} != e_{v} e_{u}")
    for u in range(a.dim):
        lu = a.left_mult(u)
        for v in range(a.dim):
            uv = lu @ a.basis_vector(v)
            if lu @ a.left_mult(v) != a.mult_operator(uv):
                raise NotAssociative(f"(e_{u} e_{v}) x != e_{u} (e_{v} x) for some x")
    return verify_local(a)


def ideal_product(a: FiniteDimAlgebra, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Reduced basis of the span of all products ``x * y``."""
    prods = [a.mult(x, y) for x in left for y in right]
    if not prods:
        return np.zeros((0, a.dim), dtype=np.int64)
    return row_space(np.array(prods), a.p)[0]


def verify_local(a: FiniteDimAlgebra) -> LocalityCertificate:
    """Prove the designated ideal is a codimension-1 nilpotent ideal.

    Returns the least ``N`` with ``m^N = 0`` together with the codimension.
    """
    m, _ = row_space(a.maxideal_basis, a.p) if len(a.maxideal_basis) else (a.maxideal_basis, ())
    codim = a.dim - len(m)
    if codim != 1:
        raise NotLocal(f"maximal ideal has codimension {codim}, expected 1")
    for x in m:
        for u in range(a.dim):
            y = a.left_mult(u) @ x
            if y.any() and len(row_space(np.vstack([m, y]), a.p)[1]) != len(m):
                raise NotLocal("designated maximal ideal is not closed under multiplication")
    dims = [len(m)]
    power = m
    n = 1
    while len(power):
        if n > a.dim:
            raise NotLocal("maximal ideal is not nilpotent")
        power = ideal_product(a, power, m)
        n += 1
        dims.append(len(power))
    return LocalityCertificate(n, codim, tuple(dims))
