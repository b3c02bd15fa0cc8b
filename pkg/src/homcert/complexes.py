"""Cochain complexes of finite-dimensional modules.

Conventions used throughout:

* ``d^n : C^n -> C^{n+1}``.
* Shift: ``(C[i])^m = C^{m+i}`` with differential ``(-1)^i d``.
* Tensor product: ``d(x (x) y) = dx (x) y + (-1)^{deg x} x (x) dy``.

A complex may be a *window* onto a larger one; ``open_below``/``open_above``
mark ends whose neighbouring terms were not materialised, and cohomology is
refused there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from homcert.algebra import FiniteDimAlgebra, tensor_algebra, tensor_power
from homcert.errors import DimensionMismatch, FieldMismatch, NotACycle
from homcert.linalg import (
    AffineSolutionSet,
    Matrix,
    column_space_basis,
    kernel_basis,
    kron_all,
    rank,
    row_space,
    solve_affine,
)
from homcert.modules import FDModule, direct_sum, quotient_module, tensor_module, zero_module


class CochainComplex:
    def __init__(
        self,
        algebra: FiniteDimAlgebra,
        modules: dict[int, FDModule],
        differentials: dict[int, Matrix] | None = None,
        *,
        open_below: bool = False,
        open_above: bool = False,
        name: str | None = None,
    ):
        self.algebra = algebra
        self.p = algebra.p
        self.modules = dict(sorted(modules.items()))
        degs = list(self.modules)
        if degs and degs != list(range(degs[0], degs[-1] + 1)):
            raise DimensionMismatch(f"degrees must be contiguous, got {degs}")
        self.differentials = {}
        for n, d in (differentials or {}).items():
            if n not in self.modules or n + 1 not in self.modules:
                if not d.is_zero():
                    raise DimensionMismatch(f"nonzero differential d^{n} leaves the degree range")
                continue
            if d.shape != (self.modules[n + 1].dim, self.modules[n].dim):
                raise DimensionMismatch(
                    f"d^{n} has shape {d.shape}, expected {(self.modules[n + 1].dim, self.modules[n].dim)}"
                )
            self.differentials[n] = d
        self.open_below = open_below
        self.open_above = open_above
        self.name = name or "complex"

    def __repr__(self):
        dims = {n: m.dim for n, m in self.modules.items()}
        return f"CochainComplex({self.name}, dims={dims})"

    @property
    def degree_range(self) -> tuple[int, int] | None:
        if not self.modules:
            return None
        degs = list(self.modules)
        return degs[0], degs[-1]

    def module(self, n: int) -> FDModule:
        return self.modules.get(n) or zero_module(self.algebra)

    def dim(self, n: int) -> int:
        m = self.modules.get(n)
        return m.dim if m is not None else 0

    def d(self, n: int) -> Matrix:
        """``d^n : C^n -> C^{n+1}`` (zero where not stored)."""
        got = self.differentials.get(n)
        if got is not None:
            return got
        return Matrix.zeros(self.dim(n + 1), self.dim(n), self.p)

    def check_d_squared(self) -> bool:
        for n in self.modules:
            if self.dim(n + 2) and self.dim(n) and not (self.d(n + 1) @ self.d(n)).is_zero():
                return False
        return True

    def check_module_maps(self) -> bool:
        """Every stored differential commutes with the algebra generators."""
        gens = self.algebra.algebra_generators()
        for n, d in self.differentials.items():
            for g in gens:
                if d @ self.modules[n].act(g) != self.modules[n + 1].act(g) @ d:
                    return False
        return True

    def _check_degree(self, n: int) -> None:
        rng = self.degree_range
        if rng is None:
            return
        lo, hi = rng
        if (self.open_below and n <= lo) or (self.open_above and n >= hi):
            raise ValueError(f"degree {n} touches an unmaterialised end of the window {rng}")


def cohomology_dim(c: CochainComplex, n: int) -> int:
    """``dim ker d^n - rank d^{n-1}``."""
    c._check_degree(n)
    dim_n = c.dim(n)
    if dim_n == 0:
        return 0
    dn = c.d(n)
    ker = dim_n - (rank(dn) if dn.rows else 0)
    dprev = c.d(n - 1)
    im = rank(dprev) if dprev.cols else 0
    return ker - im


def cohomology_basis(c: CochainComplex, n: int) -> np.ndarray:
    """Cycles whose classes form a basis of ``H^n`` (chosen by pivoting)."""
    c._check_degree(n)
    dim_n = c.dim(n)
    if dim_n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    dn = c.d(n)
    cycles = kernel_basis(dn) if dn.rows else np.eye(dim_n, dtype=np.int64)
    bounds = column_space_basis(c.d(n - 1)) if c.dim(n - 1) else np.zeros((0, dim_n), dtype=np.int64)
    current = len(row_space(bounds, c.p)[1]) if len(bounds) else 0
    stack = bounds
    reps = []
    for z in cycles:
        trial = np.vstack([stack, z]) if len(stack) else z.reshape(1, -1)
        r = len(row_space(trial, c.p)[1])
        if r > current:
            reps.append(z)
            stack, current = trial, r
    return np.array(reps, dtype=np.int64).reshape(-1, dim_n)


# cochains ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Cochain:
    complex: CochainComplex
    degree: int
    vector: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=np.int64) % self.complex.p
        if v.shape != (self.complex.dim(self.degree),):
            raise DimensionMismatch(f"cochain of length {v.shape} in degree {self.degree} of dim {self.complex.dim(self.degree)}")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    def boundary(self) -> np.ndarray:
        return self.complex.d(self.degree) @ self.vector

    def is_cycle(self) -> bool:
        return not self.boundary().any()

    def summand(self, index) -> np.ndarray:
        s = self.complex.summand(self.degree, index)
        return self.vector[s.offset: s.offset + s.dim]


def preimage_set(c: CochainComplex, z: Cochain) -> AffineSolutionSet | None:
    """Every ``mu`` in degree ``n-1`` with ``d mu = z``; ``None`` if ``z`` is not a boundary."""
    if z.complex is not c:
        raise DimensionMismatch("cochain belongs to a different complex")
    if not z.is_cycle():
        raise NotACycle(f"cochain in degree {z.degree} is not a cycle")
    n = z.degree
    rng = c.degree_range
    if c.open_below and rng is not None and n - 1 < rng[0]:
        raise ValueError(f"degree {n - 1} is outside the materialised window {rng}")
    if c.dim(n - 1) == 0:
        if z.vector.any():
            return None
        return AffineSolutionSet(np.zeros(0, dtype=np.int64), np.zeros((0, 0), dtype=np.int64), c.p)
    return solve_affine(c.d(n - 1), z.vector)


# building blocks ------------------------------------------------------------------


def concentrated(module: FDModule, degree: int = 0) -> CochainComplex:
    """``M`` placed in a single degree."""
    return CochainComplex(module.algebra, {degree: module}, name=f"{module.name}@{degree}")


def zero_complex(algebra: FiniteDimAlgebra) -> CochainComplex:
    return CochainComplex(algebra, {}, name="0")


def shift(c: CochainComplex, i: int) -> CochainComplex:
    """``C[i]``: ``(C[i])^m = C^{m+i}``, differential multiplied by ``(-1)^i``."""
    sign = -1 if i % 2 else 1
    mods = {n - i: m for n, m in c.modules.items()}
    diffs = {n - i: d.scale(sign) for n, d in c.differentials.items()}
    return CochainComplex(
        c.algebra, mods, diffs, open_below=c.open_below, open_above=c.open_above, name=f"{c.name}[{i}]"
    )


def finite_sum(complexes: Sequence[CochainComplex]) -> CochainComplex:
    """Degreewise direct sum; for finitely many terms this is also the product."""
    complexes = list(complexes)
    if not complexes:
        raise ValueError("finite_sum needs at least one complex")
    alg = complexes[0].algebra
    for c in complexes[1:]:
        if c.algebra is not alg:
            raise FieldMismatch("summands must share one algebra object")
    degs = sorted({n for c in complexes for n in c.modules})
    if not degs:
        return zero_complex(alg)
    degs = list(range(degs[0], degs[-1] + 1))
    mods, diffs = {}, {}
    for n in degs:
        parts = [c.module(n) for c in complexes if c.dim(n)]
        mods[n] = direct_sum(parts) if parts else zero_module(alg)
    for n in degs[:-1]:
        blocks = [c.d(n) for c in complexes]
        # block_diag keeps zero-size blocks aligned with the summand order
        nz = [(c, b) for c, b in zip(complexes, blocks) if c.dim(n) or c.dim(n + 1)]
        if not nz:
            continue
        diffs[n] = _block_diag_rect([b for _, b in nz], alg.p)
    return CochainComplex(alg, mods, diffs, name=" ⊕ ".join(c.name for c in complexes))


finite_product = finite_sum


def _block_diag_rect(blocks: Sequence[Matrix], p: int) -> Matrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    entries = []
    r0 = c0 = 0
    for b in blocks:
        entries.extend((r0 + i, c0 + j, v) for (i, j), v in b.entries().items())
        r0 += b.rows
        c0 += b.cols
    return Matrix.from_entries(rows, cols, entries, p)


def truncate_geq(c: CochainComplex, n: int) -> CochainComplex:
    """``tau^{>=n} C``: drop degrees below ``n`` and replace ``C^n`` by ``coker d^{n-1}``."""
    rng = c.degree_range
    if rng is None or n > rng[1]:
        return zero_complex(c.algebra)
    if n <= rng[0]:
        return c
    img = column_space_basis(c.d(n - 1)) if c.dim(n - 1) and c.dim(n) else np.zeros((0, c.dim(n)), dtype=np.int64)
    q = quotient_module(c.module(n), img)
    mods = {m: mod for m, mod in c.modules.items() if m > n}
    mods[n] = q.module
    diffs = {m: d for m, d in c.differentials.items() if m > n}
    if n + 1 in c.modules:
        diffs[n] = c.d(n) @ q.section
    return CochainComplex(c.algebra, mods, diffs, open_above=c.open_above, name=f"tau>={n}({c.name})")


# multi-indexed complexes ------------------------------------------------------------


@dataclass(frozen=True)
class Summand:
    index: tuple[int, ...]
    offset: int
    dim: int
    module: FDModule = field(repr=False, compare=False)


class MultiIndexedComplex(CochainComplex):
    """A complex whose terms split into summands labelled by multi-indices.

    The differential only maps summand ``l`` to summands ``l + e_m``.
    """

    def __init__(self, algebra, summands: dict[int, list[Summand]], differentials, **kw):
        self.summands = {t: list(s) for t, s in summands.items()}
        mods = {}
        for t, parts in self.summands.items():
            mods[t] = direct_sum([s.module for s in parts]) if parts else zero_module(algebra)
        super().__init__(algebra, mods, differentials, **kw)
        self._lookup = {(t, s.index): s for t, parts in self.summands.items() for s in parts}

    def summand(self, degree: int, index) -> Summand:
        try:
            return self._lookup[(degree, tuple(index))]
        except KeyError:
            raise KeyError(f"no summand {tuple(index)} in degree {degree}") from None

    def embed(self, degree: int, index, vector) -> np.ndarray:
        s = self.summand(degree, index)
        out = np.zeros(self.dim(degree), dtype=np.int64)
        out[s.offset: s.offset + s.dim] = np.asarray(vector, dtype=np.int64) % self.p
        return out

    def check_summand_support(self) -> bool:
        """Differential blocks only connect ``l`` to ``l + e_m``."""
        for t, d in self.differentials.items():
            csr = d.csr.tocoo()
            src = self.summands[t]
            tgt = self.summands[t + 1]
            src_starts = np.array([s.offset for s in src])
            tgt_starts = np.array([s.offset for s in tgt])
            si = np.searchsorted(src_starts, csr.col, side="right") - 1
            ti = np.searchsorted(tgt_starts, csr.row, side="right") - 1
            for a, b in set(zip(si.tolist(), ti.tolist())):
                diff = np.subtract(tgt[b].index, src[a].index)
                if not (diff.min() >= 0 and diff.sum() == 1):
                    return False
        return True


def _as_multi(c: CochainComplex) -> dict[int, list[Summand]]:
    if isinstance(c, MultiIndexedComplex):
        return c.summands
    return {t: [Summand((t,), 0, m.dim, m)] for t, m in c.modules.items()}


def _block(d: Matrix, src: Summand, tgt: Summand) -> Matrix:
    return d.submatrix(rows=range(tgt.offset, tgt.offset + tgt.dim), cols=range(src.offset, src.offset + src.dim))


def _assemble(summands: dict[int, list[Summand]], blocks: dict[int, list[tuple[int, int, Matrix]]], p: int) -> dict[int, Matrix]:
    diffs = {}
    for t, items in blocks.items():
        if t + 1 not in summands:
            continue
        src, tgt = summands[t], summands[t + 1]
        rows = sum(s.dim for s in tgt)
        cols = sum(s.dim for s in src)
        rr, cc, vv = [], [], []
        for a, b, m in items:
            coo = m.csr.tocoo()
            rr.append(coo.row + tgt[b].offset)
            cc.append(coo.col + src[a].offset)
            vv.append(coo.data)
        if rr:
            mat = sp.coo_matrix((np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))), shape=(rows, cols))
            diffs[t] = Matrix(mat.tocsr(), p)
        else:
            diffs[t] = Matrix.zeros(rows, cols, p)
    return diffs


def _layout(parts: list[tuple[tuple[int, ...], FDModule]]) -> list[Summand]:
    out, off = [], 0
    for idx, mod in sorted(parts, key=lambda t: t[0]):
        out.append(Summand(idx, off, mod.dim, mod))
        off += mod.dim
    return out


def tensor_complexes(c: CochainComplex, d: CochainComplex) -> MultiIndexedComplex:
    """``C (x)_k D`` over ``A (x)_k B`` with the Koszul sign; summands sorted by multi-index."""
    if c.p != d.p:
        raise FieldMismatch(f"F_{c.p} vs F_{d.p}")
    p = c.p
    alg = tensor_algebra(c.algebra, d.algebra)
    cs, ds = _as_multi(c), _as_multi(d)
    parts: dict[int, list] = {}
    origin = {}
    for u, cparts in cs.items():
        for v, dparts in ds.items():
            for s in cparts:
                for t in dparts:
                    idx = s.index + t.index
                    parts.setdefault(u + v, []).append((idx, tensor_module(s.module, t.module, alg)))
                    origin[idx] = (u, s, v, t)
    summands = {t: _layout(v) for t, v in parts.items()}
    lo, hi = min(summands), max(summands)
    for t in range(lo, hi + 1):
        summands.setdefault(t, [])
    pos = {t: {s.index: k for k, s in enumerate(v)} for t, v in summands.items()}
    blocks: dict[int, list] = {}
    for t, items in summands.items():
        for k, s in enumerate(items):
            u, cs_, v, ds_ = origin[s.index]
            # d_C (x) 1
            if u + 1 in cs:
                for s2 in cs[u + 1]:
                    blk = _block(c.d(u), cs_, s2)
                    if not blk.is_zero():
                        tgt = pos[t + 1][s2.index + ds_.index]
                        blocks.setdefault(t, []).append((k, tgt, blk.kron(Matrix.identity(ds_.dim, p))))
            # (-1)^u 1 (x) d_D
            if v + 1 in ds:
                for t2 in ds[v + 1]:
                    blk = _block(d.d(v), ds_, t2)
                    if not blk.is_zero():
                        tgt = pos[t + 1][cs_.index + t2.index]
                        sign = -1 if u % 2 else 1
                        blocks.setdefault(t, []).append((k, tgt, Matrix.identity(cs_.dim, p).kron(blk).scale(sign)))
    diffs = _assemble(summands, blocks, p)
    return MultiIndexedComplex(
        alg,
        summands,
        diffs,
        open_below=c.open_below or d.open_below,
        open_above=c.open_above or d.open_above,
        name=f"({c.name})⊗({d.name})",
    )


def compositions(total: int, parts: int, max_part: int | None = None) -> Iterable[tuple[int, ...]]:
    """Tuples of ``parts`` nonnegative integers summing to ``total``, in lexicographic order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    top = total if max_part is None else min(total, max_part)
    for first in range(top + 1):
        for rest in compositions(total - first, parts - 1, max_part):
            yield (first,) + rest


def tensor_power_window(c: CochainComplex, n: int, degrees: Sequence[int]) -> MultiIndexedComplex:
    """Degrees ``degrees`` (contiguous) of ``C^{(x) n}`` for ``C`` concentrated in degrees ``>= 0``.

    Summand ``(l_1..l_n)`` is ``C^{l_1} (x) ... (x) C^{l_n}``; the block to
    ``l + e_m`` is ``(-1)^{l_1+..+l_{m-1}} 1 (x) .. (x) d^{l_m} (x) .. (x) 1``.
    """
    degrees = list(degrees)
    if degrees != list(range(degrees[0], degrees[-1] + 1)):
        raise ValueError("window degrees must be contiguous")
    rng = c.degree_range
    if rng is None or rng[0] < 0:
        raise ValueError("tensor_power_window needs a complex concentrated in degrees >= 0")
    p = c.p
    top = rng[1]
    alg = tensor_power(c.algebra, n)
    cache: dict[tuple[int, ...], FDModule] = {}

    def module_for(idx):
        mod = cache.get(idx)
        if mod is None:
            if len(idx) == 1:
                mod = c.module(idx[0])
            else:
                mod = tensor_module(module_for(idx[:-1]), c.module(idx[-1]))
            cache[idx] = mod
        return mod

    summands = {}
    for t in degrees:
        parts = [(idx, module_for(idx)) for idx in compositions(t, n, top) if all(c.dim(l) for l in idx)]
        summands[t] = _layout(parts)
    eye = {l: Matrix.identity(c.dim(l), p) for l in range(rng[0], top + 1)}
    blocks: dict[int, list] = {}
    for t in degrees[:-1]:
        pos = {s.index: k for k, s in enumerate(summands[t + 1])}
        for k, s in enumerate(summands[t]):
            partial = 0
            for m, l in enumerate(s.index):
                tgt_idx = s.index[:m] + (l + 1,) + s.index[m + 1:]
                if tgt_idx in pos:
                    dm = c.d(l)
                    if not dm.is_zero():
                        factors = [eye[x] for x in s.index]
                        factors[m] = dm
                        blk = kron_all(factors)
                        if partial % 2:
                            blk = blk.scale(-1)
                        blocks.setdefault(t, []).append((k, pos[tgt_idx], blk))
                partial += l
    diffs = _assemble(summands, blocks, p)
    lo_open = degrees[0] > 0
    return MultiIndexedComplex(
        alg,
        summands,
        diffs,
        open_below=lo_open or c.open_below,
        open_above=True if degrees[-1] < n * top else c.open_above,
        name=f"({c.name})^⊗{n}[{degrees[0]}..{degrees[-1]}]",
    )
