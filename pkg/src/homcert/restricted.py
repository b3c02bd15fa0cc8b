"""Stage checks that never materialise the full window of ``J_n``.

The full check solves ``d mu = lambda`` over all of ``J^{i-1}_n`` and then
intersects with ``ker B``, where ``B`` stacks the actions of ``Phi_j(m)`` for
``j`` in ``S``.  Two elementary facts make a smaller computation equivalent:

* ``{mu : d mu = lambda} ∩ ker B`` is empty iff ``lambda`` is not in
  ``d(ker B)``.
* ``B`` preserves every Kronecker summand ``U (x) W`` (``W`` = the factors in
  ``S``, which are the last ``|S|`` slots) and acts there as ``I_U (x) C`` with
  ``C`` stacked on ``W`` alone.  Hence ``ker B = (+) U (x) ker C``.

So the obstruction is a rank comparison for ``d`` restricted to
``(+) U (x) ker C``, whose dimension is far below ``dim J^{i-1}``.  The cycle
and annihilation checks and the boundary witness are evaluated summand by
summand with tensor contractions.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from homcert.complexes import CochainComplex, compositions
from homcert.linalg import Matrix, kernel_basis, rank, solve_affine, vec_kron
from homcert.linalg.matrix import kron_all


@dataclass(frozen=True)
class FactorData:
    """Per-degree data of the one-factor injective resolution."""

    p: int
    top: int
    dims: tuple[int, ...]
    d: tuple[np.ndarray, ...]  # d[l]: I^l -> I^{l+1}, dense
    act: tuple[tuple[np.ndarray, ...], ...]  # act[l][g]: action of the g-th maxideal basis element on I^l

    @classmethod
    def from_complex(cls, c: CochainComplex, maxideal_basis) -> "FactorData":
        lo, top = c.degree_range
        if lo != 0:
            raise ValueError("factor complex must start in degree 0")
        dims = tuple(c.dim(l) for l in range(top + 1))
        d = tuple(c.d(l).to_dense() if l < top else np.zeros((0, dims[l]), dtype=np.int64) for l in range(top + 1))
        act = tuple(tuple(c.module(l).act(g).to_dense() for g in maxideal_basis) for l in range(top + 1))
        return cls(c.p, top, dims, d, act)

    def summands(self, degree: int, n: int) -> list[tuple[tuple[int, ...], int, int]]:
        """``(index, offset, dim)`` in the same order as the full window layout."""
        out, off = [], 0
        for idx in compositions(degree, n, self.top):
            dim = int(np.prod([self.dims[l] for l in idx]))
            if dim:
                out.append((idx, off, dim))
                off += dim
        return out

    def total_dim(self, degree: int, n: int) -> int:
        return sum(dim for _, _, dim in self.summands(degree, n))


def _contract(op: np.ndarray, block: np.ndarray, shape, axis: int, p: int) -> np.ndarray:
    """Apply ``op`` to tensor axis ``axis`` of a flattened Kronecker block."""
    t = block.reshape(shape)
    out = np.tensordot(op, t, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis).reshape(-1) % p


def apply_differential(fd: FactorData, index, block: np.ndarray) -> dict[tuple[int, ...], np.ndarray]:
    """``d`` of a vector supported on one summand, as ``{target index: block}`` (zero blocks dropped)."""
    shape = [fd.dims[l] for l in index]
    out: dict[tuple[int, ...], np.ndarray] = {}
    partial = 0
    for m, l in enumerate(index):
        if l < fd.top and fd.dims[l + 1]:
            img = _contract(fd.d[l], block, shape, m, fd.p)
            if partial % 2:
                img = (-img) % fd.p
            if img.any():
                tgt = index[:m] + (l + 1,) + index[m + 1:]
                out[tgt] = (out.get(tgt, 0) + img) % fd.p
        partial += l
    return {k: v for k, v in out.items() if v.any()}


def apply_factor_action(fd: FactorData, index, block: np.ndarray, slot: int, g: int) -> np.ndarray:
    """Action of ``Phi_slot(g-th maxideal basis element)`` on a summand block (``slot`` 0-based)."""
    shape = [fd.dims[l] for l in index]
    return _contract(fd.act[index[slot]][g], block, shape, slot, fd.p)


@dataclass
class RestrictedResult:
    cycle_ok: bool
    annihilated_by_all_factors: bool
    boundary_witness_ok: bool
    obstruction_ok: bool
    restricted_dim: int
    rank_restricted: int
    rank_augmented: int
    window_dims: dict[str, int]
    hashes: dict[str, str]


def _sha(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(np.asarray(a, dtype=np.int64))
        h.update(np.array(a.shape, dtype=np.int64).tobytes())
        h.update(a.tobytes())
    return h.hexdigest()


def kernel_of_S_part(fd: FactorData, s_index, n_gens: int) -> np.ndarray:
    """Rows spanning ``ker C`` on ``W = (x)_{j in S} I^{l_j}``."""
    dims = [fd.dims[l] for l in s_index]
    w = int(np.prod(dims))
    ops = []
    for pos, l in enumerate(s_index):
        for g in range(n_gens):
            factors = [Matrix.identity(x, fd.p) for x in dims]
            factors[pos] = Matrix.from_dense(fd.act[l][g], fd.p)
            ops.append(kron_all(factors).csr)
    if not ops:
        return np.eye(w, dtype=np.int64)
    return kernel_basis(Matrix(sp.vstack(ops).tocsr(), fd.p))


def restricted_dimension(fd: FactorData, n: int, q: int, degree: int, n_gens: int) -> int:
    cache: dict[tuple[int, ...], int] = {}
    total = 0
    for idx, _, _ in fd.summands(degree, n):
        s_idx = idx[q:]
        if s_idx not in cache:
            cache[s_idx] = len(kernel_of_S_part(fd, s_idx, n_gens))
        total += int(np.prod([fd.dims[l] for l in idx[:q]])) * cache[s_idx]
    return total


def estimate_restricted_bytes(ir_complex: CochainComplex, maxideal_basis, i: int) -> int:
    """Rough peak memory: Python dict rows during elimination dominate (~100 bytes per entry)."""
    fd = FactorData.from_complex(ir_complex, maxideal_basis)
    n, q = i * i + i, i * i
    cols = restricted_dimension(fd, n, q, i - 1, len(maxideal_basis))
    return 100 * cols * n * max(fd.dims) + 8 * fd.total_dim(i, n)


def restricted_differential(fd: FactorData, n: int, q: int, degree: int, n_gens: int):
    """``d`` on ``(+) U (x) ker C`` in degree ``degree``, as a sparse matrix into full ``J^{degree+1}``.

    Returns ``(D, basis_layout)``; ``basis_layout`` lists ``(index, column offset, KS rows)``.
    """
    p = fd.p
    tgt_pos = {idx: off for idx, off, _ in fd.summands(degree + 1, n)}
    rows_total = fd.total_dim(degree + 1, n)
    layout = []
    rr, cc, vv = [], [], []
    col = 0
    for idx, _, _ in fd.summands(degree, n):
        u_idx, s_idx = idx[:q], idx[q:]
        ks = kernel_of_S_part(fd, s_idx, n_gens)
        if not len(ks):
            continue
        u_dims = [fd.dims[l] for l in u_idx]
        s_dims = [fd.dims[l] for l in s_idx]
        du = int(np.prod(u_dims))
        ks_t = Matrix.from_dense(ks.T, p)
        ncols = du * ks.shape[0]
        layout.append((idx, col, ks))
        partial = 0
        for m, l in enumerate(idx):
            if l < fd.top and fd.dims[l + 1]:
                tgt = idx[:m] + (l + 1,) + idx[m + 1:]
                dm = Matrix.from_dense(fd.d[l], p)
                if m < q:
                    fu = [Matrix.identity(x, p) for x in u_dims]
                    fu[m] = dm
                    blk = kron_all(fu).kron(ks_t)
                else:
                    fs = [Matrix.identity(x, p) for x in s_dims]
                    fs[m - q] = dm
                    blk = Matrix.identity(du, p).kron(kron_all(fs) @ ks_t)
                if partial % 2:
                    blk = blk.scale(-1)
                coo = blk.csr.tocoo()
                rr.append(coo.row + tgt_pos[tgt])
                cc.append(coo.col + col)
                vv.append(coo.data)
            partial += l
        col += ncols
    if rr:
        mat = sp.coo_matrix((np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))), shape=(rows_total, col))
        d = Matrix(mat.tocsr(), p)
    else:
        d = Matrix.zeros(rows_total, col, p)
    return d, layout


def restricted_stage_check(
    ir_complex: CochainComplex,
    maxideal_basis: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    i: int,
) -> RestrictedResult:
    """Cycle, annihilation, explicit boundary witness and obstruction for stage ``i``."""
    fd = FactorData.from_complex(ir_complex, maxideal_basis)
    p = fd.p
    n, q = i * i + i, i * i
    n_gens = len(maxideal_basis)
    if fd.top < i + 1:
        raise ValueError(f"resolution must reach degree {i + 1}")

    lam_idx = (0,) * q + (1,) * i
    lam_block = vec_kron([a] * q + [b] * i, p)

    cycle_ok = not apply_differential(fd, lam_idx, lam_block)
    annihilated = all(
        not apply_factor_action(fd, lam_idx, lam_block, slot, g).any() for slot in range(n) for g in range(n_gens)
    )

    # d^0 beta = b exists because H^1(I) = 0; mu = a^q (x) beta (x) b^(i-1) then maps to lambda
    beta_set = solve_affine(ir_complex.d(0), b)
    witness_ok = False
    mu_hash = ""
    if beta_set is not None:
        beta = beta_set.particular
        mu_idx = (0,) * (q + 1) + (1,) * (i - 1)
        mu_block = vec_kron([a] * q + [beta] + [b] * (i - 1), p)
        image = apply_differential(fd, mu_idx, mu_block)
        witness_ok = set(image) == {lam_idx} and np.array_equal(image[lam_idx], lam_block)
        mu_hash = _sha(mu_block)

    d_k, layout = restricted_differential(fd, n, q, i - 1, n_gens)
    lam_full = np.zeros(d_k.rows, dtype=np.int64)
    off = {idx: o for idx, o, _ in fd.summands(i, n)}[lam_idx]
    lam_full[off: off + lam_block.size] = lam_block
    dt = d_k.T
    r_plain = rank(dt, backend="sparse")
    aug = Matrix(sp.vstack([dt.csr, sp.csr_matrix(lam_full.reshape(1, -1))]).tocsr(), p)
    r_aug = rank(aug, backend="sparse")
    return RestrictedResult(
        cycle_ok=cycle_ok,
        annihilated_by_all_factors=annihilated,
        boundary_witness_ok=witness_ok,
        obstruction_ok=r_aug > r_plain,
        restricted_dim=d_k.cols,
        rank_restricted=r_plain,
        rank_augmented=r_aug,
        window_dims={str(t): fd.total_dim(t, n) for t in (i - 1, i, i + 1)},
        hashes={
            "restricted_d": d_k.digest(),
            "lambda": _sha(lam_full),
            "mu_witness": mu_hash,
            "a": _sha(a),
            "b": _sha(b),
        },
    )

