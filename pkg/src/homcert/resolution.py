"""Minimal free resolutions and their Matlis-dual injective resolutions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from homcert.algebra import FiniteDimAlgebra
from homcert.complexes import CochainComplex, cohomology_dim
from homcert.errors import NotDualizable, ResolutionInvalid
from homcert.linalg import Matrix, kernel_basis, rank, row_space
from homcert.modules import (
    FDModule,
    augmentation,
    direct_sum,
    free_module,
    hom_space,
    is_essential_over_socle,
    require_local,
    zero_module,
)


@dataclass(frozen=True)
class FreeResolution:
    """``... -> P_2 -> P_1 -> P_0 -> M -> 0`` truncated at ``P_length``.

    ``entries[i]`` (for ``i >= 1``) is the ``rank_{i-1} x rank_i`` matrix of
    algebra elements describing ``P_i -> P_{i-1}``, stored as an array of shape
    ``(rank_{i-1}, rank_i, dim A)``.
    """

    module: FDModule
    ranks: tuple[int, ...]
    entries: dict[int, np.ndarray] = field(repr=False)
    maps: dict[int, Matrix] = field(repr=False)  # scalar matrix of P_i -> P_{i-1}
    augmentation: Matrix = field(repr=False)  # P_0 -> M

    @property
    def algebra(self) -> FiniteDimAlgebra:
        return self.module.algebra

    @property
    def length(self) -> int:
        return len(self.ranks) - 1

    def free(self, i: int) -> FDModule:
        return free_module(self.algebra, self.ranks[i])

    def as_cochain_complex(self) -> CochainComplex:
        """``P_i`` in degree ``-i``; the end at ``-length`` is left open."""
        mods = {-i: self.free(i) for i in range(self.length + 1)}
        diffs = {-i: self.maps[i] for i in range(1, self.length + 1)}
        return CochainComplex(self.algebra, mods, diffs, open_below=True, name="P")

    def is_minimal(self) -> bool:
        """Every matrix entry lies in the maximal ideal (augmentation value zero)."""
        eps = augmentation(self.algebra)
        return all(not (e @ eps % self.algebra.p).any() for e in self.entries.values())

    def unit_components(self) -> list[int]:
        """Coefficient of each matrix entry on the basis element carrying the unit."""
        unit_pos = int(np.flatnonzero(self.algebra.unit)[0])
        return [int(x) for e in self.entries.values() for x in e[..., unit_pos].reshape(-1)]

    def check_exact(self) -> bool:
        """Exact at ``P_1..P_{length-1}``, and ``P_0 -> M`` is onto with kernel ``im(P_1)``."""
        c = self.as_cochain_complex()
        for i in range(1, self.length):
            if cohomology_dim(c, -i):
                return False
        aug = self.augmentation
        if self.module.dim and rank(aug) != self.module.dim:
            return False
        if self.length >= 1:
            ker_dim = self.free(0).dim - (rank(aug) if aug.rows else 0)
            if rank(self.maps[1]) != ker_dim or not (aug @ self.maps[1]).is_zero():
                return False
        return True


def _minimal_generators(sub: np.ndarray, ops: list[Matrix], p: int) -> np.ndarray:
    """Rows of ``sub`` lifting a basis of ``sub / m sub`` (first-come order)."""
    msub = [op @ v for op in ops for v in sub]
    msub = [v for v in msub if v.any()]
    stack, _ = row_space(np.array(msub), p) if msub else (np.zeros((0, sub.shape[1]), dtype=np.int64), ())
    current = len(stack)
    gens = []
    for v in sub:
        trial = np.vstack([stack, v]) if len(stack) else v.reshape(1, -1)
        r = len(row_space(trial, p)[1])
        if r > current:
            gens.append(v)
            stack, current = trial, r
    return np.array(gens, dtype=np.int64).reshape(-1, sub.shape[1])


def minimal_free_resolution(m: FDModule, length: int) -> FreeResolution:
    """Resolve ``m`` by covering ``K/mK`` with a free module at each step.

    Ties are broken by basis order, so the result is deterministic.
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    alg = m.algebra
    require_local(alg)
    p = alg.p
    ranks = []
    entries = {}
    maps = {}
    ambient = m
    sub = np.eye(m.dim, dtype=np.int64)
    aug = None
    for i in range(length + 1):
        ops = ambient.generator_operators()
        gens = _minimal_generators(sub, ops, p) if len(sub) else np.zeros((0, ambient.dim), dtype=np.int64)
        r = len(gens)
        ranks.append(r)
        if r:
            cols = [ambient.action(w) @ g for g in gens for w in range(alg.dim)]
            cover = Matrix.from_columns(cols, ambient.dim, p)
        else:
            cover = Matrix.zeros(ambient.dim, 0, p)
        if i == 0:
            aug = cover
        else:
            maps[i] = cover
            # generator c of P_i sits in P_{i-1} = A^{r_{i-1}}; block b is an algebra element
            entries[i] = gens.reshape(r, ranks[i - 1], alg.dim).transpose(1, 0, 2).copy() if r else np.zeros(
                (ranks[i - 1], 0, alg.dim), dtype=np.int64
            )
        ambient = free_module(alg, r)
        sub = kernel_basis(cover) if r else np.zeros((0, 0), dtype=np.int64)
        if cover.rows == 0 and r:
            sub = np.eye(cover.cols, dtype=np.int64)
    return FreeResolution(m, tuple(ranks), entries, maps, aug)


@dataclass(frozen=True)
class InjectiveResolution:
    """``0 -> M -> I^0 -> I^1 -> ...`` with ``I^j = Hom_A(P_j, E)``."""

    complex: CochainComplex
    envelope: FDModule
    resolution: FreeResolution
    coaugmentation: Matrix = field(repr=False)  # Hom_A(M, E) -> I^0

    def ranks(self) -> tuple[int, ...]:
        return self.resolution.ranks


def certify_envelope(e: FDModule) -> None:
    """Raise unless ``e`` has simple socle and ``dim e = dim A``, which pins it down as ``E(k)``."""
    alg = e.algebra
    require_local(alg)
    if e.dim != alg.dim or not is_essential_over_socle(e):
        raise NotDualizable(f"{e.name} is not the injective envelope of the residue field")


def dualize_to_injective_resolution(res: FreeResolution, e: FDModule) -> InjectiveResolution:
    """Apply ``Hom_A(-, E)``: ``I^j = E^{rank_j}`` and ``I^j -> I^{j+1}`` is the transposed matrix acting on ``E``."""
    certify_envelope(e)
    alg = res.algebra
    p = alg.p
    mods = {}
    for j, r in enumerate(res.ranks):
        mods[j] = direct_sum([e] * r, name=f"E^{r}") if r else zero_module(alg)
    diffs = {}
    for j in range(res.length):
        ent = res.entries[j + 1]  # rank_j x rank_{j+1} x dim A
        rj, rj1 = res.ranks[j], res.ranks[j + 1]
        triples = []
        for c in range(rj1):
            for b in range(rj):
                blk = e.act(ent[b, c])
                for (u, v), val in blk.entries().items():
                    triples.append((c * e.dim + u, b * e.dim + v, val))
        diffs[j] = Matrix.from_entries(rj1 * e.dim, rj * e.dim, triples, p)
    complex_ = CochainComplex(alg, mods, diffs, open_above=True, name="I")
    # Hom_A(M, E) -> Hom_A(P_0, E): h -> (h(aug(e_c)))_c
    homs = hom_space(res.module, e)
    cols = []
    for h in homs:
        parts = []
        for c in range(res.ranks[0]):
            gen = np.zeros(res.ranks[0] * alg.dim, dtype=np.int64)
            gen[c * alg.dim: (c + 1) * alg.dim] = alg.unit
            parts.append(h @ (res.augmentation @ gen))
        cols.append(np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64))
    coaug = Matrix.from_columns(cols, mods[0].dim, p) if cols else Matrix.zeros(mods[0].dim, 0, p)
    return InjectiveResolution(complex_, e, res, coaug)


def check_injective_resolution(ir: InjectiveResolution) -> bool:
    """``H^0 = Hom(M, E)`` realised by the coaugmentation and ``H^j = 0`` for ``0 < j < length``."""
    c = ir.complex
    if not c.check_d_squared():
        return False
    if cohomology_dim(c, 0) != ir.coaugmentation.cols:
        return False
    if ir.coaugmentation.cols and rank(ir.coaugmentation) != ir.coaugmentation.cols:
        return False
    if not (c.d(0) @ ir.coaugmentation).is_zero():
        return False
    for j in range(1, ir.resolution.length):
        if cohomology_dim(c, j):
            return False
    return True


def resolve_residue(alg: FiniteDimAlgebra, length: int):
    """Minimal resolution of ``k`` and its dual injective resolution; raises if invalid."""
    from homcert.modules import injective_envelope, residue_module

    res = minimal_free_resolution(residue_module(alg), length)
    if not res.check_exact():
        raise ResolutionInvalid("free resolution is not exact")
    ir = dualize_to_injective_resolution(res, injective_envelope(alg))
    if not check_injective_resolution(ir):
        raise ResolutionInvalid("dual complex is not an injective resolution of k")
    return res, ir
