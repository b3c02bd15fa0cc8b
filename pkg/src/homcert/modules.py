"""Finite-dimensional modules over :class:`FiniteDimAlgebra`.

A module is a vector space with one action matrix per algebra basis element.
Action matrices may be supplied eagerly or produced on demand (tensor and
direct-sum modules over large tensor powers are never fully materialised).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from homcert.algebra import AlgebraMorphism, FiniteDimAlgebra, tensor_algebra, verify_local
from homcert.errors import BudgetExceeded, DimensionMismatch, FieldMismatch, NotLocal, ValidationError
from homcert.linalg import (
    Matrix,
    block_diag,
    complement_positions,
    kernel_basis,
    rank,
    row_space,
    vstack,
)


class FDModule:
    def __init__(
        self,
        algebra: FiniteDimAlgebra,
        dim: int,
        action: Sequence[Matrix] | Callable[[int], Matrix],
        *,
        name: str | None = None,
        labels: Sequence[str] | None = None,
    ):
        self.algebra = algebra
        self.p = algebra.p
        self.dim = int(dim)
        self.name = name or f"module(dim={self.dim})"
        self.labels = tuple(labels) if labels is not None else None
        if callable(action):
            self._action_fn = action
            self._action = {}
        else:
            mats = list(action)
            if len(mats) != algebra.dim:
                raise DimensionMismatch(f"need {algebra.dim} action matrices, got {len(mats)}")
            self._action_fn = None
            self._action = dict(enumerate(mats))
        self._generator_ops = None

    def __repr__(self):
        return f"FDModule({self.name}, dim={self.dim}, over {self.algebra.name})"

    def action(self, u: int) -> Matrix:
        m = self._action.get(u)
        if m is None:
            m = self._action_fn(u)
            if m.shape != (self.dim, self.dim):
                raise DimensionMismatch(f"action matrix has shape {m.shape}, module dim is {self.dim}")
            self._action[u] = m
        return m

    def act(self, a) -> Matrix:
        """Matrix by which the algebra element with coordinates ``a`` acts."""
        a = self.algebra.field.vector(a)
        out = Matrix.zeros(self.dim, self.dim, self.p)
        for u in np.flatnonzero(a):
            out = out + self.action(int(u)).scale(int(a[u]))
        return out

    def generator_operators(self) -> list[Matrix]:
        """Action of each row of ``algebra.algebra_generators()``."""
        if self._generator_ops is None:
            self._generator_ops = [self.act(g) for g in self.algebra.algebra_generators()]
        return self._generator_ops

    def verify(self) -> None:
        """Exhaustive check: unit acts as identity and ``act(u) act(v) = act(uv)``."""
        alg = self.algebra
        if self.act(alg.unit) != Matrix.identity(self.dim, self.p):
            raise ValidationError("unit does not act as the identity")
        for u in range(alg.dim):
            au = self.action(u)
            for v in range(alg.dim):
                uv = alg.left_mult(u) @ alg.basis_vector(v)
                if au @ self.action(v) != self.act(uv):
                    raise ValidationError(f"action incompatible with structure constants at ({u}, {v})")


@dataclass(frozen=True)
class ModuleMap:
    source: FDModule
    target: FDModule
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise DimensionMismatch(f"map matrix {self.matrix.shape} vs modules {self.target.dim}x{self.source.dim}")

    def __call__(self, v) -> np.ndarray:
        return self.matrix @ v

    def is_linear_over_algebra(self) -> bool:
        gens = self.source.algebra.algebra_generators()
        for g in gens:
            if self.matrix @ self.source.act(g) != self.target.act(g) @ self.matrix:
                return False
        return True


@dataclass(frozen=True)
class AnnihilationProfile:
    element: np.ndarray = field(repr=False)
    active_factors: frozenset[int]

    @property
    def is_trivial(self) -> bool:
        return not self.active_factors


# locality -----------------------------------------------------------------------

_LOCAL_OK: dict[int, object] = {}


def require_local(a: FiniteDimAlgebra):
    """Locality certificate for ``a`` (for tensor powers: one per base factor)."""
    key = id(a)
    if key not in _LOCAL_OK:
        if a.factors:
            cert = tuple(verify_local(f) for f in dict.fromkeys(a.factors))
        else:
            cert = verify_local(a)
        _LOCAL_OK[key] = (a, cert)
    return _LOCAL_OK[key][1]


# constructions --------------------------------------------------------------------


def regular_module(a: FiniteDimAlgebra) -> FDModule:
    return FDModule(a, a.dim, a.left_mult, name=f"regular({a.name})", labels=a.basis_labels)


def augmentation(a: FiniteDimAlgebra) -> np.ndarray:
    """The functional ``R -> R/m = k`` sending the unit to 1."""
    require_local(a)
    m = a.maxideal_basis
    cols = np.vstack([m, a.unit]) if len(m) else a.unit.reshape(1, -1)
    rhs = np.zeros(len(cols), dtype=np.int64)
    rhs[-1] = 1
    from homcert.linalg import solve_affine

    sol = solve_affine(Matrix.from_dense(cols, a.p), rhs)
    if sol is None or sol.dim:
        raise NotLocal("maximal ideal does not have codimension 1")
    return sol.particular


def residue_module(a: FiniteDimAlgebra) -> FDModule:
    """``k = R/m``: one-dimensional, ``m`` acts as zero."""
    eps = augmentation(a)
    return FDModule(
        a,
        1,
        lambda u: Matrix.from_dense([[int(eps[u])]], a.p),
        name=f"k({a.name})",
        labels=("1",),
    )


def direct_sum(modules: Sequence[FDModule], name: str | None = None) -> FDModule:
    modules = list(modules)
    if not modules:
        raise ValueError("direct_sum of an empty list needs an explicit algebra; use zero_module")
    alg = modules[0].algebra
    for m in modules[1:]:
        if m.algebra is not alg:
            raise FieldMismatch("direct summands must share one algebra object")
    dim = sum(m.dim for m in modules)
    labels = None
    if all(m.labels for m in modules):
        labels = [f"{lab}[{k}]" for k, m in enumerate(modules) for lab in m.labels] if len(modules) > 1 else modules[0].labels
    return FDModule(
        alg,
        dim,
        lambda u: block_diag([m.action(u) for m in modules]),
        name=name or " ⊕ ".join(m.name for m in modules),
        labels=labels,
    )


def zero_module(a: FiniteDimAlgebra) -> FDModule:
    return FDModule(a, 0, lambda u: Matrix.zeros(0, 0, a.p), name="0", labels=())


def free_module(a: FiniteDimAlgebra, r: int) -> FDModule:
    if r == 0:
        return zero_module(a)
    reg = regular_module(a)
    return direct_sum([reg] * r, name=f"{a.name}^{r}")


def matlis_dual(m: FDModule) -> FDModule:
    """``Hom_k(M, k)`` with ``(a f)(r) = f(a r)``; action matrices are transposes."""
    labels = tuple(f"{lab}*" for lab in m.labels) if m.labels else None
    return FDModule(m.algebra, m.dim, lambda u: m.action(u).T, name=f"dual({m.name})", labels=labels)


def injective_envelope(a: FiniteDimAlgebra) -> FDModule:
    """``E(k)`` realised as the dual of the regular module."""
    require_local(a)
    return matlis_dual(regular_module(a))


def tensor_module(m: FDModule, n: FDModule, algebra: FiniteDimAlgebra | None = None) -> FDModule:
    """``M (x)_k N`` over ``A (x)_k B``; actions are Kronecker products."""
    if m.p != n.p:
        raise FieldMismatch(f"F_{m.p} vs F_{n.p}")
    alg = algebra or tensor_algebra(m.algebra, n.algebra)
    db = n.algebra.dim
    labels = None
    if m.labels is not None and n.labels is not None:
        labels = [f"{x}⊗{y}" for x in m.labels for y in n.labels]
    return FDModule(
        alg,
        m.dim * n.dim,
        lambda u: m.action(u // db).kron(n.action(u % db)),
        name=f"{m.name}⊗{n.name}",
        labels=labels,
    )


def _stack_ops(ops: Sequence[Matrix], dim: int, p: int) -> Matrix:
    return vstack(ops) if ops else Matrix.zeros(0, dim, p)


def socle(m: FDModule) -> np.ndarray:
    """Rows form a basis of ``{v : g v = 0 for every generator g of the maximal ideal}``."""
    require_local(m.algebra)
    if m.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return kernel_basis(_stack_ops(m.generator_operators(), m.dim, m.p))


def is_essential_over_socle(e: FDModule) -> bool:
    """Over a local algebra, ``e`` is an essential extension of ``k`` iff its socle is simple."""
    return len(socle(e)) == 1


def annihilation_profile(v, module: FDModule, embeddings: Sequence[AlgebraMorphism]) -> AnnihilationProfile:
    """Factors ``j`` (1-based, in list order) whose ``Phi_j(m)`` moves ``v``."""
    v = np.asarray(v, dtype=np.int64) % module.p
    if v.shape[0] != module.dim:
        raise DimensionMismatch(f"element of length {v.shape[0]} in module of dim {module.dim}")
    active = set()
    for j, phi in enumerate(embeddings, start=1):
        if phi.target is not module.algebra:
            raise DimensionMismatch(f"embedding {j} does not land in the module's algebra")
        for g in phi.source.maxideal_basis:
            if (module.act(phi(g)) @ v).any():
                active.add(j)
                break
    return AnnihilationProfile(v, frozenset(active))


# hom spaces -----------------------------------------------------------------------


def _commutation_system(src_ops: Sequence[Matrix], tgt_ops: Sequence[Matrix], ds: int, dt: int, p: int) -> Matrix:
    # f (dt x ds), row-major vec: vec(f A) = (I_dt (x) A^T) vec f ; vec(B f) = (B (x) I_ds) vec f
    blocks = []
    eye_s, eye_t = Matrix.identity(ds, p), Matrix.identity(dt, p)
    for a, b in zip(src_ops, tgt_ops):
        blocks.append(eye_t.kron(a.T) - b.kron(eye_s))
    return _stack_ops(blocks, ds * dt, p)


def hom_space(m: FDModule, n: FDModule) -> list[Matrix]:
    """Basis of ``Hom_A(M, N)`` as ``n.dim x m.dim`` matrices."""
    if m.algebra is not n.algebra:
        raise FieldMismatch("modules live over different algebra objects")
    gens = m.algebra.algebra_generators()
    system = _commutation_system([m.act(g) for g in gens], [n.act(g) for g in gens], m.dim, n.dim, m.p)
    K = kernel_basis(system) if system.rows else np.eye(m.dim * n.dim, dtype=np.int64)
    return [Matrix.from_dense(k.reshape(n.dim, m.dim), m.p) for k in K]


def find_isomorphism(m: FDModule, n: FDModule, seed: int = 0, tries: int = 256) -> Matrix | None:
    """Search ``Hom_A(M, N)`` for an invertible map; ``None`` if none is found."""
    if m.dim != n.dim:
        return None
    basis = hom_space(m, n)
    if not basis:
        return None if m.dim else Matrix.zeros(0, 0, m.p)
    dense = [b.to_dense() for b in basis]
    for b in basis:
        if rank(b) == m.dim:
            return b
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        c = rng.integers(0, m.p, size=len(dense))
        cand = Matrix.from_dense(sum(int(ci) * d for ci, d in zip(c, dense)), m.p)
        if rank(cand) == m.dim:
            return cand
    return None


# quotients --------------------------------------------------------------------------


@dataclass(frozen=True)
class Quotient:
    module: FDModule
    projection: Matrix  # quotient.dim x ambient.dim
    section: Matrix  # ambient.dim x quotient.dim, coordinate inclusion of the complement


def quotient_module(m: FDModule, sub_rows: np.ndarray) -> Quotient:
    """``M / span(sub_rows)`` for a submodule; the complement uses non-pivot coordinates."""
    sub, pivots = row_space(sub_rows, m.p) if len(sub_rows) else (np.zeros((0, m.dim), dtype=np.int64), ())
    keep = complement_positions(pivots, m.dim)
    p = m.p
    # x = sum_r x[piv_r] sub_r + (x - ...) ; quotient coords = residual on keep columns
    proj = np.zeros((len(keep), m.dim), dtype=np.int64)
    for i, c in enumerate(keep):
        proj[i, c] = 1
    for r, c in enumerate(pivots):
        # eliminating the pivot coordinate subtracts x[c] * sub_r
        for i, k in enumerate(keep):
            proj[i, c] = (proj[i, c] - sub[r, k]) % p
    projection = Matrix.from_dense(proj, p) if len(keep) else Matrix.zeros(0, m.dim, p)
    sec = np.zeros((m.dim, len(keep)), dtype=np.int64)
    for i, k in enumerate(keep):
        sec[k, i] = 1
    section = Matrix.from_dense(sec, p) if len(keep) else Matrix.zeros(m.dim, 0, p)
    q = FDModule(
        m.algebra,
        len(keep),
        lambda u: projection @ m.action(u) @ section,
        name=f"{m.name}/sub",
        labels=[m.labels[k] for k in keep] if m.labels else None,
    )
    return Quotient(q, projection, section)


# Baer criterion ---------------------------------------------------------------------


@dataclass(frozen=True)
class BaerReport:
    passed: bool
    ideals_checked: int
    witness_ideal: np.ndarray | None = field(default=None, repr=False)
    witness_map: Matrix | None = field(default=None, repr=False)


def enumerate_ideals(a: FiniteDimAlgebra, budget: int = 200_000):
    """Yield every ideal of ``a`` as a reduced row basis.

    Breadth-first over minimal extensions ``I -> I + k s`` with ``s`` ranging
    over projective points of the socle of ``R/I``; every ideal is reached
    since ideals of a finite-length ring form chains of simple steps.
    """
    require_local(a)
    p = a.p
    reg = regular_module(a)
    start = np.zeros((0, a.dim), dtype=np.int64)
    seen = {start.tobytes(): start}
    frontier = [start]
    count = 0
    while frontier:
        nxt = []
        for ideal in frontier:
            count += 1
            if count > budget:
                raise BudgetExceeded(f"more than {budget} ideals in {a.name}")
            yield ideal
            if len(ideal) == a.dim:
                continue
            q = quotient_module(reg, ideal)
            soc = socle(q.module)
            lifts = soc @ q.section.to_dense().T % p
            for coeffs in _projective_points(len(soc), p):
                s = coeffs @ lifts % p
                grown, _ = row_space(np.vstack([ideal, s]) if len(ideal) else s.reshape(1, -1), p)
                key = grown.tobytes() + bytes([len(grown)])
                if key not in seen:
                    seen[key] = grown
                    nxt.append(grown)
        frontier = nxt


def _projective_points(k: int, p: int):
    for lead in range(k):
        for tail in itertools.product(range(p), repeat=k - lead - 1):
            v = np.zeros(k, dtype=np.int64)
            v[lead] = 1
            v[lead + 1:] = tail
            yield v


def baer_injectivity_test(e: FDModule, a: FiniteDimAlgebra | None = None, budget: int = 200_000, max_elements: int = 2**16) -> BaerReport:
    """Check that every ``A``-map ``I -> e`` from an ideal extends to ``A``.

    Extension is decided by comparing ``dim Hom_A(I, e)`` with the rank of
    the restriction ``e = Hom_A(A, e) -> Hom_A(I, e)``.
    """
    a = a or e.algebra
    if e.algebra is not a:
        raise FieldMismatch("module is not over the given algebra")
    if a.p ** a.dim > max_elements:
        raise BudgetExceeded(f"{a.name} has {a.p}^{a.dim} elements, above the {max_elements} limit")
    p = a.p
    gens = a.algebra_generators()
    e_ops = [e.act(g) for g in gens]
    reg_ops = [a.mult_operator(g) for g in gens]
    checked = 0
    for ideal in enumerate_ideals(a, budget=budget):
        checked += 1
        d = len(ideal)
        if d == 0:
            continue
        _, pivots = row_space(ideal, p)
        basis_t = Matrix.from_dense(ideal.T, p)
        # action of g on the ideal in its own coordinates: read pivot entries
        ideal_ops = [(op @ basis_t).submatrix(rows=list(pivots)) for op in reg_ops]
        system = _commutation_system(ideal_ops, e_ops, d, e.dim, p)
        hom = kernel_basis(system) if system.rows else np.eye(d * e.dim, dtype=np.int64)
        # restriction of v in e: the map b_i -> b_i . v, as a vector in vec-space
        restr_cols = []
        elem_ops = [e.act(b) for b in ideal]
        for k in range(e.dim):
            ek = np.zeros(e.dim, dtype=np.int64)
            ek[k] = 1
            f = np.column_stack([op @ ek for op in elem_ops])  # e.dim x d
            restr_cols.append(f.reshape(-1))
        restr = np.array(restr_cols)
        r_img = len(row_space(restr, p)[1]) if restr.any() else 0
        if r_img < len(hom):
            for h in hom:
                if len(row_space(np.vstack([restr, h]), p)[1]) > r_img:
                    return BaerReport(False, checked, ideal, Matrix.from_dense(h.reshape(e.dim, d), p))
    return BaerReport(True, checked)
