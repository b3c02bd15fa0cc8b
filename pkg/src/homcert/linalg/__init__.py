"""Exact linear algebra over prime fields."""

from homcert.linalg._kernels import USE_NUMBA, warm_up
from homcert.linalg.field import PrimeField, is_prime
from homcert.linalg.matrix import Matrix, block_diag, hstack, kron_all, vec_kron, vstack
from homcert.linalg.solve import (
    RREF,
    AffineSolutionSet,
    column_space_basis,
    complement_positions,
    intersect_affine_with_kernel,
    kernel_basis,
    rank,
    row_space,
    rref_rank,
    solve_affine,
    current_backend,
    use_backend,
)

__all__ = [
    "USE_NUMBA",
    "warm_up",
    "PrimeField",
    "is_prime",
    "Matrix",
    "block_diag",
    "hstack",
    "kron_all",
    "vec_kron",
    "vstack",
    "RREF",
    "AffineSolutionSet",
    "column_space_basis",
    "complement_positions",
    "intersect_affine_with_kernel",
    "kernel_basis",
    "rank",
    "row_space",
    "rref_rank",
    "solve_affine",
    "current_backend",
    "use_backend",
]
