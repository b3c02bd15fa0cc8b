import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from homcert.errors import DimensionMismatch
from homcert.linalg import (
    Matrix,
    PrimeField,
    intersect_affine_with_kernel,
    is_prime,
    kernel_basis,
    kron_all,
    rank,
    rref_rank,
    solve_affine,
    use_backend,
    vec_kron,
)
from homcert.linalg import _kernels
from homcert.linalg.sparse import rows_to_dense, sparse_rref


def test_is_prime_small():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_field_inverse():
    f = PrimeField(7)
    assert all(a * f.inv(a) % 7 == 1 for a in range(1, 7))
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


def test_matrix_canonical_form_drops_zeros():
    m = Matrix.from_dense([[2, 0], [0, 3]], 2)
    assert m.entries() == {(1, 1): 1}
    assert m == Matrix.from_entries(2, 2, [(1, 1, 1), (0, 0, 4)], 2)
    assert m.digest() == Matrix.from_dense([[0, 0], [0, 1]], 2).digest()


def test_matmul_and_kron():
    a = Matrix.from_dense([[1, 2], [0, 1]], 3)
    b = Matrix.from_dense([[0, 1], [1, 0]], 3)
    assert np.array_equal((a @ b).to_dense(), np.array([[2, 1], [1, 0]]))
    k = kron_all([a, b])
    assert np.array_equal(k.to_dense(), np.kron(a.to_dense(), b.to_dense()) % 3)
    assert np.array_equal(vec_kron([np.array([1, 2]), np.array([0, 1])], 3), np.array([0, 1, 0, 2]))


def test_solve_affine_known_system():
    s = solve_affine(Matrix.from_dense([[1, 1]], 2), np.array([1]))
    assert s.dim == 1 and s.size() == 2
    assert {tuple(v) for v in s.members()} == {(1, 0), (0, 1)}
    meet = intersect_affine_with_kernel(s, Matrix.from_dense([[1, 0]], 2))
    assert meet.size() == 1 and tuple(next(meet.members())) == (0, 1)
    assert intersect_affine_with_kernel(s, Matrix.from_dense([[1, 1]], 2)) is None


def test_solve_affine_inconsistent_and_shape():
    assert solve_affine(Matrix.from_dense([[1, 0], [1, 0]], 2), np.array([0, 1])) is None
    with pytest.raises(DimensionMismatch):
        solve_affine(Matrix.from_dense([[1, 0]], 2), np.array([1, 1]))


def test_kernel_of_zero_matrix_is_everything():
    kb = kernel_basis(Matrix.zeros(2, 3, 5))
    assert kb.shape == (3, 3)


@pytest.mark.parametrize("order", ["columns", "rows"])
def test_numba_and_numpy_kernels_agree(order):
    rng = np.random.default_rng(7)
    for p in (2, 3, 5):
        a = rng.integers(0, p, size=(30, 45))
        out_np = _kernels.rref_dense(a, p, order=order, use_numba=False)
        out_nb = _kernels.rref_dense(a, p, order=order)
        assert np.array_equal(out_np[0], out_nb[0]) and out_np[1] == out_nb[1]


def test_sparse_rref_matches_dense():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 3, size=(20, 25)) * (rng.random((20, 25)) < 0.2)
    m = Matrix.from_dense(a, 3)
    rows, piv = sparse_rref(m)
    dense = rref_rank(m, backend="dense")
    assert tuple(piv) == dense.pivots
    assert np.array_equal(rows_to_dense(rows, 25), dense.reduced.to_dense()[: dense.rank])


def test_backend_context_manager():
    m = Matrix.from_dense([[1, 1], [1, 1]], 2)
    with use_backend("sparse"):
        assert rank(m) == 1
    with pytest.raises(ValueError):
        with use_backend("gpu"):
            pass


matrices = st.sampled_from([2, 3]).flatmap(
    lambda p: st.tuples(
        st.just(p),
        st.integers(1, 12).flatmap(
            lambda r: st.integers(1, 12).flatmap(lambda c: arrays(np.int64, (r, c), elements=st.integers(0, p - 1)))
        ),
    )
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_nullity_and_kernel(pm):
    p, a = pm
    m = Matrix.from_dense(a, p)
    kb = kernel_basis(m)
    assert rank(m) + len(kb) == a.shape[1]
    assert not ((a @ kb.T) % p).any()


@settings(max_examples=60, deadline=None)
@given(matrices, st.data())
def test_solutions_solve(pm, data):
    p, a = pm
    x = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=a.shape[1], max_size=a.shape[1])))
    b = a @ x % p
    s = solve_affine(Matrix.from_dense(a, p), b)
    assert s is not None and s.contains(x)
    assert np.array_equal(a @ s.particular % p, b)
