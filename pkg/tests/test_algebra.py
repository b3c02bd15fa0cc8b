import itertools

import numpy as np
import pytest

from homcert.algebra import (
    algebra_from_structure_constants,
    factor_embedding,
    field_algebra,
    ideal_product,
    stage_inclusion,
    tensor_algebra,
    tensor_power,
    verify_local,
)
from homcert.errors import IndexOutOfRange, InvalidExponent, NotAssociative, NotCommutative, NotLocal
from homcert.linalg import PrimeField

from conftest import sq0, trunc


def test_truncated_polynomial_basics():
    a = trunc(2, 2)
    x = a.element("x")
    assert a.dim == 2 and a.maxideal_basis.shape == (1, 2)
    assert not a.mult(x, x).any()
    b = trunc(3, 3)
    x = b.element("x")
    assert np.array_equal(b.mult(x, x), b.element("x^2"))
    assert not b.mult(x, b.element("x^2")).any()


def test_exponent_guard():
    with pytest.raises(InvalidExponent):
        trunc(2, 1)


@pytest.mark.parametrize("p,e,index", [(2, 2, 2), (3, 3, 3), (2, 4, 4)])
def test_nilpotency_index(p, e, index):
    cert = verify_local(trunc(p, e))
    assert cert.nilpotency_index == index and cert.codimension == 1


def test_tensor_square_has_index_three():
    a = trunc(2, 2)
    t = tensor_algebra(a, a)
    assert t.dim == 4 and len(t.maxideal_basis) == 3
    assert verify_local(t).nilpotency_index == 3


def test_field_is_local_with_zero_ideal():
    assert verify_local(field_algebra(PrimeField(5))).nilpotency_index == 1


def test_square_zero_algebra():
    a = sq0(2, 2)
    assert a.dim == 3
    m = a.maxideal_basis
    assert not ideal_product(a, m, m).any()


def test_tensor_with_field_is_identity_layout():
    a = trunc(3, 3)
    t = tensor_algebra(a, field_algebra(PrimeField(3)))
    assert t.mult_table() == a.mult_table()


def test_tensor_associativity_of_structure_constants():
    a, b, c = trunc(2, 2), trunc(2, 3), sq0(2, 2)
    left = tensor_algebra(tensor_algebra(a, b), c)
    right = tensor_algebra(a, tensor_algebra(b, c))
    assert left.mult_table() == right.mult_table()


def test_tensor_power_dimensions():
    a = trunc(2, 2)
    assert [tensor_power(a, n).dim for n in range(1, 6)] == [2, 4, 8, 16, 32]


def test_factor_embeddings_are_morphisms_and_commute():
    a = trunc(2, 2)
    n = 3
    phis = [factor_embedding(a, n, j) for j in range(1, n + 1)]
    for phi in phis:
        phi.verify()
    r = tensor_power(a, n)
    x = a.element("x")
    for i, j in itertools.combinations(range(n), 2):
        u, v = phis[i](x), phis[j](x)
        assert np.array_equal(r.mult(u, v), r.mult(v, u)) and r.mult(u, v).any()
    with pytest.raises(IndexOutOfRange):
        factor_embedding(a, n, n + 1)


def test_phi_on_two_factors_matches_labels():
    a = trunc(2, 2)
    r = tensor_power(a, 2)
    assert r.basis_labels[int(np.flatnonzero(factor_embedding(a, 2, 1)(a.element("x")))[0])] == "x⊗1"
    assert r.basis_labels[int(np.flatnonzero(factor_embedding(a, 2, 2)(a.element("x")))[0])] == "1⊗x"


def test_stage_inclusion_commutes_with_embeddings():
    a = trunc(3, 3)
    inc = stage_inclusion(a, 2)
    inc.verify()
    for j in (1, 2):
        for u in range(a.dim):
            e = a.basis_vector(u)
            assert np.array_equal(inc(factor_embedding(a, 2, j)(e)), factor_embedding(a, 3, j)(e))


def _dual_numbers_table(extra=()):
    return [(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), *extra]


def test_structure_constants_roundtrip():
    a = algebra_from_structure_constants(PrimeField(2), ["1", "x"], _dual_numbers_table(), [1, 0], [[0, 1]])
    assert a.mult_table() == trunc(2, 2).mult_table()


def test_rejects_noncommutative():
    with pytest.raises(NotCommutative):
        algebra_from_structure_constants(
            PrimeField(2), ["1", "x", "y"],
            [(0, v, v, 1) for v in range(3)] + [(1, 0, 1, 1), (2, 0, 2, 1), (1, 2, 1, 1)],
            [1, 0, 0], [[0, 1, 0], [0, 0, 1]],
        )


def test_rejects_bad_unit():
    with pytest.raises(NotAssociative):
        algebra_from_structure_constants(PrimeField(2), ["1", "x"], _dual_numbers_table(), [0, 1], [[0, 1]])


def test_rejects_non_nilpotent_ideal():
    # x^2 = x: idempotent, so (x) is not nilpotent
    with pytest.raises(NotLocal):
        algebra_from_structure_constants(
            PrimeField(2), ["1", "x"], _dual_numbers_table([(1, 1, 1, 1)]), [1, 0], [[0, 1]]
        )
