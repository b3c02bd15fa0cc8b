import numpy as np
import pytest

from homcert.complexes import (
    Cochain,
    CochainComplex,
    cohomology_dim,
    compositions,
    concentrated,
    finite_sum,
    preimage_set,
    shift,
    tensor_complexes,
    tensor_power_window,
    truncate_geq,
)
from homcert.errors import DimensionMismatch, NotACycle
from homcert.linalg import Matrix
from homcert.modules import residue_module
from homcert.resolution import resolve_residue

from conftest import trunc


@pytest.fixture(scope="module")
def inj2():
    return resolve_residue(trunc(2, 2), 4)[1].complex


def test_compositions_lexicographic():
    assert list(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert list(compositions(3, 2, max_part=2)) == [(1, 2), (2, 1)]
    assert list(compositions(-1, 3)) == []


def test_shift_convention():
    k = residue_module(trunc(2, 2))
    c = shift(concentrated(k, 0), 3)
    assert c.degree_range == (-3, -3)


def test_shift_negates_differential():
    a = trunc(3, 3)
    _, ir = resolve_residue(a, 2)
    s = shift(ir.complex, 1)
    assert s.d(-1) == ir.complex.d(0).scale(-1)
    assert s.check_d_squared()


def test_shape_mismatch_rejected():
    k = residue_module(trunc(2, 2))
    with pytest.raises(DimensionMismatch):
        CochainComplex(k.algebra, {0: k, 1: k}, {0: Matrix.zeros(2, 1, 2)})


def test_binary_tensor_matches_window(inj2):
    binary = tensor_complexes(tensor_complexes(inj2, inj2), inj2)
    window = tensor_power_window(inj2, 3, [0, 1, 2, 3])
    for n in (0, 1, 2):
        assert binary.d(n) == window.d(n)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_tensor_powers_resolve_k(inj2, n):
    w = tensor_power_window(inj2, n, [0, 1, 2, 3, 4])
    assert w.check_d_squared() and w.check_module_maps() and w.check_summand_support()
    assert [cohomology_dim(w, t) for t in range(4)] == [1, 0, 0, 0]


def test_window_dimensions(inj2):
    w = tensor_power_window(inj2, 2, [0, 1, 2, 3])
    assert [w.dim(t) for t in range(4)] == [4, 8, 12, 16]


def test_preimage_set_and_errors(inj2):
    w = tensor_power_window(inj2, 2, [0, 1, 2])
    z = Cochain(w, 1, w.d(0) @ np.array([0, 1, 0, 0]))
    s = preimage_set(w, z)
    assert s is not None and s.contains(np.array([0, 1, 0, 0])) and s.dim == 1
    # degree 0 of J has no predecessor: a nonzero cycle there is never a boundary
    unit = Cochain(w, 0, np.array([1, 0, 0, 0]))
    assert unit.is_cycle() and preimage_set(w, unit) is None
    with pytest.raises(NotACycle):
        preimage_set(w, Cochain(w, 0, np.array([0, 0, 0, 1])))


def test_finite_sum_of_shifts_has_no_h0():
    k = residue_module(trunc(2, 2))
    c = finite_sum([shift(concentrated(k, 0), i) for i in range(1, 5)])
    assert cohomology_dim(c, 0) == 0
    assert [cohomology_dim(c, -i) for i in range(1, 5)] == [1, 1, 1, 1]


def test_truncation_kills_low_cohomology():
    a = trunc(3, 3)
    _, ir = resolve_residue(a, 3)
    p_complex = shift(ir.complex, -2)  # I placed in degrees 2..5
    t = truncate_geq(p_complex, 3)
    assert t.check_d_squared()
    assert [cohomology_dim(t, n) for n in range(3, 5)] == [0, 0]
    c = shift(ir.complex, 0)
    assert cohomology_dim(truncate_geq(c, 0), 0) == 1
