import numpy as np
import pytest

from homcert.errors import NotDualizable
from homcert.modules import direct_sum, injective_envelope, regular_module, residue_module
from homcert.resolution import (
    certify_envelope,
    check_injective_resolution,
    dualize_to_injective_resolution,
    minimal_free_resolution,
    resolve_residue,
)

from conftest import sq0, trunc


def test_dual_numbers_resolution():
    res = minimal_free_resolution(residue_module(trunc(2, 2)), 4)
    assert res.ranks == (1, 1, 1, 1, 1)
    for i in range(1, 5):
        assert res.entries[i][0, 0].tolist() == [0, 1]


def test_cube_truncation_alternates():
    a = trunc(3, 3)
    res = minimal_free_resolution(residue_module(a), 4)
    x, x2 = a.element("x").tolist(), a.element("x^2").tolist()
    assert [res.entries[i][0, 0].tolist() for i in range(1, 5)] == [x, x2, x, x2]


def test_square_zero_ranks_grow():
    res = minimal_free_resolution(residue_module(sq0(2, 2)), 3)
    assert res.ranks == (1, 2, 4, 8)
    assert res.is_minimal() and res.check_exact()


def test_minimal_and_exact(preset):
    res = minimal_free_resolution(residue_module(preset), 4)
    assert res.is_minimal() and res.check_exact()
    assert not any(res.unit_components())


def test_free_module_resolves_in_one_step(preset):
    res = minimal_free_resolution(regular_module(preset), 2)
    assert res.ranks == (1, 0, 0)


def test_injective_resolution(preset):
    _, ir = resolve_residue(preset, 3)
    assert check_injective_resolution(ir)
    assert ir.coaugmentation.cols == 1


def test_certify_envelope_rejects_wrong_modules():
    a = trunc(2, 2)
    with pytest.raises(NotDualizable):
        certify_envelope(residue_module(a))
    with pytest.raises(NotDualizable):
        certify_envelope(direct_sum([residue_module(a)] * 2))
    res = minimal_free_resolution(residue_module(a), 2)
    with pytest.raises(NotDualizable):
        dualize_to_injective_resolution(res, residue_module(a))
    certify_envelope(injective_envelope(a))


def test_coaugmentation_lands_in_socle():
    a = trunc(2, 4)
    _, ir = resolve_residue(a, 2)
    v = ir.coaugmentation.to_dense()[:, 0]
    assert np.flatnonzero(v).tolist() == [0]
