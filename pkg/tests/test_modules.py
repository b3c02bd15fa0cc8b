import numpy as np
import pytest

from homcert.algebra import factor_embedding, tensor_algebra, tensor_power
from homcert.errors import DimensionMismatch
from homcert.linalg import Matrix
from homcert.modules import (
    annihilation_profile,
    baer_injectivity_test,
    direct_sum,
    enumerate_ideals,
    find_isomorphism,
    free_module,
    hom_space,
    injective_envelope,
    is_essential_over_socle,
    quotient_module,
    regular_module,
    residue_module,
    socle,
    tensor_module,
)

from conftest import sq0, trunc


def test_modules_verify(preset):
    for m in (regular_module(preset), residue_module(preset), injective_envelope(preset), free_module(preset, 2)):
        m.verify()


def test_envelope_socle_is_dual_of_unit(preset):
    e = injective_envelope(preset)
    soc = socle(e)
    assert len(soc) == 1
    unit_pos = int(np.flatnonzero(preset.unit)[0])
    assert np.flatnonzero(soc[0]).tolist() == [unit_pos]
    assert is_essential_over_socle(e)


def test_socle_of_regular_module_of_square_zero_ring():
    # soc(R) = m for R = k[x,y]/(x,y)^2, so R is not Gorenstein while E still has simple socle
    a = sq0(2, 2)
    assert len(socle(regular_module(a))) == 2
    assert len(socle(injective_envelope(a))) == 1


def test_hom_dimensions():
    a = trunc(3, 3)
    k, e, r = residue_module(a), injective_envelope(a), regular_module(a)
    assert len(hom_space(k, e)) == 1
    assert len(hom_space(r, r)) == 3
    assert len(hom_space(k, r)) == 1


def test_find_isomorphism_between_equal_modules_and_failure():
    a = trunc(2, 4)
    e = injective_envelope(a)
    assert find_isomorphism(e, e) is not None
    assert find_isomorphism(e, direct_sum([residue_module(a)] * 4)) is None


def test_truncated_algebras_are_self_injective():
    # k[x]/(x^e) is Frobenius, so E is isomorphic to the regular module
    a = trunc(3, 3)
    assert find_isomorphism(regular_module(a), injective_envelope(a)) is not None


def test_quotient_module():
    a = trunc(2, 4)
    r = regular_module(a)
    # (x^2) = span{x^2, x^3}; R/(x^2) has dim 2
    q = quotient_module(r, np.eye(4, dtype=np.int64)[2:])
    q.module.verify()
    assert q.module.dim == 2
    assert (q.projection @ q.section) == Matrix.identity(2, 2)


def test_ideal_enumeration_counts():
    assert len(list(enumerate_ideals(trunc(2, 4)))) == 5  # chain 0 ⊂ (x^3) ⊂ ... ⊂ R
    assert len(list(enumerate_ideals(sq0(2, 2)))) == 6  # 0, three lines in m, m, R


def test_baer_accepts_envelope_and_rejects_residue():
    a = trunc(2, 2)
    assert baer_injectivity_test(injective_envelope(a)).passed
    rep = baer_injectivity_test(residue_module(a))
    assert not rep.passed and rep.witness_ideal is not None


def test_tensor_of_envelopes_is_injective():
    a, b = trunc(2, 2), sq0(2, 2)
    t = tensor_algebra(a, b)
    ef = tensor_module(injective_envelope(a), injective_envelope(b), t)
    ef.verify()
    assert len(socle(ef)) == 1
    assert baer_injectivity_test(ef, t).passed
    assert find_isomorphism(injective_envelope(t), ef) is not None


def test_annihilation_profile():
    a = trunc(2, 2)
    r2 = tensor_power(a, 2)
    e2 = injective_envelope(r2)
    phis = [factor_embedding(a, 2, j) for j in (1, 2)]
    # dual basis vector of 1⊗1 is the socle: killed by both factors
    assert annihilation_profile(np.array([1, 0, 0, 0]), e2, phis).is_trivial
    # dual of x⊗x is moved by both
    assert annihilation_profile(np.array([0, 0, 0, 1]), e2, phis).active_factors == {1, 2}
    assert annihilation_profile(np.array([0, 1, 0, 0]), e2, phis).active_factors == {2}
    with pytest.raises(DimensionMismatch):
        annihilation_profile(np.array([1, 0]), e2, phis)
