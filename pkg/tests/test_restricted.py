import numpy as np
import pytest

from homcert.complexes import tensor_power_window
from homcert.counterexample import build_stage, obstruction_matrix, run_stage, verify_stage_restricted
from homcert.linalg import kernel_basis
from homcert.resolution import resolve_residue
from homcert.restricted import (
    FactorData,
    apply_differential,
    apply_factor_action,
    restricted_differential,
    restricted_dimension,
)

from conftest import sq0, trunc


@pytest.fixture(scope="module", params=[(2, 2), (3, 3)])
def factor(request):
    p, e = request.param
    r1 = trunc(p, e)
    _, ir = resolve_residue(r1, 4)
    return r1, ir, FactorData.from_complex(ir.complex, r1.maxideal_basis)


def test_layout_matches_window(factor):
    _, ir, fd = factor
    w = tensor_power_window(ir.complex, 3, [1, 2])
    for t in (1, 2):
        assert [(s.index, s.offset, s.dim) for s in w.summands[t]] == fd.summands(t, 3)


def test_apply_differential_matches_matrix(factor):
    _, ir, fd = factor
    w = tensor_power_window(ir.complex, 3, [1, 2])
    rng = np.random.default_rng(1)
    tgt = {idx: off for idx, off, _ in fd.summands(2, 3)}
    for idx, off, dim in fd.summands(1, 3):
        block = rng.integers(0, fd.p, size=dim)
        full = np.zeros(w.dim(1), dtype=np.int64)
        full[off: off + dim] = block
        expected = w.d(1) @ full
        got = np.zeros(w.dim(2), dtype=np.int64)
        for t_idx, vec in apply_differential(fd, idx, block).items():
            got[tgt[t_idx]: tgt[t_idx] + vec.size] = vec
        assert np.array_equal(got, expected)


def test_factor_action_matches_module_action(factor):
    r1, ir, fd = factor
    from homcert.algebra import factor_embedding

    w = tensor_power_window(ir.complex, 2, [1])
    rng = np.random.default_rng(2)
    for idx, off, dim in fd.summands(1, 2):
        block = rng.integers(0, fd.p, size=dim)
        full = w.embed(1, idx, block)
        for slot in range(2):
            phi = factor_embedding(r1, 2, slot + 1)
            for g, gv in enumerate(r1.maxideal_basis):
                expected = (w.module(1).act(phi(gv)) @ full)[off: off + dim]
                assert np.array_equal(apply_factor_action(fd, idx, block, slot, g), expected)


def test_restricted_columns_span_kernel_of_B():
    r1 = trunc(2, 2)
    st = build_stage(r1, 2)
    fd = FactorData.from_complex(st.resolution.complex, r1.maxideal_basis)
    b = obstruction_matrix(st)
    assert restricted_dimension(fd, 6, 4, 1, 1) == len(kernel_basis(b))
    d_k, _ = restricted_differential(fd, 6, 4, 1, 1)
    assert d_k.shape == (st.window.dim(2), len(kernel_basis(b)))


@pytest.mark.parametrize("ring,i", [(lambda: trunc(2, 2), 1), (lambda: trunc(3, 3), 1), (lambda: trunc(2, 2), 2),
                                    (lambda: trunc(3, 3), 2), (lambda: sq0(2, 2), 1), (lambda: trunc(2, 3), 2)])
def test_restricted_agrees_with_full(ring, i):
    r1 = ring()
    full = run_stage(r1, i, method="full")
    small = run_stage(r1, i, method="restricted")
    for flag in ("cycle_ok", "annihilated_by_all_factors", "boundary_exists", "obstruction_ok"):
        assert getattr(full, flag) == getattr(small, flag) is True
    assert full.window_dims == small.window_dims
    assert full.hashes["lambda"] == small.hashes["lambda"]


def test_restricted_sweep():
    cert = run_stage(sq0(2, 2), 1, method="restricted", sweep=True)
    assert len(cert.b_sweep) == 3 and cert.all_ok


def test_restricted_budget():
    from homcert.errors import ResourceBudgetExceeded

    with pytest.raises(ResourceBudgetExceeded):
        verify_stage_restricted(trunc(2, 2), 2, budget=10)


def test_unknown_method():
    with pytest.raises(ValueError):
        run_stage(trunc(2, 2), 1, method="magic")
