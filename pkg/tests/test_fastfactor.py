import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asptk.fastfactor import (
    FactorizationError,
    FactorPlan,
    appendix_check,
    basischange_a2,
    basischange_c2,
    factor_bottom_up,
    factor_top_down,
    match_points,
    merge_permutations,
    nnz_ratio,
    recursive_plan,
    verify_plan,
)
from asptk.jsonio import dumps
from asptk.models import fourier_dense, model_a2, model_c2, model_dct3, model_dft, model_hex
from asptk.sparse import SparseMatrix

I = 1j


def test_identity_plan():
    p = FactorPlan("dft", 1, (SparseMatrix.identity(3),), ("permutation",))
    assert verify_plan(p, np.eye(3)).max_abs_error == 0


def test_plan_validation():
    with pytest.raises(ValueError):
        FactorPlan("x", 1, (SparseMatrix.identity(2),), ("mystery",))
    with pytest.raises(ValueError):
        FactorPlan("x", 1, (SparseMatrix.identity(2), SparseMatrix.identity(3)), ("diag", "diag"))
    with pytest.raises(ValueError):
        verify_plan(FactorPlan("x", 1, (SparseMatrix.identity(2),), ("diag",)), np.eye(3))


def test_verify_raises_with_tolerance():
    p = FactorPlan("x", 1, (SparseMatrix.diag([1, 2]),), ("diag",))
    with pytest.raises(FactorizationError):
        verify_plan(p, np.eye(2), tol=1e-9)


def test_bottom_up_dft_plus_sign():
    # the conjugate convention puts exp(+2 pi i / 4) in the routing factor
    p = factor_bottom_up(model_dft(4, sign=1))
    assert np.array_equal(p.factors[0].to_dense()[1], [0, 1, 0, I])
    assert verify_plan(p, fourier_dense(model_dft(4, sign=1))).max_abs_error == 0


@pytest.mark.parametrize("n", [2, 6, 12, 16])
@pytest.mark.parametrize("build", [factor_bottom_up, factor_top_down])
def test_dft_plans(n, build):
    m = model_dft(n)
    assert verify_plan(build(m), fourier_dense(m)).rel_error < 1e-12


def test_odd_sizes_rejected():
    with pytest.raises(FactorizationError):
        factor_bottom_up(model_dft(5))
    with pytest.raises(FactorizationError):
        factor_top_down(model_c2(3))
    with pytest.raises(FactorizationError):
        factor_bottom_up(model_dct3(4))
    with pytest.raises(FactorizationError):
        recursive_plan(model_a2(6))


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_block_T_structure(n):
    p = factor_top_down(model_c2(n))
    sizes = p.meta["block_dims"]
    T = p.factors[p.roles.index("block_T")].to_dense()
    offs = np.concatenate([[0], np.cumsum(sizes)])
    for i, di in enumerate(sizes):
        for j, dj in enumerate(sizes):
            blk = T[offs[i] : offs[i + 1], offs[j] : offs[j + 1]]
            k = min(di, dj)
            c = blk[0, 0]
            expect = np.zeros((di, dj), complex)
            expect[:k, :k] = c * np.eye(k)
            assert np.allclose(blk, expect, atol=1e-14)


@pytest.mark.parametrize("n,dims", [(2, [1, 1, 1]), (4, [3, 3, 4]), (6, [6, 6, 9]), (8, [10, 10, 16])])
def test_c2_block_dims(n, dims):
    p = factor_top_down(model_c2(n))
    assert p.meta["block_dims"] == dims
    blocks = p.factors[p.roles.index("block_diag_fourier")].to_dense()
    offs = np.concatenate([[0], np.cumsum(dims)])
    for a, b in zip(offs, offs[1:]):
        assert np.linalg.cond(blocks[a:b, a:b]) < 1e8


@pytest.mark.parametrize("n", [2, 4, 6])
def test_a2_top_down_blocks(n):
    m = model_a2(n)
    p = factor_top_down(m)
    assert p.meta["block_dims"] == [(n // 2) ** 2] * 4
    assert verify_plan(p, fourier_dense(m)).rel_error < 1e-12


@pytest.mark.parametrize("model", [model_hex(4), model_hex(8), model_a2(4), model_dft(8)], ids=repr)
def test_routing_invariants(model):
    p = factor_bottom_up(model)
    R = p.factors[0]
    assert R.max_row_nnz() <= 4
    for route in p.meta.get("routes", []):
        # one target per point, every sub-point hit
        assert sorted(set(route)) == list(range(max(route) + 1))


def test_hex_basis_change_is_permutation():
    for N in (4, 8, 16):
        p = factor_bottom_up(model_hex(N))
        assert p.meta["B_is_permutation"] and p.factors[2].is_permutation()
        assert verify_plan(p, fourier_dense(model_hex(N))).rel_error < 1e-12


def test_match_points():
    t = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert match_points(np.array([[1.0, 1e-12], [0.0, 0.0]]), t).tolist() == [1, 0]
    with pytest.raises(FactorizationError):
        match_points(np.array([[0.5, 0.0]]), t)
    with pytest.raises(FactorizationError):
        match_points(np.array([[0.0, 0.0]]), np.array([[0.0, 0.0], [0.0, 1e-10]]))


@pytest.mark.parametrize("kind,m", [("A2", 1), ("A2", 2), ("A2", 3), ("C2", 1), ("C2", 2), ("C2", 3), ("C2", 4)])
def test_appendix_corrected_passes(kind, m):
    r = appendix_check(kind, m)
    assert r["failing"] == [] and r["max_error"] < 1e-9


def test_appendix_verbatim_failures_are_labelled():
    assert appendix_check("A2", 2, verbatim=True)["failing"] == [("III", "k+l=m"), ("III", "k=0")]
    assert appendix_check("C2", 2, verbatim=True)["failing"] == [("II", "k=0,2l=m"), ("III", "k=0,2l=m")]
    labels = appendix_check("C2", 3, verbatim=True)["failing"]
    assert ("III", "k+2l=m") in labels and ("II", "k=0,2l<m") in labels
    assert appendix_check("A2", 1, verbatim=True)["failing"] == []


def test_basischange_shapes():
    B = basischange_a2(2)
    assert B.shape == (16, 16)
    # region I columns are unit vectors
    assert np.array_equal(B.to_dense()[:, 0], np.eye(16)[:, 0])
    C = basischange_c2(2)
    assert C.shape == (10, 10)
    assert basischange_c2(1).is_identity()


def test_recursive_dft4_is_two_level():
    p = recursive_plan(model_dft(4))
    assert np.array_equal(p.product(), fourier_dense(model_dft(4)))
    assert p.nnz == factor_bottom_up(model_dft(4)).nnz


@pytest.mark.parametrize("name,n", [("dft", 64), ("a2", 8), ("c2", 16), ("a2", 1), ("c2", 1)])
def test_recursive_plans(name, n):
    m = {"dft": model_dft, "a2": model_a2, "c2": model_c2}[name](n)
    p = recursive_plan(m)
    assert verify_plan(p, fourier_dense(m)).rel_error < 1e-9
    assert nnz_ratio(p) < 32


def test_dft_ratio_decreases():
    r = [nnz_ratio(recursive_plan(model_dft(n))) for n in (8, 32, 128)]
    assert r[0] > r[1] > r[2]


def test_merge_permutations():
    P = SparseMatrix.permutation([1, 0, 2])
    D = SparseMatrix.diag([1, 2, 3])
    out = merge_permutations([(P, "permutation"), (P, "permutation"), (D, "diag")])
    assert len(out) == 1 and out[0][1] == "diag"
    out = merge_permutations([(SparseMatrix.identity(3), "permutation")])
    assert len(out) == 1


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_plan_apply_matches_dense(k, seed):
    m = model_dft(2**k)
    p = recursive_plan(m)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(m.size) + 1j * rng.standard_normal(m.size)
    assert np.allclose(p.apply(v), fourier_dense(m) @ v, atol=1e-9 * m.size)


def test_plan_json():
    d = json.loads(dumps(factor_bottom_up(model_dft(4)).to_json()))
    assert d["model"] == "dft" and d["n"] == 4
    roles = [f["role"] for f in d["factors"]]
    assert roles == ["routing_scaled", "block_diag_fourier", "permutation"]
    coo = d["factors"][2]["coo"]
    assert coo == sorted(coo)
    assert coo[1] == [1, 2, 1.0, 0.0]
