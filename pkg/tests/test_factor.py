import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensordmd.errors import DefectiveMatrixWarning, RankRequestTooLarge, ShapeMismatch
from tensordmd.factor import (singular_tube_norms, tevd, truncation_error, tsvd, tubal_rank)
from tensordmd.tensor_core import bcirc, fro_norm, t_identity
from tensordmd.tprod import is_t_orthogonal, t_inverse, t_transpose, tprod, tprod_chain

from conftest import rand


def test_tsvd_identity():
    f = tsvd(t_identity(3, 4))
    np.testing.assert_allclose(f.tube_norms, np.ones(3))
    np.testing.assert_allclose(f.S, t_identity(3, 4), atol=1e-14)


def test_tsvd_single_slice_equals_matrix_svd():
    x = rand((4, 3, 1), 1)
    f = tsvd(x)
    np.testing.assert_allclose(np.diag(f.S[:, :, 0]), np.linalg.svd(x[:, :, 0], compute_uv=False))


def test_tsvd_is_not_svd_of_block_circulant():
    x = rand((3, 2, 4), 2)
    full = np.linalg.svd(bcirc(x), compute_uv=False)
    tubes = tsvd(x).tube_norms
    assert len(full) == 8 and len(tubes) == 2
    # bcirc spectrum is the union of per-slice spectra, not the tube norms
    assert not np.allclose(np.sort(full)[::-1][:2], tubes)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 6), st.integers(0, 2 ** 32))
def test_tsvd_reconstructs_with_orthogonal_factors(n, h, m, seed):
    x = rand((n, h, m), seed)
    f = tsvd(x)
    assert np.isrealobj(f.U) and np.isrealobj(f.S)
    assert fro_norm(f.reconstruct() - x) <= 1e-10 * max(fro_norm(x), 1e-300)
    k = f.U.shape[1]
    np.testing.assert_allclose(tprod(t_transpose(f.U), f.U), t_identity(k, m), atol=1e-10)
    np.testing.assert_allclose(tprod(t_transpose(f.V), f.V), t_identity(k, m), atol=1e-10)
    assert np.all(np.diff(f.tube_norms) <= 1e-12)


def test_tsvd_full_and_truncate_modes():
    x = rand((4, 3, 5), 3)
    full = tsvd(x, mode="full")
    assert full.U.shape == (4, 4, 5) and full.V.shape == (3, 3, 5)
    assert is_t_orthogonal(full.U) and is_t_orthogonal(full.V)
    np.testing.assert_allclose(full.reconstruct(), x, atol=1e-12)
    tr = tsvd(x, mode="truncate", k=2)
    assert tr.U.shape == (4, 2, 5)
    with pytest.raises(RankRequestTooLarge):
        tsvd(x, mode="truncate", k=4)


def test_tubal_rank():
    assert tubal_rank(t_identity(3, 4)) == 3
    assert tubal_rank(np.zeros((3, 3, 4))) == 0
    a = rand((4, 1, 5), 4)
    b = rand((1, 3, 5), 5)
    assert tubal_rank(tprod(a, b)) == 1


def test_truncation_error_examples():
    x = t_identity(3, 4)
    assert truncation_error(x, 3) == pytest.approx(0.0, abs=1e-12)
    assert truncation_error(x, 0) == pytest.approx(fro_norm(x))
    with pytest.raises(RankRequestTooLarge):
        truncation_error(x, 5)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.integers(2, 5), st.integers(1, 5), st.integers(0, 2 ** 32))
def test_truncation_error_matches_tail_energy(n, h, m, seed):
    x = rand((n, h, m), seed)
    f = tsvd(x)
    for k in range(len(f.tube_norms) + 1):
        tail = np.sqrt(np.sum(f.tube_norms[k:] ** 2))
        assert abs(truncation_error(x, k) - tail) <= 1e-8 * max(fro_norm(x), 1.0)


def test_tube_norms_invariant_under_orthogonal_multiplication():
    x = rand((4, 3, 5), 6)
    q = tsvd(rand((4, 4, 5), 7), mode="full").U
    np.testing.assert_allclose(singular_tube_norms(tprod(q, x)), singular_tube_norms(x), rtol=1e-10)


def test_tevd_scalar_multiple_of_identity():
    f = tevd(2.5 * t_identity(3, 4))
    np.testing.assert_allclose(f.d_hat, 2.5)
    np.testing.assert_allclose(f.D, 2.5 * t_identity(3, 4), atol=1e-14)


def test_tevd_single_slice_equals_evd():
    a = rand((4, 4, 1), 8)
    f = tevd(a)
    ev = np.linalg.eigvals(a[:, :, 0])
    np.testing.assert_allclose(np.sort_complex(f.d_hat[:, 0]), np.sort_complex(ev), atol=1e-12)


@pytest.mark.parametrize("m", [1, 2, 5, 6])
def test_tevd_residual_and_reconstruction(m):
    a = rand((4, 4, m), 9 + m)
    f = tevd(a)
    lhs, rhs = tprod(a, f.W), tprod(f.W, f.D)
    assert fro_norm(lhs - rhs) <= 1e-7 * fro_norm(a)
    back = tprod_chain(f.W, f.D, t_inverse(f.W))
    assert fro_norm(back - a) <= 1e-8 * fro_norm(a)


def test_tevd_needs_square():
    with pytest.raises(ShapeMismatch):
        tevd(rand((3, 2, 2), 1))


def test_tevd_defective_warns():
    a = np.zeros((2, 2, 2))
    a[:, :, 0] = [[1.0, 1.0], [0.0, 1.0]]
    with pytest.warns(DefectiveMatrixWarning):
        f = tevd(a)
    assert f.any_defective
