import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensordmd.errors import EmptyList, IndexOutOfRange, NotBlockCirculant, ShapeMismatch
from tensordmd.tensor_core import (bcirc, concat_mode2, fold, fro_norm, frontal_slice,
                                   real_part_checked, set_frontal_slice, t_identity,
                                   tube_norm, tube_norms, un_bcirc, unfold)

from conftest import rand

shapes = st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 5))


def test_layout_is_mode1_fastest():
    x = rand((3, 2, 4), 1)
    assert x.flags.f_contiguous
    flat = x.ravel(order="K")
    np.testing.assert_array_equal(flat[:6], x[:, :, 0].ravel(order="F"))


def test_frontal_slice_round_trip():
    x = rand((3, 2, 4), 2)
    y = set_frontal_slice(x, 3, np.ones((3, 2)))
    np.testing.assert_array_equal(frontal_slice(y, 3), np.ones((3, 2)))
    np.testing.assert_array_equal(frontal_slice(y, 1), frontal_slice(x, 1))
    # original untouched
    np.testing.assert_array_equal(x, rand((3, 2, 4), 2))
    with pytest.raises(IndexOutOfRange):
        frontal_slice(x, 5)
    with pytest.raises(IndexOutOfRange):
        frontal_slice(x, 0)


def test_real_part_checked():
    x = np.ones((2, 2, 2)) + 1e-14j
    np.testing.assert_array_equal(real_part_checked(x, 1e-12), np.ones((2, 2, 2)))
    from tensordmd.errors import NotRealizable
    with pytest.raises(NotRealizable):
        real_part_checked(np.ones((2, 2, 2)) + 1e-3j, 1e-12)


def test_bcirc_single_slice():
    x = rand((3, 2, 1), 3)
    np.testing.assert_array_equal(bcirc(x), x[:, :, 0])


def test_bcirc_identity():
    np.testing.assert_array_equal(bcirc(t_identity(2, 3)), np.eye(6))


def test_bcirc_tube_by_hand():
    x = np.array([1.0, 2.0, 3.0]).reshape(1, 1, 3)
    np.testing.assert_array_equal(bcirc(x), [[1, 3, 2], [2, 1, 3], [3, 2, 1]])


def test_un_bcirc():
    x = rand((3, 2, 4), 7)
    np.testing.assert_array_equal(un_bcirc(bcirc(x), 3, 2, 4), x)
    np.testing.assert_array_equal(un_bcirc(np.eye(6), 2, 2, 3, verify=True), t_identity(2, 3))
    b = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(un_bcirc(b, 2, 2, 1, verify=True)[:, :, 0], b)
    with pytest.raises(ShapeMismatch):
        un_bcirc(np.eye(5), 2, 2, 3)
    bad = bcirc(x)
    bad[0, -1] += 1.0
    with pytest.raises(NotBlockCirculant):
        un_bcirc(bad, 3, 2, 4, verify=True)


def test_unfold_examples():
    np.testing.assert_array_equal(unfold(np.array([1.0, 2.0, 3.0]).reshape(1, 1, 3)),
                                  [[1.0], [2.0], [3.0]])
    np.testing.assert_array_equal(unfold(t_identity(2, 2)), np.vstack([np.eye(2), np.zeros((2, 2))]))
    x = rand((4, 3, 5), 9)
    np.testing.assert_array_equal(fold(unfold(x), 4, 3, 5), x)
    with pytest.raises(ShapeMismatch):
        fold(unfold(x), 4, 3, 4)


@settings(max_examples=40, deadline=None)
@given(shapes, st.integers(0, 2 ** 32))
def test_inverse_pairs_exact(shape, seed):
    x = rand(shape, seed)
    n, h, m = shape
    np.testing.assert_array_equal(fold(unfold(x), n, h, m), x)
    np.testing.assert_array_equal(un_bcirc(bcirc(x), n, h, m), x)


@settings(max_examples=40, deadline=None)
@given(shapes, st.integers(0, 2 ** 32))
def test_norm_is_sum_of_tube_norms(shape, seed):
    x = rand(shape, seed)
    total = sum(tube_norm(x, i + 1, j + 1) ** 2 for i in range(shape[0]) for j in range(shape[1]))
    assert np.isclose(fro_norm(x) ** 2, total, rtol=1e-12)
    assert np.allclose(tube_norms(x) ** 2, np.sum(x ** 2, axis=2))


def test_concat_mode2():
    snaps = [rand((10, 1, 6), s) for s in range(20)]
    xm = concat_mode2(snaps[:-1])
    assert xm.shape == (10, 19, 6)
    a, b = rand((2, 2, 2), 1), rand((2, 2, 2), 2)
    c = concat_mode2([a, b])
    np.testing.assert_array_equal(c[:, 0:2, :], a)
    np.testing.assert_array_equal(c[:, 2:4, :], b)
    np.testing.assert_array_equal(concat_mode2([a]), a)
    with pytest.raises(EmptyList):
        concat_mode2([])
    with pytest.raises(ShapeMismatch):
        concat_mode2([a, rand((2, 1, 2), 3)])


def test_norms():
    assert fro_norm(np.zeros((2, 3, 4))) == 0.0
    assert np.isclose(fro_norm(t_identity(3, 5)), np.sqrt(3))
    assert tube_norm(np.array([3.0, 4.0]).reshape(1, 1, 2), 1, 1) == 5.0
    assert np.isclose(fro_norm(np.full((1, 1, 1), 3 + 4j)), 5.0)
    with pytest.raises(IndexOutOfRange):
        tube_norm(np.zeros((2, 2, 2)), 3, 1)
