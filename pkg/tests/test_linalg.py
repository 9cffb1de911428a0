import warnings

import numpy as np
import pytest

from tensordmd import linalg
from tensordmd.errors import DefectiveMatrixWarning

from conftest import rand


def crand(p, q, seed):
    return rand((p, q, 1), seed, complex_=True)[:, :, 0]


def unitary(p, seed):
    q, _ = np.linalg.qr(crand(p, p, seed))
    return q


def test_svd_examples():
    _, s, _ = linalg.complex_svd(np.eye(3))
    np.testing.assert_allclose(s, [1, 1, 1])
    u, s, v = linalg.complex_svd(np.diag([3.0, 2.0, 1.0]))
    np.testing.assert_allclose(s, [3, 2, 1])
    np.testing.assert_allclose(np.abs(u), np.eye(3), atol=1e-12)
    np.testing.assert_allclose(np.abs(v), np.eye(3), atol=1e-12)


@pytest.mark.parametrize("mode", ["full", "economy"])
def test_svd_residuals(mode):
    a = crand(4, 3, 5)
    u, s, v = linalg.complex_svd(a, mode)
    k = len(s)
    smat = np.zeros((u.shape[1], v.shape[1]))
    smat[:k, :k] = np.diag(s)
    assert np.linalg.norm(a - u @ smat @ v.conj().T) <= 1e-10 * np.linalg.norm(a)
    assert np.abs(u.conj().T @ u - np.eye(u.shape[1])).max() <= 1e-10
    assert np.abs(v.conj().T @ v - np.eye(v.shape[1])).max() <= 1e-10
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
    if mode == "economy":
        assert u.shape == (4, 3) and v.shape == (3, 3)


def test_svd_unitary_invariance():
    a = crand(5, 3, 21)
    s0 = linalg.complex_svd(a)[1]
    s1 = linalg.complex_svd(unitary(5, 22) @ a @ unitary(3, 23))[1]
    np.testing.assert_allclose(s1, s0, rtol=1e-12)


def test_evd_diag():
    w, d = linalg.complex_evd(np.diag([0.5, 2.0]))
    np.testing.assert_allclose(d, [2.0, 0.5])
    np.testing.assert_allclose(w, [[0, 1], [1, 0]], atol=1e-15)
    w, d = linalg.complex_evd(np.diag([2.0, 0.5]))
    np.testing.assert_allclose(w, np.eye(2))


def test_evd_rotation_phase_tiebreak():
    th = 0.7
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    w, d = linalg.complex_evd(rot)
    np.testing.assert_allclose(d, [np.exp(1j * th), np.exp(-1j * th)], atol=1e-14)


def test_evd_residual_and_canonical_vectors():
    a = crand(5, 5, 31)
    w, d = linalg.complex_evd(a)
    assert np.linalg.norm(a @ w - w * d) <= 1e-8 * np.linalg.norm(a)
    np.testing.assert_allclose(np.linalg.norm(w, axis=0), 1.0)
    first = w[0]
    assert np.all(np.abs(first.imag) < 1e-14) and np.all(first.real >= 0)
    assert np.all(np.diff(np.abs(d)) <= 1e-12)


def test_evd_deterministic():
    a = crand(6, 6, 32)
    w1, d1 = linalg.complex_evd(a)
    w2, d2 = linalg.complex_evd(a.copy())
    np.testing.assert_array_equal(d1, d2)
    np.testing.assert_array_equal(w1, w2)


def test_defective_warning():
    jordan = np.array([[1.0, 1.0], [0.0, 1.0]])
    with pytest.warns(DefectiveMatrixWarning):
        _, _, info = linalg.complex_evd(jordan, return_info=True)
    assert info["defective"]


def test_pinv_examples():
    np.testing.assert_allclose(linalg.complex_pinv(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(linalg.complex_pinv(np.array([[1.0, 0], [0, 0]])),
                               [[1, 0], [0, 0]])


def test_pinv_penrose_identities():
    a = crand(3, 5, 41)
    p = linalg.complex_pinv(a)
    scale = np.linalg.norm(p)
    assert np.linalg.norm(a @ p @ a - a) <= 1e-9 * scale
    assert np.linalg.norm(p @ a @ p - p) <= 1e-9 * scale
    assert np.linalg.norm((a @ p).conj().T - a @ p) <= 1e-9 * scale
    assert np.linalg.norm((p @ a).conj().T - p @ a) <= 1e-9 * scale


def test_unit_pairing_order():
    d = np.array([1.2, 1.0 + 0j, 0.5, 0.99])
    np.testing.assert_array_equal(linalg.pairing_order(d, "unit"), [1, 3, 0, 2])
    np.testing.assert_array_equal(linalg.pairing_order(d, "modulus"), [0, 1, 2, 3])
    with pytest.raises(ValueError):
        linalg.pairing_order(d, "nope")
