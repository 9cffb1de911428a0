"""TSVD, tubal rank and TEVD assembled from slice-wise kernels.

Tubes are assembled by ordinal: tube j collects the j-th singular value (or
the j-th eigenvalue in canonical order) of every Fourier slice. For real
input only the first ceil((m+1)/2) slices are factorized; the rest are the
conjugates of their partners, which keeps the assembled factors realizable.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import IdentityViolation, RankRequestTooLarge, ShapeMismatch
from .spectral import conj_partner, dft3, half_count, idft3, self_conjugate
from .tensor_core import as_tensor3, fro_norm
from .tprod import fdiag_from_tubes, t_transpose, tprod

TUBAL_RANK_TOL = 1e-10


@dataclass(frozen=True)
class TsvdFactors:
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    tube_norms: np.ndarray
    rank_used: int
    # Fourier-domain pieces, kept for callers that stay in the spectral domain
    u_hat: np.ndarray = field(repr=False)
    s_hat: np.ndarray = field(repr=False)
    v_hat: np.ndarray = field(repr=False)

    def reconstruct(self):
        return tprod(tprod(self.U, self.S), t_transpose(self.V))


@dataclass(frozen=True)
class TevdFactors:
    W: np.ndarray
    D: np.ndarray
    eigentube_norms: np.ndarray
    pairing: list
    defective: np.ndarray
    w_hat: np.ndarray = field(repr=False)
    d_hat: np.ndarray = field(repr=False)

    @property
    def any_defective(self):
        return bool(self.defective.any())


def _slice_plan(m, real):
    """Slices to factorize directly; with real input the others are mirrored."""
    return range(half_count(m)) if real else range(m)


def slice_svds(xh, real, mode="economy"):
    """Per-slice SVDs of a Fourier stack; returns lists (U_j, s_j, V_j)."""
    m = xh.shape[2]
    us, ss, vs = [None] * m, [None] * m, [None] * m
    for j in _slice_plan(m, real):
        a = xh[:, :, j]
        if real and self_conjugate(j, m):
            a = a.real
        us[j], ss[j], vs[j] = linalg.complex_svd(a, mode)
    if real:
        for j in range(half_count(m), m):
            p = conj_partner(j, m)
            us[j], ss[j], vs[j] = us[p].conj(), ss[p], vs[p].conj()
    return us, ss, vs


def tsvd(x, mode="economy", k=None):
    """T-SVD of ``x``.

    ``mode`` is 'full', 'economy' (min(n, h) tubes) or 'truncate' (leading
    ``k`` tubes).
    """
    x = as_tensor3(x)
    n, h, m = x.shape
    real = not np.iscomplexobj(x)
    p = min(n, h)
    if mode == "truncate":
        if k is None or not 1 <= k <= p:
            raise RankRequestTooLarge(f"truncation rank {k} outside [1, {p}]")
    elif mode not in ("full", "economy"):
        raise ValueError(f"unknown TSVD mode {mode!r}")
    xh = dft3(x).slices
    us, ss, vs = slice_svds(xh, real, "full" if mode == "full" else "economy")
    r = {"full": None, "economy": p, "truncate": k}[mode]
    if mode == "full":
        u_hat = np.stack(us, axis=2)
        v_hat = np.stack(vs, axis=2)
        s_hat = np.zeros((n, h, m), dtype=complex)
        idx = np.arange(p)
        s_hat[idx, idx, :] = np.stack(ss, axis=1)
        sing = np.stack(ss, axis=1)
        rank_used = p
    else:
        u_hat = np.stack([u[:, :r] for u in us], axis=2)
        v_hat = np.stack([v[:, :r] for v in vs], axis=2)
        sing = np.stack([s[:r] for s in ss], axis=1)
        s_hat = np.zeros((r, r, m), dtype=complex)
        idx = np.arange(r)
        s_hat[idx, idx, :] = sing
        rank_used = r
    norms = np.sqrt(np.sum(sing ** 2, axis=1) / m)
    fin = (lambda a: idft3(a, expect_real=True)) if real else idft3
    return TsvdFactors(
        U=fin(u_hat), S=fin(s_hat), V=fin(v_hat), tube_norms=norms,
        rank_used=rank_used, u_hat=u_hat, s_hat=s_hat, v_hat=v_hat)


def singular_tube_norms(x):
    """Frobenius norms of all min(n, h) singular tubes, largest first."""
    x = as_tensor3(x)
    m = x.shape[2]
    xh = dft3(x).slices
    sv = np.stack([np.linalg.svd(xh[:, :, j], compute_uv=False)
                   for j in range(m)], axis=1)
    return np.sqrt(np.sum(sv ** 2, axis=1) / m)


def tubal_rank(x, tol=TUBAL_RANK_TOL):
    norms = singular_tube_norms(x)
    if norms.size == 0 or norms[0] == 0.0:
        return 0
    return int(np.sum(norms > tol * norms[0]))


def truncation_error(x, k, check_tol=1e-8):
    """||X - X_k|| for the rank-``k`` truncated TSVD.

    Also checks ||X - X_k||^2 == sum_{j>k} ||S_jj:||^2 and raises
    ``IdentityViolation`` if it fails by more than ``check_tol`` relative.
    """
    x = as_tensor3(x)
    p = min(x.shape[:2])
    if not 0 <= k <= p:
        raise RankRequestTooLarge(f"truncation rank {k} outside [0, {p}]")
    full = tsvd(x, "economy")
    if k == 0:
        approx = np.zeros_like(x)
    else:
        approx = tsvd(x, "truncate", k).reconstruct()
    err = fro_norm(x - approx)
    tail = float(np.sum(full.tube_norms[k:] ** 2))
    scale = max(fro_norm(x) ** 2, np.finfo(float).tiny)
    if abs(err ** 2 - tail) > check_tol * scale:
        raise IdentityViolation(
            f"||X - X_k||^2 = {err ** 2:.6e} but tail tube energy = {tail:.6e}")
    return err


def slice_evds(ah, real, pairing="modulus"):
    """Per-slice canonical EVDs; returns (W list, d list, info list)."""
    m = ah.shape[2]
    ws, ds, infos = [None] * m, [None] * m, [None] * m
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linalg.DefectiveMatrixWarning)
        for j in _slice_plan(m, real):
            a = ah[:, :, j]
            if real and self_conjugate(j, m):
                a = a.real
            w, d, info = linalg.complex_evd(a, return_info=True)
            perm = linalg.pairing_order(d, pairing)
            ws[j], ds[j] = w[:, perm], d[perm]
            infos[j] = dict(info, order=info["order"][perm])
    if real:
        for j in range(half_count(m), m):
            p = conj_partner(j, m)
            ws[j], ds[j] = ws[p].conj(), ds[p].conj()
            infos[j] = dict(infos[p], mirror_of=p + 1)
    return ws, ds, infos


def tevd(a, pairing="modulus"):
    """T-EVD ``a = W * D * W^-1``.

    Tube j takes the j-th eigenvalue of every slice, in canonical order
    (``pairing='modulus'``) or by distance to 1 (``pairing='unit'``).
    """
    a = as_tensor3(a)
    r, r2, m = a.shape
    if r != r2:
        raise ShapeMismatch(f"TEVD needs square slices, got {a.shape}")
    real = not np.iscomplexobj(a)
    ah = dft3(a).slices
    ws, ds, infos = slice_evds(ah, real, pairing)
    w_hat = np.stack(ws, axis=2)
    d_tubes = np.stack(ds, axis=1)
    defective = np.array([info["defective"] for info in infos])
    for j in np.flatnonzero(defective):
        warnings.warn(f"Fourier slice {j + 1}: eigenvector condition "
                      f"{infos[j]['cond']:.3e}", linalg.DefectiveMatrixWarning,
                      stacklevel=2)
    return TevdFactors(
        W=idft3(w_hat), D=fdiag_from_tubes(d_tubes),
        eigentube_norms=eigentube_norms(d_tubes), pairing=infos,
        defective=defective, w_hat=w_hat, d_hat=d_tubes)


def eigentube_norms(d_tubes):
    """Spatial-domain tube norms from Fourier-domain eigenvalues of shape (r, m)."""
    m = d_tubes.shape[1]
    return np.sqrt(np.sum(np.abs(d_tubes) ** 2, axis=1) / m)
