"""Tensor DMD: slice-wise identification of a reduced transition tensor,
TDMD modes and eigentubes, reconstruction/prediction, and separation into
persistent and transient components.

All heavy work happens on Fourier slices. For real data only the first
ceil((m+1)/2) slices are solved; the rest are conjugates, so reconstructions
are realizable by construction.
"""
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import linalg
from .dynsys import TrajectoryDataset
from .errors import InvalidTruncation, RankRequestTooLarge, TooFewSnapshots
from .factor import TUBAL_RANK_TOL, eigentube_norms
from .spectral import conj_partner, dft3, half_count, idft3, self_conjugate
from .tensor_core import concat_mode2
from .tprod import fdiag_from_tubes

IDENT_TOL = 1e-10
DEFAULT_EPSILON = 0.995


class IdentifiabilityReport(NamedTuple):
    min_fourier_singular_entry: float
    relative_min: float
    identifiable: bool
    tol: float


def fourier_singular_values(xh):
    """(min(n, h), m) array of singular values of each Fourier slice."""
    return np.stack([np.linalg.svd(xh[:, :, j], compute_uv=False)
                     for j in range(xh.shape[2])], axis=1)


def identifiability_check(x, tol=IDENT_TOL):
    """All Fourier-domain singular values of ``x`` must exceed tol * sigma_max."""
    return _identifiability(fourier_singular_values(dft3(x).slices), tol)


def _identifiability(sv, tol=IDENT_TOL):
    smax = float(sv.max()) if sv.size else 0.0
    smin = float(sv.min()) if sv.size else 0.0
    rel = smin / smax if smax > 0 else 0.0
    return IdentifiabilityReport(smin, rel, bool(smax > 0 and smin > tol * smax), tol)


def parameter_counts(n, h, m, l):
    """Reduced-model sizes: (n-l)^2 m for TDMD, (nm-l)^2 for flattened DMD."""
    if l < 0 or l >= n or l >= n * m:
        raise InvalidTruncation(f"truncation {l} must be in [0, {min(n, n * m)})")
    return {"tdmd": (n - l) ** 2 * m, "dmd_flat": (n * m - l) ** 2}


@dataclass(frozen=True)
class SliceFit:
    u: np.ndarray
    a: np.ndarray
    w: np.ndarray
    d: np.ndarray
    modes: np.ndarray
    b: np.ndarray
    cond: float
    defective: bool


@dataclass(frozen=True)
class TdmdModel:
    A_tilde: np.ndarray
    modes: np.ndarray
    eigentubes: np.ndarray
    amplitudes: np.ndarray
    truncate_l: int
    rank: int
    shape: tuple
    T: int
    eigentube_norms: np.ndarray
    defective: np.ndarray
    diagnostics: dict
    # Fourier-domain state: d_hat is (k, m); the rest are (., ., m) stacks
    u_hat: np.ndarray = field(repr=False)
    a_hat: np.ndarray = field(repr=False)
    modes_hat: np.ndarray = field(repr=False)
    d_hat: np.ndarray = field(repr=False)
    b_hat: np.ndarray = field(repr=False)
    x0_hat: np.ndarray = field(repr=False)

    @property
    def k(self):
        return self.d_hat.shape[0]

    @property
    def parameter_count(self):
        return self.k ** 2 * self.shape[2]

    def reconstruct(self, t):
        return tdmd_reconstruct(self, t)


def _fit_slice(xm, xp, x0, k, rtol, real_slice, pairing):
    if real_slice:
        xm, xp, x0 = xm.real, xp.real, x0.real
    u, s, v = linalg.complex_svd(xm, "economy")
    u, s, v = u[:, :k], s[:k], v[:, :k]
    s_inv = linalg.inverse_singular_values(s, rtol)
    a = (u.conj().T @ xp @ v) * s_inv
    w, d, info = linalg.complex_evd(a, return_info=True)
    perm = linalg.pairing_order(d, pairing)
    w, d = w[:, perm], d[perm]
    modes = u @ w
    b = linalg.complex_pinv(modes) @ x0
    return SliceFit(u, a, w, d, modes, b, info["cond"], info["defective"])


def resolve_threads(threads=None):
    if threads is None:
        threads = int(os.environ.get("TDMD_THREADS", "1") or 1)
    return max(1, int(threads))


def tdmd_fit(snapshots, truncate_l=0, rtol=None, threads=1, pairing="unit"):
    """Identify a TDMD model from a snapshot sequence.

    ``truncate_l`` drops that many trailing singular tubes of X_- (counted
    against its tubal rank). Singular values at or below ``rtol`` times the
    slice maximum are treated as zero when inverting. ``pairing`` decides how
    per-slice eigenvalues are grouped into eigentubes (see
    ``linalg.pairing_order``); it affects separation, not reconstruction.
    """
    data = snapshots if isinstance(snapshots, TrajectoryDataset) else TrajectoryDataset(list(snapshots))
    if len(data) < 2:
        raise TooFewSnapshots(f"TDMD needs >= 2 snapshots, got {len(data)}")
    n, h, m = data.shape
    x_minus = concat_mode2(data.snapshots[:-1])
    x_plus = concat_mode2(data.snapshots[1:])
    xmh = dft3(x_minus).slices
    xph = dft3(x_plus).slices
    sv_minus = fourier_singular_values(xmh)
    tube = np.sqrt(np.sum(sv_minus ** 2, axis=1) / m)
    r = int(np.sum(tube > TUBAL_RANK_TOL * tube[0])) if tube[0] > 0 else 0
    if truncate_l < 0 or truncate_l >= r:
        raise RankRequestTooLarge(
            f"truncation {truncate_l} must be in [0, {r}) for tubal rank {r}")
    k = r - truncate_l
    if rtol is None:
        rtol = linalg.default_rtol(*x_minus.shape[:2])
    real = not (np.iscomplexobj(x_minus) or np.iscomplexobj(x_plus))
    del x_minus, x_plus
    x0h = dft3(data.snapshots[0]).slices
    todo = list(range(half_count(m))) if real else list(range(m))

    def work(j):
        return _fit_slice(xmh[:, :, j], xph[:, :, j], x0h[:, :, j], k, rtol,
                          real and self_conjugate(j, m), pairing)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linalg.DefectiveMatrixWarning)
        nthreads = resolve_threads(threads)
        if nthreads > 1 and len(todo) > 1:
            with ThreadPoolExecutor(nthreads) as pool:
                solved = list(pool.map(work, todo))
        else:
            solved = [work(j) for j in todo]
    fits = [None] * m
    for j, f in zip(todo, solved):
        fits[j] = f
    if real:
        for j in range(half_count(m), m):
            p = fits[conj_partner(j, m)]
            fits[j] = SliceFit(p.u.conj(), p.a.conj(), p.w.conj(), p.d.conj(),
                               p.modes.conj(), p.b.conj(), p.cond, p.defective)

    def stack(attr):
        return np.stack([getattr(f, attr) for f in fits], axis=2)

    u_hat, a_hat, modes_hat, b_hat = stack("u"), stack("a"), stack("modes"), stack("b")
    d_hat = np.stack([f.d for f in fits], axis=1)
    defective = np.array([f.defective for f in fits])
    conds = [f.cond for f in fits]
    del fits, solved
    a_tilde = idft3(a_hat, expect_real=True) if real else idft3(a_hat)
    diagnostics = {
        "x_minus": _identifiability(sv_minus)._asdict(),
        "x_plus": _identifiability(fourier_singular_values(xph))._asdict(),
        "tubal_rank_x_minus": r,
        "eigvec_cond": conds,
        "defective_slices": [int(j) + 1 for j in np.flatnonzero(defective)],
        "real": real,
        "pairing": pairing,
    }
    return TdmdModel(
        A_tilde=a_tilde, modes=idft3(modes_hat),
        eigentubes=fdiag_from_tubes(d_hat), amplitudes=idft3(b_hat),
        truncate_l=truncate_l, rank=r, shape=(n, h, m), T=len(data),
        eigentube_norms=eigentube_norms(d_hat), defective=defective,
        diagnostics=diagnostics, u_hat=u_hat, a_hat=a_hat, modes_hat=modes_hat,
        d_hat=d_hat, b_hat=b_hat, x0_hat=x0h)


def _eigen_slices(model, t, mask=None):
    """Per-slice M_j diag(d_j^t [mask]) B_j as an (n, h, m) stack."""
    powers = model.d_hat ** t
    if mask is not None:
        powers = powers * mask[:, np.newaxis]
    return np.einsum("ikj,kj,klj->ilj", model.modes_hat, powers, model.b_hat)


def _power_slice(model, t, j):
    u = model.u_hat[:, :, j]
    coeff = np.linalg.matrix_power(model.a_hat[:, :, j], t) @ (u.conj().T @ model.x0_hat[:, :, j])
    return u @ coeff


def _realize(model, slices):
    if model.diagnostics.get("real", True):
        return idft3(slices, expect_real=True)
    return idft3(slices)


def reconstruct_slices(model, t):
    slices = _eigen_slices(model, t)
    for j in np.flatnonzero(model.defective):
        slices[:, :, j] = _power_slice(model, t, j)
    return slices


def tdmd_reconstruct(model, t):
    """State at step ``t`` (``t >= T`` predicts beyond the training window).

    Slices flagged defective use the power form U A^t U^H x0 instead of the
    eigenbasis.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    return _realize(model, reconstruct_slices(model, t))


@dataclass(frozen=True)
class SeparationResult:
    persistent_tubes: list
    transient_tubes: list
    epsilon: float
    model: TdmdModel = field(repr=False)

    def _mask(self):
        mask = np.zeros(self.model.k)
        mask[[i - 1 for i in self.persistent_tubes]] = 1.0
        return mask

    def components(self, t):
        """(X_pers(t), X_trans(t)) as real tensors summing to the reconstruction.

        Defective slices have no usable eigenbasis for splitting; their
        power-form correction is carried by the transient part.
        """
        mask = self._mask()
        pers = _eigen_slices(self.model, t, mask)
        trans = reconstruct_slices(self.model, t) - pers
        if self.model.diagnostics.get("real", True):
            # real part == inverse of the conjugate-symmetrized stack
            return (np.asfortranarray(idft3(pers).real),
                    np.asfortranarray(idft3(trans).real))
        return idft3(pers), idft3(trans)

    def persistent(self, t):
        return self.components(t)[0]

    def transient(self, t):
        return self.components(t)[1]


def separate(model, epsilon=DEFAULT_EPSILON):
    """Classify eigentubes by spatial Frobenius norm: ``> epsilon`` is persistent."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    pers = [i + 1 for i in range(model.k) if model.eigentube_norms[i] > epsilon]
    trans = [i + 1 for i in range(model.k) if model.eigentube_norms[i] <= epsilon]
    return SeparationResult(pers, trans, float(epsilon), model)


def total_relative_error(reconstruct, snapshots):
    """Sum over snapshots of ||X_hat_t - X_t|| / ||X_t||."""
    return float(sum(per_frame_errors(reconstruct, snapshots)))


def per_frame_errors(reconstruct, snapshots, start=0):
    errs = []
    for t in range(start, len(snapshots)):
        x = np.asarray(snapshots[t])
        nx = np.linalg.norm(x.ravel())
        diff = np.linalg.norm((reconstruct(t) - x).ravel())
        errs.append(float(diff / nx) if nx > 0 else float(diff))
    return errs
