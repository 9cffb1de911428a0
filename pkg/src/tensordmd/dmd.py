"""Standard DMD on flattened snapshots, the comparison baseline.

Snapshots are flattened in mode-1-fastest order (``order='F'``), matching the
tensor storage layout.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import RankRequestTooLarge, TooFewSnapshots
from .dynsys import TrajectoryDataset

RANK_TOL = 1e-10


def flatten(x):
    return np.asarray(x).reshape(-1, order="F")


def snapshot_matrix(snapshots):
    return np.stack([flatten(s) for s in snapshots], axis=1)


@dataclass(frozen=True)
class DmdModel:
    A_tilde: np.ndarray
    modes: np.ndarray
    eigvals: np.ndarray
    amplitudes: np.ndarray
    r: int
    truncate_l: int
    shape: tuple
    T: int
    defective: bool
    flatten_order: str = "F"

    @property
    def parameter_count(self):
        return self.r ** 2

    def reconstruct(self, t):
        return dmd_reconstruct(self, t)


def _as_dataset(snapshots):
    if isinstance(snapshots, TrajectoryDataset):
        return snapshots
    return TrajectoryDataset(list(snapshots))


def dmd_fit(snapshots, truncate_l=0, rtol=None):
    """Fit DMD to the flattened snapshot sequence.

    Singular values of X_- below ``RANK_TOL`` relative to the largest define
    the economy rank; ``truncate_l`` more are then dropped.
    """
    data = _as_dataset(snapshots)
    if len(data) < 2:
        raise TooFewSnapshots(f"DMD needs >= 2 snapshots, got {len(data)}")
    x = snapshot_matrix(data.snapshots)
    x_minus, x_plus = x[:, :-1], x[:, 1:]
    u, s, v = linalg.complex_svd(x_minus, "economy")
    rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    if truncate_l < 0 or truncate_l >= rank:
        raise RankRequestTooLarge(
            f"truncation {truncate_l} must be in [0, {rank}) for economy rank {rank}")
    k = rank - truncate_l
    u, s, v = u[:, :k], s[:k], v[:, :k]
    if rtol is None:
        rtol = linalg.default_rtol(*x_minus.shape)
    s_inv = linalg.inverse_singular_values(s, rtol)
    a_tilde = (u.conj().T @ x_plus @ v) * s_inv
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linalg.DefectiveMatrixWarning)
        w, d, info = linalg.complex_evd(a_tilde, return_info=True)
    modes = u @ w
    b = linalg.complex_pinv(modes) @ x[:, 0]
    return DmdModel(A_tilde=a_tilde, modes=modes, eigvals=d, amplitudes=b, r=k,
                    truncate_l=truncate_l, shape=data.shape, T=len(data),
                    defective=info["defective"])


def _evaluate(model, t, weights):
    vec = model.modes @ (weights * model.eigvals.astype(complex) ** t * model.amplitudes)
    return vec


def dmd_reconstruct(model, t, return_residual=False):
    """Real part of M diag(lambda)^t b, reshaped to the snapshot shape."""
    vec = _evaluate(model, t, 1.0)
    out = vec.real.reshape(model.shape, order="F")
    if return_residual:
        return out, float(np.abs(vec.imag).max(initial=0.0))
    return out


def dmd_separate(model, epsilon, t):
    """Split reconstruction at ``t`` by eigenvalue modulus ``> epsilon``."""
    pers = np.abs(model.eigvals) > epsilon
    xp = _evaluate(model, t, pers.astype(float)).real.reshape(model.shape, order="F")
    xt = _evaluate(model, t, (~pers).astype(float)).real.reshape(model.shape, order="F")
    return xp, xt, pers
