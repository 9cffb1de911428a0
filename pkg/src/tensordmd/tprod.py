"""T-product algebra. Each operation runs slice-wise in the Fourier domain;
``tprod`` additionally exposes the literal block-circulant evaluation as an
independent oracle."""
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import NotFDiagonal, ShapeMismatch, SingularSlice
from .spectral import dft3, idft3
from .tensor_core import as_tensor3, bcirc, fold, t_identity, unfold

FDIAG_TOL = 1e-12


def _finish(slices, real):
    return idft3(slices, expect_real=real) if real else idft3(slices)


def tprod(x, y, path="fourier"):
    """T-product ``x * y`` of an (n, h, m) and an (h, s, m) tensor."""
    x, y = as_tensor3(x), as_tensor3(y)
    n, h, m = x.shape
    if y.shape[0] != h or y.shape[2] != m:
        raise ShapeMismatch(f"cannot T-multiply {x.shape} by {y.shape}")
    s = y.shape[1]
    if path == "bcirc_oracle":
        return fold(bcirc(x) @ unfold(y), n, s, m)
    if path != "fourier":
        raise ValueError(f"unknown path {path!r}")
    xh, yh = dft3(x).slices, dft3(y).slices
    zh = np.einsum("ikj,klj->ilj", xh, yh)
    real = not (np.iscomplexobj(x) or np.iscomplexobj(y))
    return _finish(zh, real)


def tprod_chain(*tensors):
    out = tensors[0]
    for t in tensors[1:]:
        out = tprod(out, t)
    return out


def t_transpose(x):
    """T-transpose: (conjugate-)transpose every slice, reverse slices 2..m."""
    x = as_tensor3(x)
    m = x.shape[2]
    order = [0] + list(range(m - 1, 0, -1))
    out = np.transpose(x[:, :, order], (1, 0, 2))
    if np.iscomplexobj(out):
        out = out.conj()
    return np.asfortranarray(out)


def t_inverse(x, rtol=None):
    x = as_tensor3(x)
    n, h, m = x.shape
    if n != h:
        raise ShapeMismatch(f"T-inverse needs square slices, got {x.shape}")
    if rtol is None:
        rtol = linalg.default_rtol(n, n)
    xh = dft3(x).slices
    out = np.empty_like(xh)
    for j in range(m):
        cond = np.linalg.cond(xh[:, :, j])
        if not np.isfinite(cond) or cond >= 1.0 / rtol:
            raise SingularSlice(j + 1, cond)
        out[:, :, j] = np.linalg.inv(xh[:, :, j])
    return _finish(out, not np.iscomplexobj(x))


def t_pinv(x, rtol=None):
    x = as_tensor3(x)
    n, h, m = x.shape
    xh = dft3(x).slices
    out = np.empty((h, n, m), dtype=complex, order="F")
    for j in range(m):
        out[:, :, j] = linalg.complex_pinv(xh[:, :, j], rtol)
    return _finish(out, not np.iscomplexobj(x))


class OrthogonalityReport(NamedTuple):
    orthogonal: bool
    residual: float

    def __bool__(self):
        return self.orthogonal


def is_t_orthogonal(x, tol=1e-8):
    """Check x * x^T = x^T * x = I; residual is the max absolute entry error."""
    x = as_tensor3(x)
    n, h, m = x.shape
    if n != h:
        raise ShapeMismatch(f"T-orthogonality needs square slices, got {x.shape}")
    eye = t_identity(n, m)
    xt = t_transpose(x)
    resid = max(np.abs(tprod(x, xt) - eye).max(), np.abs(tprod(xt, x) - eye).max())
    return OrthogonalityReport(bool(resid <= tol), float(resid))


def is_f_diagonal(d, tol=FDIAG_TOL):
    d = np.asarray(d)
    mask = np.ones(d.shape[:2], dtype=bool)
    np.fill_diagonal(mask, False)
    off = np.linalg.norm(d[mask, :].ravel())
    return off <= tol * max(1.0, np.linalg.norm(d.ravel()))


def fdiag_from_tubes(tubes_hat, real=False):
    """F-diagonal tensor from Fourier-domain diagonal values of shape (r, m)."""
    r, m = tubes_hat.shape
    slices = np.zeros((r, r, m), dtype=complex, order="F")
    idx = np.arange(r)
    slices[idx, idx, :] = tubes_hat
    return _finish(slices, real)


def tprod_power(d, t):
    """``t``-th T-power of an F-diagonal tensor via per-slice eigenvalue powers."""
    d = as_tensor3(d)
    r, r2, m = d.shape
    if r != r2 or not is_f_diagonal(d):
        raise NotFDiagonal("tprod_power requires a square F-diagonal tensor")
    if t < 0:
        raise ValueError("power must be nonnegative")
    diag_hat = np.fft.fft(np.einsum("iij->ij", d), axis=1)
    return fdiag_from_tubes(diag_hat ** t).astype(complex)
