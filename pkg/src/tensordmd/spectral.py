"""Mode-3 DFT and the Fourier-domain slice stack.

Convention: unnormalized forward transform, 1/m on the inverse (numpy's
default), so ``||x||^2 == sum_j ||X_hat_j||^2 / m``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NotRealizable, ShapeMismatch
from .tensor_core import as_tensor3

REAL_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class SpectralStack:
    """Fourier-domain frontal slices, stored as an (n, h, m) complex array."""

    slices: np.ndarray
    origin_is_real: bool = False

    @property
    def shape(self):
        return self.slices.shape

    @property
    def m(self):
        return self.slices.shape[2]

    def slice(self, j):
        """Fourier slice ``j`` (1-based)."""
        return self.slices[:, :, j - 1]

    def blkdiag(self):
        n, h, m = self.slices.shape
        out = np.zeros((n * m, h * m), dtype=complex)
        for j in range(m):
            out[j * n:(j + 1) * n, j * h:(j + 1) * h] = self.slices[:, :, j]
        return out


def half_count(m):
    """Number of independent Fourier slices of a real tensor: ceil((m+1)/2)."""
    return m // 2 + 1


def conj_partner(j, m):
    """0-based index of the slice conjugate-paired with 0-based slice ``j``."""
    return (-j) % m


def self_conjugate(j, m):
    return conj_partner(j, m) == j


def dft3(x, half=False):
    """Forward mode-3 DFT.

    With ``half=True`` and real input, only slices 1..ceil((m+1)/2) are
    transformed and the rest mirrored by conjugate symmetry.
    """
    x = as_tensor3(x)
    real = not np.iscomplexobj(x)
    if half and real:
        m = x.shape[2]
        head = np.fft.rfft(x, axis=2)
        out = np.empty(x.shape, dtype=complex, order="F")
        out[:, :, :head.shape[2]] = head
        for j in range(head.shape[2], m):
            out[:, :, j] = np.conj(head[:, :, conj_partner(j, m)])
        return SpectralStack(out, True)
    return SpectralStack(np.asfortranarray(np.fft.fft(x, axis=2)), real)


def mirror_half(slices):
    """Overwrite slices past the half spectrum with conjugates of their partners."""
    m = slices.shape[2]
    for j in range(half_count(m), m):
        slices[:, :, j] = np.conj(slices[:, :, conj_partner(j, m)])
    return slices


def enforce_conjugate_symmetry(slices):
    """Project a slice stack onto the conjugate-symmetric subspace (linear)."""
    m = slices.shape[2]
    flipped = np.conj(slices[:, :, [conj_partner(j, m) for j in range(m)]])
    return 0.5 * (slices + flipped)


def idft3(stack, expect_real=False, tol=REAL_RESIDUAL_TOL):
    """Inverse mode-3 DFT with 1/m normalization.

    ``expect_real`` requires the imaginary residual to stay within
    ``tol * (1 + ||result||)`` and returns a real tensor. Averaging each slice
    with its conjugate partner and inverting yields exactly the real part of
    the plain inverse, so that is what is returned.
    """
    slices = stack.slices if isinstance(stack, SpectralStack) else np.asarray(stack)
    if slices.ndim != 3:
        raise ShapeMismatch(f"expected a slice stack, got ndim={slices.ndim}")
    raw = np.fft.ifft(slices, axis=2)
    if not expect_real:
        return np.asfortranarray(raw)
    resid = float(np.abs(raw.imag).max()) if raw.size else 0.0
    bound = tol * (1.0 + float(np.linalg.norm(raw.real.ravel())))
    if resid > bound:
        raise NotRealizable(resid, bound)
    return np.asfortranarray(raw.real)
