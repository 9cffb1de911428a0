"""Dense complex factorization kernels (LAPACK via numpy) with fixed
canonicalization, so slice-wise assembly downstream is deterministic."""
import warnings

import numpy as np

from .errors import DefectiveMatrixWarning, NoConvergence

DEFECTIVE_COND = 1e12
_TWO_PI = 2.0 * np.pi


def default_rtol(p, q):
    return max(p, q) * np.finfo(np.float64).eps


def complex_svd(a, mode="economy"):
    """SVD ``a = U @ diag(s) @ V^H``; returns ``(U, s, V)`` (V, not V^H).

    ``mode='full'`` returns square U and V; ``'economy'`` keeps min(p, q) columns.
    """
    a = np.asarray(a)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=(mode == "full"))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return u, s, vh.conj().T


def _grouped_order(primary, secondary, rel_tol):
    """Sort ascending by ``primary``; runs of near-equal keys sorted by ``secondary``."""
    order = list(np.argsort(primary, kind="stable"))
    scale = max(np.abs(primary).max(initial=0.0), 1.0)
    out, i = [], 0
    while i < len(order):
        j = i + 1
        while j < len(order) and primary[order[j]] - primary[order[i]] <= rel_tol * scale:
            j += 1
        out.extend(sorted(order[i:j], key=lambda k: (secondary[k], k)))
        i = j
    return np.array(out, dtype=int)


def _phase(d):
    phase = np.mod(np.angle(d), _TWO_PI)
    # values like 2pi - 1e-17 collapse to 0
    phase[np.isclose(phase, _TWO_PI, rtol=0, atol=1e-14)] = 0.0
    return phase


def _canonical_order(d, rel_tol=1e-10):
    """Descending modulus; near-equal moduli ordered by phase in [0, 2pi)."""
    return _grouped_order(-np.abs(d), _phase(d), rel_tol)


def unit_distance_order(d, rel_tol=1e-10):
    """Ascending |d - 1|; near-ties keep the canonical (modulus, phase) rank.

    ``d`` is assumed to be in canonical order already.
    """
    return _grouped_order(np.abs(d - 1.0), np.arange(len(d)), rel_tol)


def canonicalize_vectors(w):
    """Unit-normalize columns and rotate each so its first nonzero entry is real >= 0."""
    w = np.array(w, dtype=complex)
    norms = np.linalg.norm(w, axis=0)
    norms[norms == 0] = 1.0
    w /= norms
    for c in range(w.shape[1]):
        col = w[:, c]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size:
            lead = col[nz[0]]
            w[:, c] = col * (np.conj(lead) / abs(lead))
    return w


def complex_evd(a, return_info=False):
    """Eigendecomposition ``a @ W = W @ diag(d)`` in canonical order.

    Emits ``DefectiveMatrixWarning`` when cond(W) exceeds 1e12; with
    ``return_info`` also returns ``{'order', 'cond', 'defective'}``.
    """
    a = np.asarray(a)
    try:
        d, w = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    d = d.astype(complex)
    order = _canonical_order(d)
    d = d[order]
    w = canonicalize_vectors(w[:, order])
    cond = np.linalg.cond(w) if w.size else 1.0
    defective = not np.isfinite(cond) or cond > DEFECTIVE_COND
    if defective:
        warnings.warn(f"eigenvector matrix condition {cond:.3e} exceeds "
                      f"{DEFECTIVE_COND:.0e}", DefectiveMatrixWarning, stacklevel=2)
    if return_info:
        return w, d, {"order": order, "cond": float(cond), "defective": defective}
    return w, d


def complex_pinv(a, rtol=None):
    """Moore-Penrose pseudoinverse; singular values <= rtol * s_max become zero."""
    a = np.asarray(a)
    p, q = a.shape
    if rtol is None:
        rtol = default_rtol(p, q)
    if a.size == 0:
        return np.zeros((q, p), dtype=a.dtype)
    u, s, v = complex_svd(a, "economy")
    cutoff = rtol * (s[0] if s.size else 0.0)
    s_inv = np.zeros_like(s)
    keep = s > cutoff
    s_inv[keep] = 1.0 / s[keep]
    return (v * s_inv) @ u.conj().T


def inverse_singular_values(s, rtol):
    """Reciprocals of ``s`` with values <= rtol * s[0] mapped to zero."""
    out = np.zeros_like(s)
    if s.size == 0:
        return out
    keep = s > rtol * s[0]
    out[keep] = 1.0 / s[keep]
    return out


PAIRINGS = ("modulus", "unit")


def pairing_order(d, pairing):
    """Permutation applied to canonically ordered eigenvalues before tube assembly.

    'modulus' keeps the canonical order; 'unit' ranks eigenvalues by distance
    to 1 so that each slice's (near-)unit eigenvalue lands in the first tube.
    """
    if pairing == "modulus":
        return np.arange(len(d))
    if pairing == "unit":
        return unit_distance_order(d)
    raise ValueError(f"unknown pairing {pairing!r}; expected one of {PAIRINGS}")
