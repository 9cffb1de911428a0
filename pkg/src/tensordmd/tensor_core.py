"""Dense third-order tensors stored as numpy arrays of shape (n, h, m).

Arrays are kept in Fortran order so that frontal slice ``k`` is a contiguous
column-major n-by-h block (mode-1 index fastest). Frontal-slice accessors take
1-based indices; everything else is plain numpy indexing.
"""
import numpy as np

from .errors import EmptyList, IndexOutOfRange, NotBlockCirculant, ShapeMismatch


def as_tensor3(x, dtype=None):
    """Validate ``x`` as a third-order tensor and return a Fortran-ordered array."""
    arr = np.asarray(x, dtype=dtype)
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    if arr.ndim != 3:
        raise ShapeMismatch(f"expected a third-order tensor, got ndim={arr.ndim}")
    if min(arr.shape) < 1:
        raise ShapeMismatch(f"all extents must be >= 1, got {arr.shape}")
    if not (np.issubdtype(arr.dtype, np.floating)
            or np.issubdtype(arr.dtype, np.complexfloating)):
        arr = arr.astype(np.float64)
    return np.asfortranarray(arr)


def is_complex(x):
    return np.iscomplexobj(x)


def frontal_slice(x, k):
    """Return the n-by-h matrix X_{::k} (1-based ``k``) as a read-only view."""
    m = x.shape[2]
    if not 1 <= k <= m:
        raise IndexOutOfRange(f"frontal slice {k} outside [1, {m}]")
    view = x[:, :, k - 1]
    view.flags.writeable = False
    return view


def set_frontal_slice(x, k, value):
    """Return a copy of ``x`` with frontal slice ``k`` (1-based) replaced."""
    m = x.shape[2]
    if not 1 <= k <= m:
        raise IndexOutOfRange(f"frontal slice {k} outside [1, {m}]")
    value = np.asarray(value)
    if value.shape != x.shape[:2]:
        raise ShapeMismatch(f"slice shape {value.shape} != {x.shape[:2]}")
    dtype = np.result_type(x.dtype, value.dtype)
    out = np.array(x, dtype=dtype, order="F", copy=True)
    out[:, :, k - 1] = value
    return out


def real_part_checked(x, tol):
    """Real part of a complex tensor, provided max|im| <= tol * (1 + max|re|)."""
    from .errors import NotRealizable

    x = np.asarray(x)
    if not np.iscomplexobj(x):
        return x
    bound = tol * (1.0 + (np.abs(x.real).max() if x.size else 0.0))
    resid = np.abs(x.imag).max() if x.size else 0.0
    if resid > bound:
        raise NotRealizable(resid, bound)
    return np.asfortranarray(x.real)


def t_identity(n, m, dtype=np.float64):
    eye = np.zeros((n, n, m), dtype=dtype, order="F")
    eye[:, :, 0] = np.eye(n)
    return eye


def bcirc(x):
    """Block-circulant expansion, (nm x hm); block (p, q) is X_{::1+(p-q mod m)}."""
    x = as_tensor3(x)
    n, h, m = x.shape
    out = np.empty((n * m, h * m), dtype=x.dtype)
    for p in range(m):
        for q in range(m):
            out[p * n:(p + 1) * n, q * h:(q + 1) * h] = x[:, :, (p - q) % m]
    return out


def un_bcirc(b, n, h, m, verify=False, rtol=1e-10):
    """Recover the tensor whose slices form the first block column of ``b``."""
    b = np.asarray(b)
    if b.shape != (n * m, h * m):
        raise ShapeMismatch(f"matrix shape {b.shape} != {(n * m, h * m)}")
    x = np.empty((n, h, m), dtype=b.dtype, order="F")
    for k in range(m):
        x[:, :, k] = b[k * n:(k + 1) * n, 0:h]
    if verify and m > 1:
        scale = max(np.abs(b).max(), np.finfo(float).tiny)
        diff = np.abs(bcirc(x) - b).max()
        if diff > rtol * scale:
            raise NotBlockCirculant(
                f"block-circulant residual {diff:.3e} exceeds {rtol * scale:.3e}")
    return x


def unfold(y):
    """Stack frontal slices vertically: (n x h x m) -> (nm x h)."""
    y = as_tensor3(y)
    n, h, m = y.shape
    return np.concatenate([y[:, :, k] for k in range(m)], axis=0)


def fold(mat, n, h, m):
    mat = np.asarray(mat)
    if mat.shape != (n * m, h):
        raise ShapeMismatch(f"matrix shape {mat.shape} != {(n * m, h)}")
    out = np.empty((n, h, m), dtype=mat.dtype, order="F")
    for k in range(m):
        out[:, :, k] = mat[k * n:(k + 1) * n, :]
    return out


def concat_mode2(snapshots):
    """Concatenate equally shaped tensors along the second mode."""
    snapshots = list(snapshots)
    if not snapshots:
        raise EmptyList("no snapshots to concatenate")
    shape = np.shape(snapshots[0])
    for s in snapshots[1:]:
        if np.shape(s) != shape:
            raise ShapeMismatch(f"snapshot shape {np.shape(s)} != {shape}")
    return np.asfortranarray(np.concatenate(
        [as_tensor3(s) for s in snapshots], axis=1))


def fro_norm(x):
    return float(np.linalg.norm(np.asarray(x).ravel()))


def tube_norm(x, i, j):
    """Frobenius norm of the tube x_{ij:} (1-based ``i``, ``j``)."""
    n, h, _ = x.shape
    if not (1 <= i <= n and 1 <= j <= h):
        raise IndexOutOfRange(f"tube ({i}, {j}) outside {n}x{h}")
    return float(np.linalg.norm(x[i - 1, j - 1, :]))


def tube_norms(x):
    """All tube norms as an (n, h) array."""
    return np.sqrt(np.sum(np.abs(x) ** 2, axis=2))
