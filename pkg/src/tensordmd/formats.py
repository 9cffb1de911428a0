"""File formats: TNS1/TNC1 binary tensors, P5 PGM frames, metric CSVs and
model bundles.

Tensor record layout (all little-endian)::

    magic   4 bytes   b"TNS1" (float64) or b"TNC1" (complex128, re/im interleaved)
    n, h, m 3 x u32
    payload n*h*m values, mode-1 index fastest
"""
import csv
import json
import os
import struct
import sys
from pathlib import Path

import numpy as np

from .dynsys import TrajectoryDataset, frame_to_snapshot, snapshot_to_frame
from .errors import (BadMagic, ExtentOverflow, InconsistentFrameSize, IoFailure,
                     TruncatedFile, UnsupportedPgm)

_HEADER = struct.Struct("<4sIII")
_U32_MAX = 2 ** 32 - 1

TABLE1_COLUMNS = ["truncation_level", "time_tdmd_s", "time_dmd_s", "params_tdmd",
                  "params_dmd", "err_tdmd", "err_dmd", "bytes_tdmd", "bytes_dmd"]
FRAME_COLUMNS = ["frame", "err_tdmd", "err_dmd"]


def tensor_to_bytes(x):
    x = np.asarray(x)
    if x.ndim != 3:
        raise ExtentOverflow(f"expected a third-order tensor, got ndim={x.ndim}")
    if any(e > _U32_MAX for e in x.shape):
        raise ExtentOverflow(f"extent exceeds u32: {x.shape}")
    if np.iscomplexobj(x):
        magic, payload = b"TNC1", np.asarray(x, dtype="<c16")
    else:
        magic, payload = b"TNS1", np.asarray(x, dtype="<f8")
    return _HEADER.pack(magic, *x.shape) + payload.tobytes(order="F")


def tensor_from_buffer(buf, offset=0):
    """Parse one tensor record; returns (tensor, offset past the record)."""
    if len(buf) - offset < _HEADER.size:
        if len(buf) - offset >= 4 and bytes(buf[offset:offset + 4]) not in (b"TNS1", b"TNC1"):
            raise BadMagic(f"bad magic {bytes(buf[offset:offset + 4])!r}")
        raise TruncatedFile("file ends inside the tensor header")
    magic, n, h, m = _HEADER.unpack_from(buf, offset)
    if magic == b"TNS1":
        dtype, width = np.dtype("<f8"), 8
    elif magic == b"TNC1":
        dtype, width = np.dtype("<c16"), 16
    else:
        raise BadMagic(f"bad magic {magic!r}")
    if min(n, h, m) < 1:
        raise ExtentOverflow(f"invalid extents {(n, h, m)}")
    count = n * h * m
    if count * width > sys.maxsize:
        raise ExtentOverflow(f"extents {(n, h, m)} overflow the address space")
    start = offset + _HEADER.size
    end = start + count * width
    if end > len(buf):
        raise TruncatedFile(
            f"header promises {count * width} payload bytes, {len(buf) - start} present")
    data = np.frombuffer(buf, dtype=dtype, count=count, offset=start)
    x = data.reshape((n, h, m), order="F").astype(dtype.newbyteorder("="))
    return np.asfortranarray(x), end


def write_tensor(path, x):
    try:
        Path(path).write_bytes(tensor_to_bytes(x))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def read_tensor(path):
    try:
        buf = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    x, _ = tensor_from_buffer(buf)
    return x


# --- PGM ---------------------------------------------------------------------

def _pgm_tokens(buf, count):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, i = [], 0
    while len(tokens) < count:
        while i < len(buf) and chr(buf[i]).isspace():
            i += 1
        if i < len(buf) and buf[i:i + 1] == b"#":
            while i < len(buf) and buf[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < len(buf) and not chr(buf[i]).isspace() and buf[i:i + 1] != b"#":
            i += 1
        if start == i:
            raise UnsupportedPgm("incomplete PGM header")
        tokens.append(buf[start:i])
    # exactly one whitespace byte separates the header from the raster
    return tokens, i + 1


def read_pgm(path):
    """Read a binary 8-bit PGM as a float array scaled to [0, 1]."""
    try:
        buf = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if buf[:2] != b"P5":
        raise UnsupportedPgm(f"{path}: only binary P5 PGM is supported")
    (_, w, h, maxval), start = _pgm_tokens(buf, 4)
    w, h, maxval = int(w), int(h), int(maxval)
    if maxval != 255:
        raise UnsupportedPgm(f"{path}: maxval {maxval} != 255")
    raster = buf[start:start + w * h]
    if len(raster) < w * h:
        raise TruncatedFile(f"{path}: raster shorter than {w}x{h}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).astype(np.float64) / 255.0


def frame_to_bytes(frame, normalize=False):
    frame = np.asarray(frame, dtype=np.float64)
    if normalize:
        lo, hi = frame.min(), frame.max()
        scaled = (frame - lo) / (hi - lo) if hi > lo else np.zeros_like(frame)
    else:
        scaled = np.clip(frame, 0.0, 1.0)
    pixels = np.floor(scaled * 255.0 + 0.5).astype(np.uint8)
    rows, cols = pixels.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + pixels.tobytes()


def write_pgm(path, frame, normalize=False):
    try:
        Path(path).write_bytes(frame_to_bytes(frame, normalize))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def write_frame(path, snapshot, normalize=False):
    """Write an r x 1 x c snapshot as an r x c PGM frame."""
    write_pgm(path, snapshot_to_frame(snapshot), normalize)


def read_frame_stack(source):
    """Read PGM frames (a directory's ``*.pgm`` or a list of paths) as snapshots.

    Frames are ordered lexicographically by file name.
    """
    if isinstance(source, (str, os.PathLike)) and Path(source).is_dir():
        paths = sorted(Path(source).glob("*.pgm"), key=lambda p: p.name)
        origin = str(source)
    else:
        paths = sorted((Path(p) for p in source), key=lambda p: p.name)
        origin = [str(p) for p in paths]
    if not paths:
        raise IoFailure(f"no PGM frames found in {source}")
    frames = [read_pgm(p) for p in paths]
    shape = frames[0].shape
    for p, f in zip(paths, frames):
        if f.shape != shape:
            raise InconsistentFrameSize(f"{p.name}: {f.shape} != {shape}")
    return TrajectoryDataset([frame_to_snapshot(f) for f in frames],
                             {"kind": "ingested", "source": origin})


# --- CSV ---------------------------------------------------------------------

def _render(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def metrics_to_text(columns, rows):
    """CSV text with LF line endings; floats in shortest round-trip form."""
    lines = [",".join(columns)]
    for row in rows:
        if isinstance(row, dict):
            row = [row[c] for c in columns]
        lines.append(",".join(_render(v) for v in row))
    return "\n".join(lines) + "\n"


def write_metrics_csv(path, columns, rows):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(metrics_to_text(columns, rows))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def read_metrics_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]


# --- model bundles -----------------------------------------------------------
#
# b"TDMB" | u32 header length | JSON header | tensor records (one per array,
# in header order, arrays of ndim < 3 padded with trailing unit extents).

_BUNDLE_MAGIC = b"TDMB"


def _pad3(a):
    a = np.asarray(a)
    if a.dtype == bool:
        a = a.astype(np.float64)
    return a.reshape(a.shape + (1,) * (3 - a.ndim), order="F")


def write_bundle(path, meta, arrays):
    names = list(arrays)
    header = dict(meta, arrays=[{"name": k, "shape": list(np.shape(arrays[k])),
                                 "bool": np.asarray(arrays[k]).dtype == bool}
                                for k in names])
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    body = b"".join(tensor_to_bytes(_pad3(arrays[k])) for k in names)
    try:
        Path(path).write_bytes(_BUNDLE_MAGIC + struct.pack("<I", len(head)) + head + body)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def read_bundle(path):
    try:
        buf = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if buf[:4] != _BUNDLE_MAGIC:
        raise BadMagic(f"{path}: not a model bundle")
    if len(buf) < 8:
        raise TruncatedFile(f"{path}: truncated bundle header")
    (hlen,) = struct.unpack_from("<I", buf, 4)
    if len(buf) < 8 + hlen:
        raise TruncatedFile(f"{path}: truncated bundle header")
    header = json.loads(buf[8:8 + hlen])
    offset = 8 + hlen
    arrays = {}
    for spec in header.pop("arrays"):
        x, offset = tensor_from_buffer(buf, offset)
        a = x.reshape(spec["shape"], order="F")
        if a.ndim < 3:
            a = np.ascontiguousarray(a)
        arrays[spec["name"]] = a.astype(bool) if spec["bool"] else a
    return header, arrays


_TDMD_ARRAYS = ("A_tilde", "modes", "eigentubes", "amplitudes", "eigentube_norms",
                "defective", "u_hat", "a_hat", "modes_hat", "d_hat", "b_hat", "x0_hat")
_DMD_ARRAYS = ("A_tilde", "modes", "eigvals", "amplitudes")


def save_model(path, model):
    """Write a ``TdmdModel`` or ``DmdModel`` as a bundle."""
    from .dmd import DmdModel
    from .tdmd import TdmdModel

    if isinstance(model, TdmdModel):
        meta = {"kind": "tdmd", "truncate_l": model.truncate_l, "rank": model.rank,
                "shape": list(model.shape), "T": model.T,
                "diagnostics": model.diagnostics}
        arrays = {k: getattr(model, k) for k in _TDMD_ARRAYS}
    elif isinstance(model, DmdModel):
        meta = {"kind": "dmd", "truncate_l": model.truncate_l, "r": model.r,
                "shape": list(model.shape), "T": model.T,
                "defective": bool(model.defective)}
        arrays = {k: getattr(model, k) for k in _DMD_ARRAYS}
    else:
        raise TypeError(f"cannot save {type(model).__name__}")
    write_bundle(path, meta, arrays)


def load_model(path):
    from .dmd import DmdModel
    from .tdmd import TdmdModel

    meta, arrays = read_bundle(path)
    kind = meta.get("kind")
    if kind == "tdmd":
        return TdmdModel(truncate_l=meta["truncate_l"], rank=meta["rank"],
                         shape=tuple(meta["shape"]), T=meta["T"],
                         diagnostics=meta["diagnostics"], **arrays)
    if kind == "dmd":
        return DmdModel(truncate_l=meta["truncate_l"], r=meta["r"],
                        shape=tuple(meta["shape"]), T=meta["T"],
                        defective=meta["defective"], **arrays)
    raise BadMagic(f"{path}: unknown model kind {kind!r}")
