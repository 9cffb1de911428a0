"""Synthetic data: random T-product linear systems, their trajectories, and
the moving-square video used for background/foreground separation."""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeMismatch, SquareOutOfBounds, TooFewSnapshots
from .rng import SplitMix64
from .spectral import dft3
from .tensor_core import as_tensor3
from .tprod import tprod


@dataclass
class TrajectoryDataset:
    """Ordered snapshots X_0 .. X_{T-1} sharing one (n, h, m) shape."""

    snapshots: list
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.snapshots = [as_tensor3(s) for s in self.snapshots]
        if not self.snapshots:
            raise TooFewSnapshots("dataset has no snapshots")
        shape = self.snapshots[0].shape
        for s in self.snapshots:
            if s.shape != shape:
                raise ShapeMismatch(f"snapshot shape {s.shape} != {shape}")

    def __len__(self):
        return len(self.snapshots)

    def __getitem__(self, t):
        return self.snapshots[t]

    @property
    def shape(self):
        return self.snapshots[0].shape


def spectral_radius(a):
    """Largest eigenvalue modulus over all Fourier slices of ``a``."""
    ah = dft3(a).slices
    return max(np.abs(np.linalg.eigvals(ah[:, :, j])).max()
               for j in range(ah.shape[2]))


def random_system(n, m, seed, spectral_target=1.0):
    """Uniform(-1, 1) transition tensor rescaled to the given spectral radius."""
    if spectral_target <= 0:
        raise ValueError("spectral_target must be positive")
    a = SplitMix64(seed).tensor((n, n, m))
    return np.asfortranarray(a * (spectral_target / spectral_radius(a)))


def random_state(n, h, m, seed):
    return SplitMix64(seed).tensor((n, h, m))


def simulate(a, x0, T, path="fourier"):
    """Iterate X_{t+1} = A * X_t, returning T snapshots X_0 .. X_{T-1}."""
    a, x0 = as_tensor3(a), as_tensor3(x0)
    if a.shape[0] != a.shape[1] or a.shape[1] != x0.shape[0] or a.shape[2] != x0.shape[2]:
        raise ShapeMismatch(f"system {a.shape} incompatible with state {x0.shape}")
    if T < 1:
        raise TooFewSnapshots("T must be >= 1")
    snaps = [x0]
    for _ in range(T - 1):
        snaps.append(tprod(a, snaps[-1], path=path))
    return TrajectoryDataset(snaps, {"kind": "simulate", "T": T})


def random_trajectory(n=10, h=1, m=6, T=20, seed=0, spectral_target=1.0):
    """Random system plus random initial state; the benchmark configuration."""
    a = random_system(n, m, seed, spectral_target)
    x0 = random_state(n, h, m, seed + 1)
    data = simulate(a, x0, T)
    data.provenance = {"kind": "random_system", "seed": seed, "n": n, "h": h,
                       "m": m, "T": T, "spectral_target": spectral_target}
    return a, data


@dataclass
class VideoTruth:
    background: np.ndarray
    columns: list
    top_row: int
    square_size: int

    def square_mask(self, t):
        rows, cols = self.background.shape
        mask = np.zeros((rows, cols), dtype=bool)
        c = self.columns[t]
        s = self.square_size
        mask[self.top_row:self.top_row + s, c:c + s] = True
        return mask


def default_speed(cols, square_size, frames):
    return (cols - square_size) / max(frames - 1, 1)


def frame_to_snapshot(frame):
    """Map an r x c frame to an r x 1 x c snapshot (pixel (i, k) -> [i, 0, k])."""
    return np.asfortranarray(np.asarray(frame, dtype=np.float64)[:, np.newaxis, :])


def snapshot_to_frame(snapshot):
    snapshot = np.asarray(snapshot)
    if snapshot.ndim != 3 or snapshot.shape[1] != 1:
        raise ShapeMismatch(f"snapshot {snapshot.shape} is not r x 1 x c")
    return snapshot[:, 0, :]


def synth_video(rows=60, cols=60, frames=20, seed=0, square_size=10,
                intensity=1.0, bg_base=0.3, bg_noise=0.2, speed=None, start=1):
    """Fixed noisy background with a square moving left to right.

    ``start`` is the 1-based left column of the square in frame 0; the left
    column at frame t is round(start + speed * t). Returns the dataset and a
    ``VideoTruth`` (0-based square columns).
    """
    if speed is None:
        speed = default_speed(cols, square_size, frames)
    if square_size > rows:
        raise SquareOutOfBounds(f"square size {square_size} exceeds {rows} rows")
    background = bg_base + bg_noise * SplitMix64(seed).uniform(rows * cols).reshape(
        (rows, cols), order="F")
    top = (rows - square_size) // 2
    columns = []
    for t in range(frames):
        left = math.floor(start + speed * t + 0.5) - 1
        if left < 0 or left + square_size > cols:
            raise SquareOutOfBounds(
                f"square at column {left + 1} leaves the {cols}-column frame at t={t}")
        columns.append(left)
    snaps = []
    for left in columns:
        frame = background.copy()
        frame[top:top + square_size, left:left + square_size] = intensity
        snaps.append(frame_to_snapshot(frame))
    data = TrajectoryDataset(snaps, {
        "kind": "synth_video", "seed": seed, "rows": rows, "cols": cols,
        "frames": frames, "square_size": square_size, "intensity": intensity,
        "bg_base": bg_base, "bg_noise": bg_noise, "speed": speed, "start": start})
    return data, VideoTruth(background, columns, top, square_size)
