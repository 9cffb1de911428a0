"""Experiment drivers behind ``tensordmd benchmark``.

``table1`` sweeps truncation levels on a random T-product system and compares
TDMD with flattened DMD; ``video`` runs per-frame reconstruction and frame-10
separation on the synthetic moving-square video.
"""
import time
from dataclasses import dataclass

import numpy as np

from .dmd import dmd_fit, dmd_reconstruct, dmd_separate
from .dynsys import random_trajectory, snapshot_to_frame, synth_video
from .tdmd import (DEFAULT_EPSILON, parameter_counts, per_frame_errors, separate,
                   tdmd_fit, tdmd_reconstruct, total_relative_error)

TABLE1_SEED = 10
BYTES_PER_REAL = 8


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def table1(seed=TABLE1_SEED, levels=range(7), n=10, h=1, m=6, T=20,
           spectral_target=1.0, threads=1):
    """One row per truncation level in the Table-1 column layout."""
    _, data = random_trajectory(n, h, m, T, seed, spectral_target)
    rows = []
    for level in levels:
        tm, t_tdmd = _timed(tdmd_fit, data, level, threads=threads)
        dm, t_dmd = _timed(dmd_fit, data, level)
        counts = parameter_counts(n, h, m, level)
        rows.append({
            "truncation_level": level,
            "time_tdmd_s": t_tdmd,
            "time_dmd_s": t_dmd,
            "params_tdmd": counts["tdmd"],
            "params_dmd": counts["dmd_flat"],
            "err_tdmd": total_relative_error(lambda t: tdmd_reconstruct(tm, t), data.snapshots),
            "err_dmd": total_relative_error(lambda t: dmd_reconstruct(dm, t), data.snapshots),
            "bytes_tdmd": counts["tdmd"] * BYTES_PER_REAL,
            "bytes_dmd": counts["dmd_flat"] * BYTES_PER_REAL,
        })
    return rows


def background_error(persistent, truth):
    bg = truth.background
    return float(np.linalg.norm(snapshot_to_frame(persistent) - bg) / np.linalg.norm(bg))


def square_energy_fraction(transient, truth, t):
    frame = snapshot_to_frame(transient)
    total = float(np.sum(frame ** 2))
    if total == 0.0:
        return 0.0
    return float(np.sum(frame[truth.square_mask(t)] ** 2) / total)


@dataclass
class VideoResult:
    rows: list
    frames: dict
    scores: dict


def video(seed=0, epsilon=DEFAULT_EPSILON, frame=10, threads=1, **video_kw):
    """Per-frame errors for frames 2..N and separation at ``frame`` (1-based)."""
    data, truth = synth_video(seed=seed, **video_kw)
    tm = tdmd_fit(data, 0, threads=threads)
    dm = dmd_fit(data, 0)
    err_t = per_frame_errors(lambda t: tdmd_reconstruct(tm, t), data.snapshots, start=1)
    err_d = per_frame_errors(lambda t: dmd_reconstruct(dm, t), data.snapshots, start=1)
    rows = [{"frame": i + 2, "err_tdmd": a, "err_dmd": b}
            for i, (a, b) in enumerate(zip(err_t, err_d))]
    t = frame - 1
    sep = separate(tm, epsilon)
    tp, tt = sep.components(t)
    dp, dt, dpers = dmd_separate(dm, epsilon, t)
    frames = {"original": data.snapshots[t], "background": truth.background[:, None, :],
              "tdmd_persistent": tp, "tdmd_transient": tt,
              "dmd_persistent": dp, "dmd_transient": dt}
    scores = {
        "frame": frame, "epsilon": epsilon,
        "tdmd_persistent_tubes": sep.persistent_tubes,
        "tdmd_background_error": background_error(tp, truth),
        "tdmd_square_energy": square_energy_fraction(tt, truth, t),
        "dmd_persistent_modes": int(np.sum(dpers)),
        "dmd_background_error": background_error(dp, truth),
        "dmd_square_energy": square_energy_fraction(dt, truth, t),
        "tdmd_wins": int(sum(a < b for a, b in zip(err_t, err_d))),
    }
    return VideoResult(rows, frames, scores)
