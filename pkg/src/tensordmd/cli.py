"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bench
from .dmd import DmdModel, dmd_fit, dmd_reconstruct, dmd_separate
from .dynsys import TrajectoryDataset, random_trajectory, synth_video
from .errors import DataError, NumericalError, TensorDMDError
from .formats import (FRAME_COLUMNS, TABLE1_COLUMNS, load_model, read_frame_stack,
                      read_tensor, save_model, write_frame, write_metrics_csv,
                      write_pgm, write_tensor)
from .tdmd import (DEFAULT_EPSILON, parameter_counts, resolve_threads, separate,
                   tdmd_fit, tdmd_reconstruct)

EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def load_dataset(path):
    """Snapshots from ``snap_*.tns`` files or ``*.pgm`` frames in a directory."""
    path = Path(path)
    if not path.is_dir():
        raise DataError(f"{path} is not a directory")
    tns = sorted(path.glob("snap_*.tns"), key=lambda p: p.name)
    if tns:
        return TrajectoryDataset([read_tensor(p) for p in tns],
                                 {"kind": "ingested", "source": str(path)})
    return read_frame_stack(path)


def _write_state(out, x, normalize=False):
    out = Path(out)
    if out.suffix == ".pgm":
        write_frame(out, x, normalize=normalize)
    else:
        write_tensor(out, x)


def cmd_synth_random(args):
    a, data = random_trajectory(args.n, args.h, args.m, args.T, args.seed,
                                args.spectral_target)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_tensor(out / "system.tns", a)
    for t, x in enumerate(data.snapshots):
        write_tensor(out / f"snap_{t:04d}.tns", x)
    print(f"wrote system {a.shape} and {len(data)} snapshots to {out}")


def cmd_synth_video(args):
    kwargs = {}
    if args.speed is not None:
        kwargs["speed"] = args.speed
    data, truth = synth_video(args.rows, args.cols, args.frames, args.seed,
                              square_size=args.square_size, **kwargs)
    out = Path(args.out)
    (out / "truth").mkdir(parents=True, exist_ok=True)
    for t, x in enumerate(data.snapshots):
        write_frame(out / f"frame_{t + 1:04d}.pgm", x)
    write_pgm(out / "truth" / "background.pgm", truth.background)
    write_tensor(out / "truth" / "background.tns", truth.background[:, None, :])
    info = {"columns": truth.columns, "top_row": truth.top_row,
            "square_size": truth.square_size, **data.provenance}
    (out / "truth" / "squares.json").write_text(json.dumps(info, sort_keys=True, indent=1) + "\n")
    print(f"wrote {len(data)} frames to {out}")


def cmd_fit(args):
    data = load_dataset(args.data)
    n, h, m = data.shape
    threads = resolve_threads(args.threads)
    t0 = time.perf_counter()
    if args.method == "tdmd":
        model = tdmd_fit(data, args.truncate, threads=threads, pairing=args.pairing)
    else:
        model = dmd_fit(data, args.truncate)
    elapsed = time.perf_counter() - t0
    save_model(args.out, model)
    if args.method == "tdmd":
        for name in ("x_minus", "x_plus"):
            rep = model.diagnostics[name]
            print(f"identifiability {name}: identifiable={rep['identifiable']} "
                  f"min_fourier_singular={rep['min_fourier_singular_entry']:.6e} "
                  f"relative={rep['relative_min']:.6e}")
        print(f"tubal rank X-: {model.rank}; retained tubes: {model.k}")
        if model.diagnostics["defective_slices"]:
            print(f"defective Fourier slices: {model.diagnostics['defective_slices']}")
        print(f"parameters: {model.parameter_count}")
    else:
        print(f"retained rank: {model.r}; parameters: {model.parameter_count}")
    if args.truncate < n:
        counts = parameter_counts(n, h, m, args.truncate)
        print(f"closed-form parameter counts: tdmd={counts['tdmd']} "
              f"dmd_flat={counts['dmd_flat']}")
    print(f"fit time: {elapsed:.6f} s")


def _reconstruct(model, t):
    if isinstance(model, DmdModel):
        return dmd_reconstruct(model, t)
    return tdmd_reconstruct(model, t)


def cmd_reconstruct(args):
    model = load_model(args.model)
    _write_state(args.out, _reconstruct(model, args.t), args.normalize)
    suffix = " (prediction)" if args.t >= model.T else ""
    print(f"wrote state t={args.t}{suffix} to {args.out}")


def cmd_separate(args):
    model = load_model(args.model)
    if isinstance(model, DmdModel):
        pers, trans, mask = dmd_separate(model, args.epsilon, args.t)
        summary = {"persistent_modes": int(mask.sum()), "transient_modes": int((~mask).sum())}
    else:
        sep = separate(model, args.epsilon)
        pers, trans = sep.components(args.t)
        summary = {"persistent_tubes": sep.persistent_tubes,
                   "transient_tubes": sep.transient_tubes}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_tensor(out / "persistent.tns", pers)
    write_tensor(out / "transient.tns", trans)
    if pers.shape[1] == 1:
        write_frame(out / "persistent.pgm", pers)
        write_frame(out / "transient.pgm", trans, normalize=True)
    summary.update(epsilon=args.epsilon, t=args.t)
    (out / "separation.json").write_text(json.dumps(summary, sort_keys=True) + "\n")
    print(json.dumps(summary, sort_keys=True))


def cmd_benchmark(args):
    threads = resolve_threads(args.threads)
    if args.which == "table1":
        rows = bench.table1(seed=args.seed, levels=range(args.levels), threads=threads)
        out = Path(args.out)
        if out.parent:
            out.parent.mkdir(parents=True, exist_ok=True)
        write_metrics_csv(out, TABLE1_COLUMNS, rows)
        for r in rows:
            print(f"l={r['truncation_level']} err_tdmd={r['err_tdmd']:.3e} "
                  f"err_dmd={r['err_dmd']:.3e} params {r['params_tdmd']} vs {r['params_dmd']}")
        return
    res = bench.video(seed=args.seed, epsilon=args.epsilon, threads=threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_metrics_csv(out / "per_frame_errors.csv", FRAME_COLUMNS, res.rows)
    frame = res.scores["frame"]
    for name, x in res.frames.items():
        write_frame(out / f"frame{frame:02d}_{name}.pgm", x,
                    normalize=name.endswith("transient"))
        write_tensor(out / f"frame{frame:02d}_{name}.tns", x)
    (out / "separation.json").write_text(json.dumps(res.scores, sort_keys=True, indent=1) + "\n")
    print(json.dumps(res.scores, sort_keys=True))


def build_parser():
    p = _Parser(prog="tensordmd", description="Tensor dynamic mode decomposition toolkit")
    p.add_argument("--threads", type=int, default=None,
                   help="slice-parallel worker threads (default: $TDMD_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth-random", help="random T-product system and trajectory")
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--h", type=int, default=1)
    s.add_argument("--m", type=int, default=6)
    s.add_argument("--T", type=int, default=20)
    s.add_argument("--seed", type=int, default=bench.TABLE1_SEED)
    s.add_argument("--spectral-target", type=float, default=1.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth_random)

    s = sub.add_parser("synth-video", help="moving-square video as PGM frames")
    s.add_argument("--rows", type=int, default=60)
    s.add_argument("--cols", type=int, default=60)
    s.add_argument("--frames", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--speed", type=float, default=None)
    s.add_argument("--square-size", type=int, default=10)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth_video)

    s = sub.add_parser("fit", help="fit a TDMD or DMD model")
    s.add_argument("method", choices=["tdmd", "dmd"])
    s.add_argument("--data", required=True)
    s.add_argument("--truncate", type=int, default=0)
    s.add_argument("--pairing", choices=["unit", "modulus"], default="unit")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("reconstruct", help="reconstruct or predict a state")
    s.add_argument("--model", required=True)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--normalize", action="store_true")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("separate", help="persistent/transient split at step t")
    s.add_argument("--model", required=True)
    s.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_separate)

    s = sub.add_parser("benchmark", help="reproduce the experiment tables")
    s.add_argument("which", choices=["table1", "video"])
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--levels", type=int, default=7, help="table1: levels 0..N-1")
    s.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_benchmark)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "benchmark" and args.seed is None:
            args.seed = bench.TABLE1_SEED if args.which == "table1" else 0
        if getattr(args, "t", 0) is not None and getattr(args, "t", 0) < 0:
            raise UsageError("--t must be nonnegative")
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, TensorDMDError, OSError) as exc:
        print(f"data error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
