"""Command-line front end: ``ohradar generate | detect | roc | gain | fit | bench``.

Every command that writes files also writes a run manifest (JSON) next to
its output recording the command, parameters, seed, tool version and the
written paths. Exit codes: 0 success, 1 I/O or format problem, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, backend
from .core import UsageError, WindowConfig
from .detectors import DetectorSpec, RatioDetector

EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2
GAIN_PFA_LIMIT = 0.1
NOISE_EXCLUSION_BINS = 5


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None = None
    tool_version: str = __version__
    output_paths: list = field(default_factory=list)

    def write(self, path) -> Path:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        os.replace(tmp, path)
        return path


def _manifest_path(out: Path) -> Path:
    return out / "manifest.json" if out.is_dir() else out.with_name(out.name + ".manifest.json")


def _finish(command: str, args: argparse.Namespace, outputs: Sequence[Path], anchor: Path,
            seed: int | None = None) -> int:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    RunManifest(command, params, seed, __version__, [str(p) for p in outputs]).write(
        _manifest_path(anchor))
    return EXIT_OK


# -- argument parsing helpers --------------------------------------------

def parse_window(text: str) -> WindowConfig:
    try:
        n_tc, n_g = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"window must look like 'Ntc,Ng', got {text!r}") from None
    return WindowConfig(n_tc, n_g)


def parse_grid(text: str, geometric: bool) -> np.ndarray:
    """``start:end:count`` grid, geometric for multiplicative thresholds."""
    parts = text.split(":")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise UsageError(f"grid must look like 'start:end:count', got {text!r}") from None
    if len(parts) != 3 or n < 1:
        raise UsageError(f"grid must look like 'start:end:count' with count >= 1, got {text!r}")
    if geometric:
        if not (a > 0 and b > 0):
            raise UsageError("geometric threshold grids need positive endpoints")
        return np.geomspace(a, b, n)
    return np.linspace(a, b, n)


def _load(path):
    from .simulator import load_dataset
    return load_dataset(path)


# -- commands --------------------------------------------------------------

def cmd_generate(args) -> int:
    from .simulator import make_dataset, save_dataset

    ds = make_dataset(args.scenario, args.frames, args.seed)
    out = Path(args.out)
    written = save_dataset(ds, out)
    return _finish("generate", args, written, out, args.seed)


def cmd_detect(args) -> int:
    spec = DetectorSpec.parse(args.detector)
    det = spec.build()
    cfg = parse_window(args.window)
    thr = spec.threshold if spec.threshold is not None else det.default_threshold
    ds = _load(args.data)
    rows = ["frame_id\tbin\tscore"]
    for prof, _ in ds:
        found = det.detect(prof, cfg, thr)
        rows += [f"{prof.frame_id}\t{b}\t{s!r}" for b, s in found.detections]
    out = Path(args.out)
    _atomic_text(out, "\n".join(rows) + "\n")
    return _finish("detect", args, [out], out)


def cmd_roc(args) -> int:
    from .evaluation import roc_sweep, write_roc

    spec = DetectorSpec.parse(args.detector)
    det = spec.build()
    cfg = parse_window(args.window)
    grid = parse_grid(args.grid, geometric=isinstance(det, RatioDetector))
    curve = roc_sweep(_load(args.data), spec, grid, cfg)
    out = write_roc(curve, args.out)
    written = [out]
    if args.plot:
        written.append(plot_roc([curve], out.with_suffix(".svg")))
    return _finish("roc", args, written, out)


def cmd_gain(args) -> int:
    from .evaluation import avg_gain, read_roc

    if not 0 < args.pfa_max <= GAIN_PFA_LIMIT:
        raise UsageError(f"pfa_max must lie in (0, {GAIN_PFA_LIMIT}], got {args.pfa_max}")
    a, b = read_roc(args.roc_a), read_roc(args.roc_b)
    if (a.window.n_train, a.window.n_guard) != (b.window.n_train, b.window.n_guard):
        print("warning: ROC files use different window geometry", file=sys.stderr)
    print(f"{avg_gain(a, b, args.pfa_max):.6f}")
    return EXIT_OK


def noise_samples(dataset, exclusion: int = NOISE_EXCLUSION_BINS) -> np.ndarray:
    """Pool the amplitudes of bins farther than ``exclusion`` from every label."""
    pooled = []
    for prof, labels in dataset:
        keep = np.ones(len(prof), dtype=bool)
        for b in labels:
            keep[max(b - exclusion, 0):b + exclusion + 1] = False
        pooled.append(prof.magnitudes[keep])
    return np.concatenate(pooled) if pooled else np.empty(0)


def cmd_fit(args) -> int:
    from .fitting import Family, ks_fit

    families = list(Family) if args.family == "all" else [Family.parse(args.family)]
    x = noise_samples(_load(args.data))
    results = [ks_fit(x, f).to_dict() for f in families]
    results.sort(key=lambda r: r["ks"])
    text = json.dumps({"n_samples": int(x.size), "fits": results}, indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        _atomic_text(out, text)
        return _finish("fit", args, [out], out)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import format_bench, run_bench

    specs = [DetectorSpec.parse(d) for d in args.detectors.split(";")]
    sizes = [int(v) for v in args.train_sizes.split(",")]
    results = run_bench(_load(args.data).profiles, specs, sizes, args.repetitions)
    text = format_bench(results)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        _atomic_text(out, text)
        return _finish("bench", args, [out], out)
    return EXIT_OK


def _atomic_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def plot_roc(curves, path) -> Path:
    """Write ROC curves as SVG with a logarithmic P_FA axis."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    for c in curves:
        fa, pd = c.p_fa, c.p_d
        keep = fa > 0
        ax.plot(fa[keep], pd[keep], marker=".", label=c.params or c.detector_id)
    ax.set_xscale("log")
    ax.set_xlabel("P_FA")
    ax.set_ylabel("P_D")
    ax.set_ylim(0, 1.02)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ohradar", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--backend", choices=sorted(backend.BACKENDS), help="kernel backend")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="simulate a labelled dataset")
    g.add_argument("--scenario", required=True,
                   help="dense_indoor, two_walkers, homogeneous_noise or clutter_edge")
    g.add_argument("--frames", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("detect", help="run one detector over a dataset")
    d.add_argument("--data", required=True)
    d.add_argument("--detector", required=True, help="e.g. proposed:D=15,T2=0.95")
    d.add_argument("--window", default="20,10", help="Ntc,Ng")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_detect)

    r = sub.add_parser("roc", help="sweep a threshold grid into a ROC file")
    r.add_argument("--data", required=True)
    r.add_argument("--detector", required=True)
    r.add_argument("--window", default="20,10", help="Ntc,Ng")
    r.add_argument("--grid", required=True,
                   help="start:end:count (geometric for alpha-type thresholds)")
    r.add_argument("--out", required=True)
    r.add_argument("--plot", action="store_true", help="also write an SVG plot")
    r.set_defaults(func=cmd_roc)

    a = sub.add_parser("gain", help="average P_D gain of ROC A over ROC B")
    a.add_argument("roc_a")
    a.add_argument("roc_b")
    a.add_argument("--pfa-max", type=float, default=0.01)
    a.set_defaults(func=cmd_gain)

    f = sub.add_parser("fit", help="fit noise-bin amplitude distributions")
    f.add_argument("--data", required=True)
    f.add_argument("--family", default="all")
    f.add_argument("--out")
    f.set_defaults(func=cmd_fit)

    b = sub.add_parser("bench", help="time detectors per profile")
    b.add_argument("--data", required=True)
    b.add_argument("--detectors", default="proposed;os", help="';'-separated detector specs")
    b.add_argument("--train-sizes", default="16,32,64")
    b.add_argument("--repetitions", type=int, default=100)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    from .fitting import FitConvergenceError
    from .simulator import DatasetFormatError

    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend:
        backend.use(args.backend)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ohradar {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DatasetFormatError, ValueError, FitConvergenceError) as exc:
        print(f"ohradar {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
