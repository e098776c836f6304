"""Compare the compiled and pure-Python window loops.

Times each detector's per-profile statistics on both backends, checks the
outputs are bit-identical, and prints a table with the speed-up::

    python3 benchmarks/compare_backends.py --frames 20 --repetitions 5
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

from ohradar import backend
from ohradar.core import WindowConfig
from ohradar.detectors import DETECTOR_NAMES, DetectorSpec
from ohradar.simulator import make_dataset


def median_time(det, profiles, cfg, name, reps):
    samples = []
    for _ in range(reps):
        for prof in profiles:
            t0 = time.perf_counter()
            det.statistics(prof, cfg, name)
            samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def identical(det, profiles, cfg) -> bool:
    for prof in profiles:
        a = det.statistics(prof, cfg, "compiled")
        b = det.statistics(prof, cfg, "python")
        if a.valid.tobytes() != b.valid.tobytes():
            return False
        if any(a.values[k].tobytes() != b.values[k].tobytes() for k in a.values):
            return False
    return True


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--frames", type=int, default=20)
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--window", default="20,10")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if "compiled" not in backend.BACKENDS:
        print("compiled kernels are not built; install with a C compiler and Cython",
              file=sys.stderr)
        return 1
    n_tc, n_g = (int(v) for v in args.window.split(","))
    cfg = WindowConfig(n_tc, n_g)
    profiles = [prof for prof, _ in make_dataset("dense_indoor", args.frames, args.seed)]
    print("detector\tcompiled_us\tpython_us\tspeedup\tbit_identical")
    for name in DETECTOR_NAMES:
        det = DetectorSpec.parse(name).build()
        tc = median_time(det, profiles, cfg, "compiled", args.repetitions)
        tp = median_time(det, profiles, cfg, "python", args.repetitions)
        print(f"{det.ident}\t{tc * 1e6:.1f}\t{tp * 1e6:.1f}\t{tp / tc:.1f}x"
              f"\t{identical(det, profiles, cfg)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
