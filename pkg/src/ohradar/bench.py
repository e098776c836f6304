"""Per-profile timing and operation counts of the detectors.

Wall time is measured on the active backend (compiled when available)
for the full detection of one profile: window statistics plus the
threshold decision. Operation counts come from an instrumented run of the
pure-Python reference loops and are deterministic; the decision adds one
comparison per evaluated CUT.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import backend
from ._reference import OpCounter
from .core import UsageError, WindowConfig
from .detectors import Detector, DetectorSpec


@dataclass(frozen=True)
class BenchResult:
    detector: str
    n_train: int
    n_guard: int
    backend: str
    repetitions: int
    n_profiles: int
    median_s: float
    comparisons: float
    macs: float
    sorts: float

    def as_dict(self) -> dict:
        return asdict(self)


def _detector(d) -> Detector:
    if isinstance(d, Detector):
        return d
    spec = d if isinstance(d, DetectorSpec) else DetectorSpec.parse(str(d))
    return spec.build()


def count_ops(detector: Detector, profiles: Sequence, cfg: WindowConfig) -> OpCounter:
    """Mean operation counts per profile from the instrumented reference loops."""
    total = OpCounter()
    for prof in profiles:
        ops = OpCounter()
        st = detector.statistics(prof, cfg, ops=ops)
        ops.comparisons += int(np.count_nonzero(st.valid))
        total += ops
    n = len(profiles)
    return OpCounter(total.comparisons / n, total.macs / n, total.sorts / n)


def time_profiles(detector: Detector, profiles: Sequence, cfg: WindowConfig,
                  repetitions: int, backend_name: str | None = None) -> float:
    """Median wall time (seconds) of one profile's detection over all passes."""
    thr = detector.default_threshold
    samples = []
    for _ in range(repetitions):
        for prof in profiles:
            t0 = time.perf_counter()
            st = detector.statistics(prof, cfg, backend_name)
            detector.decide(st, thr)
            samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def run_bench(profiles: Sequence, detectors: Sequence, train_sizes: Sequence[int] = (16, 32, 64),
              repetitions: int = 10, backend_name: str | None = None,
              with_ops: bool = True) -> list[BenchResult]:
    """Benchmark each detector at each training size (guard = half the training cells).

    ``profiles`` holds :class:`~ohradar.core.RangeProfile` objects or
    ``(profile, labels)`` pairs.
    """
    if repetitions < 1:
        raise UsageError("repetitions must be >= 1")
    profs = [p[0] if isinstance(p, tuple) else p for p in profiles]
    if not profs:
        raise UsageError("no profiles to benchmark")
    name = backend_name or backend.active()
    out = []
    for det in map(_detector, detectors):
        for n_tc in train_sizes:
            cfg = WindowConfig(int(n_tc), int(n_tc) // 2)
            med = time_profiles(det, profs, cfg, repetitions, name)
            ops = count_ops(det, profs, cfg) if with_ops else OpCounter(np.nan, np.nan, np.nan)
            out.append(BenchResult(det.ident, cfg.n_train, cfg.n_guard, name, repetitions,
                                   len(profs), med, ops.comparisons, ops.macs, ops.sorts))
    return out


def format_bench(results: Sequence[BenchResult]) -> str:
    head = "detector\tn_train\tn_guard\tbackend\tmedian_us\tcomparisons\tmacs\tsorts"
    rows = [
        f"{r.detector}\t{r.n_train}\t{r.n_guard}\t{r.backend}\t{r.median_s * 1e6:.2f}"
        f"\t{r.comparisons:.1f}\t{r.macs:.1f}\t{r.sorts:.1f}"
        for r in results
    ]
    return "\n".join([head, *rows]) + "\n"
