"""ROC evaluation against labelled range profiles.

Per frame ``i`` a label is *detected* when some detection lies within
``tol_bins`` of it, and a detection is a *false alarm* when no label lies
within ``tol_bins``. The two counts are independent (no one-to-one
assignment). Over a dataset::

    P_D  = mean_i N_D[i] / l[i]     (frames without labels skipped)
    P_FA = mean_i N_FA[i] / L

ROC file format (tab-separated text)::

    # detector: proposed:D=15
    # n_train: 20
    # n_guard: 10
    # boundary: shrink
    # threshold_name: T2
    # params: proposed:D=15
    threshold   p_fa    p_d
    0.5         0.0123  0.91
    ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import Boundary, DetectionSet, LabelSet, UsageError, WindowConfig
from .detectors import Detector, DetectorSpec, ProposedDetector

DEFAULT_TOL_BINS = 5


@dataclass(frozen=True)
class MatchCounts:
    n_detected_labels: int
    n_false_alarms: int
    n_labels: int
    n_bins: int


def _bins_of(det) -> np.ndarray:
    if isinstance(det, DetectionSet):
        return np.asarray(det.bins, dtype=np.int64)
    return np.asarray(list(det), dtype=np.int64)


def match_detections(det: DetectionSet | Iterable[int], labels: LabelSet | Iterable[int],
                     tol_bins: int = DEFAULT_TOL_BINS, n_bins: int = 256) -> MatchCounts:
    if tol_bins < 0:
        raise UsageError("tol_bins must be >= 0")
    d = _bins_of(det)
    lab = np.asarray(tuple(labels), dtype=np.int64)
    if d.size == 0 or lab.size == 0:
        return MatchCounts(0, int(d.size), int(lab.size), n_bins)
    close = np.abs(d[:, None] - lab[None, :]) <= tol_bins
    return MatchCounts(int(close.any(axis=0).sum()), int((~close.any(axis=1)).sum()),
                       int(lab.size), n_bins)


def aggregate(counts: Sequence[MatchCounts]) -> tuple[float, float]:
    """Frame-averaged ``(p_d, p_fa)``; ``p_d`` is NaN when no frame has labels."""
    if not counts:
        raise UsageError("aggregate needs at least one frame")
    pd_terms = [c.n_detected_labels / c.n_labels for c in counts if c.n_labels > 0]
    pfa_terms = [c.n_false_alarms / c.n_bins for c in counts]
    p_d = math.fsum(pd_terms) / len(pd_terms) if pd_terms else math.nan
    return p_d, math.fsum(pfa_terms) / len(pfa_terms)


class _LabelIndex:
    """Precomputed label neighbourhoods of one frame for fast matching."""

    def __init__(self, labels: LabelSet, n_bins: int, tol: int):
        lab = np.asarray(tuple(labels), dtype=np.int64)
        self.n_labels = lab.size
        self.n_bins = n_bins
        near = np.zeros(n_bins, dtype=bool)
        for b in lab:
            near[max(b - tol, 0):b + tol + 1] = True
        self.far = ~near
        self.lo = np.clip(lab - tol, 0, n_bins)
        self.hi = np.clip(lab + tol + 1, 0, n_bins)

    def counts(self, masks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-row (N_D, N_FA) for a (n_thresholds, L) detection-mask matrix."""
        n_fa = (masks & self.far).sum(axis=1)
        if self.n_labels == 0:
            return np.zeros(len(masks), dtype=np.int64), n_fa
        cs = np.concatenate([np.zeros((len(masks), 1), dtype=np.int64),
                             np.cumsum(masks, axis=1)], axis=1)
        hit = (cs[:, self.hi] - cs[:, self.lo]) > 0
        return hit.sum(axis=1), n_fa


@dataclass(frozen=True)
class RocCurve:
    """(threshold, p_fa, p_d) points sorted by threshold."""

    points: tuple
    detector_id: str
    window: WindowConfig = field(default_factory=WindowConfig)
    threshold_name: str = "threshold"
    params: str = ""

    @property
    def thresholds(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def p_fa(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def p_d(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])

    def __len__(self) -> int:
        return len(self.points)


def _as_detector(detector) -> tuple[Detector, str]:
    if isinstance(detector, Detector):
        return detector, detector.ident
    spec = detector if isinstance(detector, DetectorSpec) else DetectorSpec.parse(detector)
    return spec.build(), str(spec)


def roc_sweep(dataset, detector, thresholds: Sequence[float], window: WindowConfig,
              tol_bins: int = DEFAULT_TOL_BINS) -> RocCurve:
    """Evaluate ``detector`` at every threshold over every frame.

    Each profile's window statistics are computed once and thresholded
    for the whole grid.
    """
    thr = np.asarray(sorted(float(t) for t in thresholds))
    if thr.size == 0:
        raise UsageError("threshold grid is empty")
    det, ident = _as_detector(detector)
    nd_terms = [[] for _ in thr]
    fa_terms = [[] for _ in thr]
    for prof, labels in dataset:
        st = det.statistics(prof, window)
        masks = np.stack([det.decide(st, t) for t in thr])
        idx = _LabelIndex(labels, len(prof), tol_bins)
        n_d, n_fa = idx.counts(masks)
        for j in range(thr.size):
            if idx.n_labels:
                nd_terms[j].append(int(n_d[j]) / idx.n_labels)
            fa_terms[j].append(int(n_fa[j]) / idx.n_bins)
    points = []
    for j, t in enumerate(thr):
        p_d = math.fsum(nd_terms[j]) / len(nd_terms[j]) if nd_terms[j] else math.nan
        points.append((float(t), math.fsum(fa_terms[j]) / len(fa_terms[j]), p_d))
    return RocCurve(tuple(points), det.ident, window, det.threshold_name, ident)


def pd_at(curve: RocCurve, pfa: np.ndarray | Sequence[float]) -> np.ndarray:
    """P_D of the curve's monotone upper envelope at the given P_FA values.

    Linear interpolation between measured operating points; beyond the
    largest measured P_FA the last P_D is held; below the smallest
    measured P_FA the curve has no operating point and P_D is 0.
    """
    pfa = np.atleast_1d(np.asarray(pfa, dtype=float))
    pts = [(fa, d) for _, fa, d in curve.points if not (math.isnan(fa) or math.isnan(d))]
    if not pts:
        return np.zeros_like(pfa)
    pts.sort()
    xs, ys = [], []
    for fa, d in pts:
        if xs and fa == xs[-1]:
            ys[-1] = max(ys[-1], d)
        else:
            xs.append(fa)
            ys.append(d)
    env = np.maximum.accumulate(np.asarray(ys))
    out = np.interp(pfa, np.asarray(xs), env)
    out[pfa < xs[0]] = 0.0
    return out


def gain_grid(pfa_max: float, n: int = 20, pfa_min: float = 1e-4) -> np.ndarray:
    return np.geomspace(pfa_min, pfa_max, n)


def avg_gain(ours: RocCurve, baseline: RocCurve, pfa_max: float = 0.01,
             grid: np.ndarray | None = None) -> float:
    """Mean P_D advantage of ``ours`` over ``baseline`` in percentage points."""
    if not 0 < pfa_max <= 1:
        raise UsageError(f"pfa_max must lie in (0, 1], got {pfa_max}")
    grid = gain_grid(pfa_max) if grid is None else np.asarray(grid, dtype=float)
    return float(np.mean(pd_at(ours, grid) - pd_at(baseline, grid)) * 100.0)


@dataclass(frozen=True)
class DLimit:
    dim: int
    min_reachable_pfa: float
    max_reachable_pd: float
    pd_at_min_pfa: float = math.nan
    pfa_at_max_pd: float = math.nan

    def __iter__(self):
        return iter((self.dim, self.min_reachable_pfa, self.max_reachable_pd))


# Largest double below 1: score > T2_TOP  <=>  score == 1.
T2_TOP = float(np.nextafter(1.0, 0.0))


def min_pfa_study(dataset, d_values: Sequence[int], window: WindowConfig,
                  tol_bins: int = DEFAULT_TOL_BINS) -> list[DLimit]:
    """Limiting operating points of the proposed detector for each ``D``.

    ``T2 -> 1-`` gives the minimum reachable P_FA and ``T2 -> 0+`` the
    maximum reachable P_D; both limits are evaluated exactly.
    """
    out = []
    for d in d_values:
        if int(d) != d or d < 1:
            raise UsageError(f"D must be a positive integer, got {d}")
        curve = roc_sweep(dataset, ProposedDetector(int(d)), [0.0, T2_TOP], window, tol_bins)
        (_, fa_lo, pd_lo), (_, fa_hi, pd_hi) = curve.points
        out.append(DLimit(int(d), fa_hi, pd_lo, pd_hi, fa_lo))
    return out


# -- ROC files -----------------------------------------------------------

def format_roc(curve: RocCurve) -> str:
    w = curve.window
    lines = [
        f"# detector: {curve.detector_id}",
        f"# n_train: {w.n_train}",
        f"# n_guard: {w.n_guard}",
        f"# boundary: {w.boundary.value}",
        f"# threshold_name: {curve.threshold_name}",
        f"# params: {curve.params}",
        "threshold\tp_fa\tp_d",
    ]
    lines += [f"{t!r}\t{fa!r}\t{d!r}" for t, fa, d in curve.points]
    return "\n".join(lines) + "\n"


def write_roc(curve: RocCurve, path) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(format_roc(curve))
    tmp.replace(path)
    return path


def read_roc(path) -> RocCurve:
    header = {}
    points = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
        elif line and not line.startswith("threshold"):
            t, fa, d = line.split("\t")
            points.append((float(t), float(fa), float(d)))
    try:
        window = WindowConfig(int(header["n_train"]), int(header["n_guard"]),
                              Boundary(header.get("boundary", "shrink")))
        return RocCurve(tuple(points), header["detector"], window,
                        header.get("threshold_name", "threshold"), header.get("params", ""))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: malformed ROC header ({exc})") from exc


# -- distribution fitting (re-exported) ---------------------------------

from .fitting import Family, FitConvergenceError, FitResult, fit_all, ks_distance, ks_fit  # noqa: E402,F401
