"""Domain types and sliding-window geometry shared by every detector.

A range profile is filtered one cell under test (CUT) at a time. Around
each CUT sit ``n_guard // 2`` guard cells per side and, beyond them,
``n_train // 2`` training cells per side::

    [ train_left | guard | CUT | guard | train_right ]

Near the profile edges the window either shrinks (cells outside the
profile are dropped) or the CUT is skipped altogether.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np


class UsageError(ValueError):
    """Invalid arguments supplied by the caller."""


class Boundary(str, enum.Enum):
    SHRINK = "shrink"
    SKIP = "skip"


@dataclass(frozen=True)
class RangeProfile:
    """Magnitude spectrum of one radar frame.

    Attributes
    ----------
    magnitudes : np.ndarray
        Linear amplitudes, one per range bin (read-only float64 array).
    bin_width_m : float
        Range covered by one bin, in meters.
    frame_id : int
        Index of the frame inside its dataset.
    """

    magnitudes: np.ndarray
    bin_width_m: float = 1.0
    frame_id: int = 0

    def __post_init__(self):
        mags = np.array(self.magnitudes, dtype=np.float64, copy=True).reshape(-1)
        if mags.size < 1:
            raise UsageError("range profile must contain at least one bin")
        if not np.all(np.isfinite(mags)) or np.any(mags < 0):
            raise UsageError("magnitudes must be finite and non-negative")
        if not (self.bin_width_m > 0):
            raise UsageError("bin_width_m must be positive")
        mags.setflags(write=False)
        object.__setattr__(self, "magnitudes", mags)

    def __len__(self) -> int:
        return self.magnitudes.size

    def scaled(self, c: float) -> "RangeProfile":
        return RangeProfile(self.magnitudes * c, self.bin_width_m, self.frame_id)


@dataclass(frozen=True)
class LabelSet:
    """Ground-truth target bins of one profile (sorted, unique)."""

    label_bins: tuple = ()

    def __post_init__(self):
        bins = tuple(sorted({int(b) for b in self.label_bins}))
        if bins and bins[0] < 0:
            raise UsageError("label bins must be non-negative")
        object.__setattr__(self, "label_bins", bins)

    def check(self, n_bins: int) -> None:
        if self.label_bins and self.label_bins[-1] >= n_bins:
            raise UsageError(f"label bin {self.label_bins[-1]} outside [0, {n_bins})")

    def __len__(self) -> int:
        return len(self.label_bins)

    def __iter__(self):
        return iter(self.label_bins)


@dataclass(frozen=True)
class WindowConfig:
    """Sliding-window geometry.

    ``n_train`` and ``n_guard`` are totals over both sides of the CUT.
    """

    n_train: int = 20
    n_guard: int = 10
    boundary: Boundary = Boundary.SHRINK

    def __post_init__(self):
        if self.n_train < 2 or self.n_train % 2:
            raise UsageError(f"n_train must be an even integer >= 2, got {self.n_train}")
        if self.n_guard < 0 or self.n_guard % 2:
            raise UsageError(f"n_guard must be an even integer >= 0, got {self.n_guard}")
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def half_train(self) -> int:
        return self.n_train // 2

    @property
    def half_guard(self) -> int:
        return self.n_guard // 2

    @property
    def min_cells(self) -> int:
        """Fewest surviving training cells for a shrunk window to count."""
        return max(self.half_train, 2)

    @property
    def skip(self) -> bool:
        return self.boundary is Boundary.SKIP

    def check(self, n_bins: int) -> None:
        if self.n_train + self.n_guard + 1 > n_bins:
            raise UsageError(
                f"window of {self.n_train}+{self.n_guard}+1 cells does not fit {n_bins} bins"
            )

    def interior(self, n_bins: int) -> range:
        """CUT indices whose full window lies inside the profile."""
        reach = self.half_train + self.half_guard
        return range(reach, n_bins - reach)


@dataclass(frozen=True)
class Window:
    cut: float
    train_left: tuple
    train_right: tuple
    cut_index: int

    @property
    def train(self) -> tuple:
        return self.train_left + self.train_right


@dataclass(frozen=True)
class NormalizedWindow:
    cut_norm: float
    train_norm: tuple
    degenerate: bool = False


@dataclass(frozen=True)
class DetectionSet:
    """Detected bins of one profile with the detector's statistic."""

    detections: tuple = ()
    detector_id: str = ""
    threshold: float = math.nan

    @property
    def bins(self) -> tuple:
        return tuple(b for b, _ in self.detections)

    @property
    def scores(self) -> tuple:
        return tuple(s for _, s in self.detections)

    def __len__(self) -> int:
        return len(self.detections)


def _bounds(cut_index: int, cfg: WindowConfig) -> tuple[int, int, int, int]:
    """Unclipped [start, stop) ranges of the left and right training cells."""
    hg, ht = cfg.half_guard, cfg.half_train
    return (
        cut_index - hg - ht,
        cut_index - hg,
        cut_index + hg + 1,
        cut_index + hg + ht + 1,
    )


def training_span(cut_index: int, n_bins: int, cfg: WindowConfig) -> Optional[tuple[int, int, int, int]]:
    """Clipped training-cell index ranges, or ``None`` when the CUT is skipped."""
    ls, le, rs, re = _bounds(cut_index, cfg)
    if cfg.skip and (ls < 0 or re > n_bins):
        return None
    ls, le = max(ls, 0), max(le, 0)
    rs, re = min(rs, n_bins), min(re, n_bins)
    if (le - ls) + (re - rs) < cfg.min_cells:
        return None
    return ls, le, rs, re


def extract_window(profile: RangeProfile, cut_index: int, cfg: WindowConfig) -> Optional[Window]:
    """Cut the window around ``cut_index`` out of the profile.

    Returns ``None`` when the boundary policy skips this CUT.
    """
    n = len(profile)
    if not 0 <= cut_index < n:
        raise UsageError(f"cut_index {cut_index} outside [0, {n})")
    span = training_span(cut_index, n, cfg)
    if span is None:
        return None
    ls, le, rs, re = span
    mags = profile.magnitudes
    return Window(
        cut=float(mags[cut_index]),
        train_left=tuple(float(v) for v in mags[ls:le]),
        train_right=tuple(float(v) for v in mags[rs:re]),
        cut_index=cut_index,
    )


def normalize_window(win: Window) -> NormalizedWindow:
    """Divide the CUT and training cells by their joint maximum."""
    peak = max(win.cut, max(win.train))
    if peak == 0.0:
        return NormalizedWindow(0.0, tuple(0.0 for _ in win.train), degenerate=True)
    return NormalizedWindow(win.cut / peak, tuple(z / peak for z in win.train))


def evaluable_cuts(n_bins: int, cfg: WindowConfig) -> list[int]:
    return [i for i in range(n_bins) if training_span(i, n_bins, cfg) is not None]


def as_profile(data, bin_width_m: float = 1.0) -> RangeProfile:
    if isinstance(data, RangeProfile):
        return data
    return RangeProfile(np.asarray(data, dtype=np.float64), bin_width_m)


def make_detection_set(bins: Iterable[int], scores: Sequence[float], detector_id: str,
                       threshold: float) -> DetectionSet:
    return DetectionSet(
        tuple((int(b), float(s)) for b, s in zip(bins, scores)), detector_id, float(threshold)
    )
