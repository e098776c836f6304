"""Detector objects sharing one contract.

A detector first computes per-CUT background statistics for a profile
(:meth:`Detector.statistics`, the expensive part, run by the active
backend) and then applies a threshold to them (:meth:`Detector.decide`,
cheap and vectorized). ROC sweeps reuse one set of statistics for every
threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar, Optional

import numpy as np

from .. import backend
from ..core import DetectionSet, RangeProfile, UsageError, WindowConfig, make_detection_set
from .cfar import LOG_EPS, or_constants


@dataclass(frozen=True)
class CutStats:
    """Per-CUT statistics of one profile under one detector."""

    cut: np.ndarray
    valid: np.ndarray
    values: dict = field(default_factory=dict)


class Detector:
    name: ClassVar[str] = ""
    threshold_name: ClassVar[str] = "threshold"
    default_threshold: ClassVar[float] = 1.0
    # False when a larger threshold admits more detections (correlation tests).
    threshold_raises_bar: ClassVar[bool] = True

    def statistics(self, profile, cfg: WindowConfig, backend_name: Optional[str] = None,
                   ops=None) -> CutStats:
        mags = _mags(profile)
        cfg.check(mags.size)
        if ops is not None:
            backend_name = "python"
        kern = backend.kernels(backend_name)
        extra = {} if ops is None else {"ops": ops}
        return self._stats(kern, mags, cfg, extra)

    def _stats(self, kern, mags, cfg, extra) -> CutStats:
        raise NotImplementedError

    def decide(self, st: CutStats, threshold: float) -> np.ndarray:
        raise NotImplementedError

    def scores(self, st: CutStats) -> np.ndarray:
        raise NotImplementedError

    @property
    def ident(self) -> str:
        return self.name

    def detect(self, profile, cfg: WindowConfig, threshold: Optional[float] = None,
               backend_name: Optional[str] = None) -> DetectionSet:
        thr = self.default_threshold if threshold is None else float(threshold)
        st = self.statistics(profile, cfg, backend_name)
        return self.detection_set(st, thr)

    def detection_set(self, st: CutStats, threshold: float) -> DetectionSet:
        hit = np.flatnonzero(self.decide(st, threshold))
        return make_detection_set(hit, self.scores(st)[hit], self.ident, threshold)


def _mags(profile) -> np.ndarray:
    if isinstance(profile, RangeProfile):
        return profile.magnitudes
    return RangeProfile(profile).magnitudes


def _ratio_scores(cut, est):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(est > 0, cut / est, np.where(cut > 0, np.inf, 0.0))


@dataclass(frozen=True)
class ProposedDetector(Detector):
    """One-hot projection detector.

    ``norm`` selects the distance: ``"linf"`` (the detector proper),
    ``"l2"`` (ablation) or ``"gram"`` (ablation: unweighted correlation
    with the training one-hot vectors, detection when below ``T1``).
    """

    dim: int = 15
    norm: str = "linf"
    default_threshold: ClassVar[float] = 0.95

    _MODES: ClassVar[dict] = {"linf": 0, "l2": 1, "gram": 2}

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise UsageError(f"dim must be a positive integer, got {self.dim}")
        if self.norm not in self._MODES:
            raise UsageError(f"norm must be one of {sorted(self._MODES)}")

    @property
    def name(self):
        return {"linf": "proposed", "l2": "abl-l2", "gram": "abl-gram"}[self.norm]

    @property
    def threshold_name(self):
        return "T1" if self.norm == "gram" else "T2"

    @property
    def threshold_raises_bar(self):
        return self.norm != "gram"

    @property
    def ident(self):
        return f"{self.name}:D={self.dim}"

    def _stats(self, kern, mags, cfg, extra):
        valid, score = kern.proposed_stats(mags, cfg.n_train, cfg.n_guard, cfg.skip,
                                           self.dim, self._MODES[self.norm], **extra)
        return CutStats(mags, valid, {"score": score})

    def decide(self, st, threshold):
        if self.norm == "gram":
            return st.valid & (st.values["score"] < threshold)
        return st.valid & (st.values["score"] > threshold)

    def scores(self, st):
        if self.norm == "gram":
            return -st.values["score"]
        return st.values["score"]


class RatioDetector(Detector):
    """Detection when ``S > threshold * estimate`` (CA/GO/SO, OS, CHA)."""

    default_threshold: ClassVar[float] = 3.0
    threshold_name: ClassVar[str] = "alpha"

    def decide(self, st, threshold):
        return st.valid & (st.cut > threshold * st.values["estimate"])

    def scores(self, st):
        return _ratio_scores(st.cut, st.values["estimate"])


@dataclass(frozen=True)
class CaDetector(RatioDetector):
    variant: str = "ca"

    _VARIANTS: ClassVar[dict] = {"ca": 0, "go": 1, "so": 2}

    def __post_init__(self):
        if self.variant not in self._VARIANTS:
            raise UsageError(f"variant must be one of {sorted(self._VARIANTS)}")

    @property
    def name(self):
        return self.variant

    def _stats(self, kern, mags, cfg, extra):
        valid, est = kern.ca_stats(mags, cfg.n_train, cfg.n_guard, cfg.skip,
                                   self._VARIANTS[self.variant], **extra)
        return CutStats(mags, valid, {"estimate": est})


@dataclass(frozen=True)
class OsDetector(RatioDetector):
    k_frac: float = 0.7
    name: ClassVar[str] = "os"

    def __post_init__(self):
        if not 0 < self.k_frac <= 1:
            raise UsageError(f"k must lie in (0, 1], got {self.k_frac}")

    @property
    def ident(self):
        return f"os:k={self.k_frac:g}"

    def _stats(self, kern, mags, cfg, extra):
        valid, est = kern.os_stats(mags, cfg.n_train, cfg.n_guard, cfg.skip,
                                   float(self.k_frac), **extra)
        return CutStats(mags, valid, {"estimate": est})


@dataclass(frozen=True)
class ChaDetector(RatioDetector):
    m_frac: float = 0.65
    name: ClassVar[str] = "cha"
    threshold_name: ClassVar[str] = "t"

    def __post_init__(self):
        if not 0 <= self.m_frac < 1:
            raise UsageError(f"m must lie in [0, 1), got {self.m_frac}")

    @property
    def ident(self):
        return f"cha:m={self.m_frac:g}"

    def _stats(self, kern, mags, cfg, extra):
        valid, est = kern.cha_stats(mags, cfg.n_train, cfg.n_guard, cfg.skip,
                                    float(self.m_frac), **extra)
        return CutStats(mags, valid, {"estimate": est})


@dataclass(frozen=True)
class TruncatedDetector(Detector):
    """OR-CFAR (linear amplitudes) or TS-LNCFAR (``log_domain=True``)."""

    gamma: float = 1.3
    log_domain: bool = False
    default_threshold: ClassVar[float] = 3.0
    threshold_name: ClassVar[str] = "t"

    def __post_init__(self):
        if not self.gamma > 0:
            raise UsageError(f"gamma must be positive, got {self.gamma}")

    @property
    def name(self):
        return "tsln" if self.log_domain else "or"

    @property
    def ident(self):
        return f"{self.name}:gamma={self.gamma:g}"

    def _stats(self, kern, mags, cfg, extra):
        alpha_c, _, chi_c = or_constants(self.gamma)
        valid, mu, sd = kern.trunc_stats(mags, cfg.n_train, cfg.n_guard, cfg.skip,
                                         float(self.gamma), alpha_c, chi_c,
                                         bool(self.log_domain), LOG_EPS, **extra)
        return CutStats(mags, valid, {"mu": mu, "sigma": sd})

    def _x(self, st):
        return np.log(st.cut + LOG_EPS) if self.log_domain else st.cut

    def decide(self, st, threshold):
        mu, sd = st.values["mu"], st.values["sigma"]
        return st.valid & (self._x(st) > mu + threshold * sd)

    def scores(self, st):
        x, mu, sd = self._x(st), st.values["mu"], st.values["sigma"]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(sd > 0, (x - mu) / sd, np.where(x > mu, np.inf, -np.inf))


# name -> ({structural param: default}, threshold key)
_PARAMS = {
    "proposed": ({"D": 15}, "T2"),
    "abl-l2": ({"D": 15}, "T2"),
    "abl-gram": ({"D": 15}, "T1"),
    "ca": ({}, "alpha"),
    "go": ({}, "alpha"),
    "so": ({}, "alpha"),
    "os": ({"k": 0.7}, "alpha"),
    "or": ({"gamma": 1.3}, "t"),
    "tsln": ({"gamma": 1.8}, "t"),
    "cha": ({"m": 0.65}, "t"),
}

_ALIASES = {"d": "D", "dim": "D", "t2": "T2", "t1": "T1", "k_frac": "k", "m_frac": "m",
            "a": "alpha", "g": "gamma"}

DETECTOR_NAMES = tuple(_PARAMS)


def _canon(key: str) -> str:
    if key in ("D", "T1", "T2", "t"):
        return key
    return _ALIASES.get(key.lower(), key.lower())


@dataclass(frozen=True)
class DetectorSpec:
    """Detector name plus its parameters, e.g. ``os:k=0.7,alpha=4``.

    The threshold parameter (``T2``, ``T1``, ``alpha`` or ``t``) is
    optional; ROC sweeps supply it from a grid.
    """

    name: str
    params: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "DetectorSpec":
        name, _, rest = text.strip().partition(":")
        name = name.strip().lower()
        if name not in _PARAMS:
            raise UsageError(f"unknown detector {name!r}; choose from {', '.join(DETECTOR_NAMES)}")
        defaults, thr_key = _PARAMS[name]
        accepted = set(defaults) | {thr_key}
        params = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, eq, value = item.partition("=")
            key = _canon(key.strip())
            if not eq or key not in accepted:
                raise UsageError(
                    f"bad parameter {item!r} for {name}; accepted: {', '.join(sorted(accepted))}"
                )
            try:
                params[key] = float(value)
            except ValueError:
                raise UsageError(f"parameter {key} needs a number, got {value!r}") from None
        return cls(name, tuple(sorted(params.items())))

    def param(self, key: str, default=None):
        return dict(self.params).get(key, default)

    @property
    def threshold_key(self) -> str:
        return _PARAMS[self.name][1]

    @property
    def threshold(self) -> Optional[float]:
        return self.param(self.threshold_key)

    def build(self) -> Detector:
        defaults, _ = _PARAMS[self.name]
        p = {**defaults, **{k: v for k, v in self.params if k in defaults}}
        n = self.name
        if n in ("proposed", "abl-l2", "abl-gram"):
            d = p["D"]
            if d != int(d):
                raise UsageError(f"D must be an integer, got {d}")
            norm = {"proposed": "linf", "abl-l2": "l2", "abl-gram": "gram"}[n]
            return ProposedDetector(dim=int(d), norm=norm)
        if n in ("ca", "go", "so"):
            return CaDetector(variant=n)
        if n == "os":
            return OsDetector(k_frac=p["k"])
        if n in ("or", "tsln"):
            return TruncatedDetector(gamma=p["gamma"], log_domain=(n == "tsln"))
        return ChaDetector(m_frac=p["m"])

    def __str__(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v:g}" for k, v in self.params)

