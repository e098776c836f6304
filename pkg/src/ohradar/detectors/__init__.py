"""Detectors sharing the sliding-window contract of :mod:`ohradar.core`."""

from __future__ import annotations

from ..core import DetectionSet, RangeProfile, UsageError, WindowConfig
from .cfar import (LOG_EPS, ca_estimate, cha_estimate, or_constants, os_estimate, os_rank,
                   truncated_estimate)
from .proposed import (NoiseCentroid, ProposedParams, gram_correlation, l2_distance,
                       linf_distance, noise_centroid, one_hot, phi_encode, test_cut)
from .registry import (DETECTOR_NAMES, CaDetector, ChaDetector, CutStats, Detector,
                       DetectorSpec, OsDetector, ProposedDetector, RatioDetector,
                       TruncatedDetector)


def _positive(value, name):
    if not value > 0:
        raise UsageError(f"{name} must be positive, got {value}")
    return value


def detect_proposed(profile: RangeProfile, cfg: WindowConfig,
                    params: ProposedParams = ProposedParams()) -> DetectionSet:
    return ProposedDetector(params.dim, "linf").detect(profile, cfg, params.threshold)


def detect_ablation_l2(profile: RangeProfile, cfg: WindowConfig,
                       params: ProposedParams = ProposedParams()) -> DetectionSet:
    return ProposedDetector(params.dim, "l2").detect(profile, cfg, params.threshold)


def detect_ablation_gram(profile: RangeProfile, cfg: WindowConfig, dim: int = 15,
                         t1: float = 1.0) -> DetectionSet:
    """Unweighted-correlation variant: detection when fewer than ``t1`` training
    cells share the CUT's slot."""
    return ProposedDetector(dim, "gram").detect(profile, cfg, t1)


def detect_ca_family(profile: RangeProfile, cfg: WindowConfig, variant: str = "ca",
                     alpha: float = 3.0) -> DetectionSet:
    return CaDetector(variant.lower()).detect(profile, cfg, _positive(alpha, "alpha"))


def detect_os(profile: RangeProfile, cfg: WindowConfig, k_frac: float = 0.7,
              alpha: float = 3.0) -> DetectionSet:
    return OsDetector(k_frac).detect(profile, cfg, _positive(alpha, "alpha"))


def detect_or(profile: RangeProfile, cfg: WindowConfig, gamma: float = 1.3,
              t: float = 3.0) -> DetectionSet:
    if t < 0:
        raise UsageError(f"t must be >= 0, got {t}")
    return TruncatedDetector(gamma, log_domain=False).detect(profile, cfg, t)


def detect_tsln(profile: RangeProfile, cfg: WindowConfig, gamma: float = 1.8,
                t: float = 3.0) -> DetectionSet:
    if t < 0:
        raise UsageError(f"t must be >= 0, got {t}")
    return TruncatedDetector(gamma, log_domain=True).detect(profile, cfg, t)


def detect_cha(profile: RangeProfile, cfg: WindowConfig, m_frac: float = 0.65,
               t: float = 3.0) -> DetectionSet:
    return ChaDetector(m_frac).detect(profile, cfg, _positive(t, "t"))


__all__ = [
    "CaDetector", "ChaDetector", "CutStats", "DETECTOR_NAMES", "Detector", "DetectorSpec",
    "LOG_EPS", "NoiseCentroid", "OsDetector", "ProposedDetector", "ProposedParams",
    "RatioDetector", "TruncatedDetector", "ca_estimate", "cha_estimate", "detect_ablation_gram",
    "detect_ablation_l2", "detect_ca_family", "detect_cha", "detect_or", "detect_os",
    "detect_proposed", "detect_tsln", "gram_correlation", "l2_distance", "linf_distance",
    "noise_centroid", "one_hot", "or_constants", "os_estimate", "os_rank", "phi_encode",
    "test_cut", "truncated_estimate",
]
