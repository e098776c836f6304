"""One-hot projection detector and its two ablations.

Each amplitude of a window is normalized by the window's maximum and
mapped to a one-hot vector of length ``dim``. Slots have reciprocal edges:
amplitude ``x`` (relative to the window peak) lands in slot
``dim - floor(1/x)``, clamped at 0, so the top slot holds ``x > 1/2`` and
weak cells pile up in slot 0.

The training cells are summarized by a weighted centroid of their one-hot
vectors, the weight of a cell being ``1 - x`` so that strong (likely
target) cells barely count. The CUT is reported when its hot slot is
nearly empty in that centroid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import UsageError


@dataclass(frozen=True)
class ProposedParams:
    dim: int = 15
    threshold: float = 0.95

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise UsageError(f"dim must be a positive integer, got {self.dim}")
        if not self.threshold >= 0:
            raise UsageError(f"threshold must be >= 0, got {self.threshold}")
        object.__setattr__(self, "dim", int(self.dim))


@dataclass(frozen=True)
class NoiseCentroid:
    """Weighted centroid of the training cells' one-hot vectors."""

    weights: np.ndarray
    gamma: float = 0.0

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]


def phi_encode(xi_norm: float, dim: int) -> int:
    """Slot index of the one-hot code of a normalized amplitude.

    >>> phi_encode(1.0, 15), phi_encode(0.5, 15), phi_encode(0.05, 15)
    (14, 13, 0)
    """
    if not 0.0 < xi_norm <= 1.0:
        raise UsageError(f"normalized amplitude must lie in (0, 1], got {xi_norm}")
    if dim < 1:
        raise UsageError("dim must be >= 1")
    q = 1.0 / xi_norm
    if q >= dim:
        return 0
    return dim - int(math.floor(q))


def one_hot(xi_norm: float, dim: int) -> np.ndarray:
    """Dense one-hot vector; all zeros for a zero amplitude."""
    v = np.zeros(dim)
    if xi_norm > 0.0:
        v[phi_encode(xi_norm, dim)] = 1.0
    return v


def noise_centroid(train_norm: Sequence[float], dim: int) -> NoiseCentroid:
    """Weighted background summary of the normalized training cells.

    Cells equal to the window maximum get zero weight. When every cell sits
    at the maximum the weights fall back to uniform.
    """
    if len(train_norm) == 0:
        raise UsageError("noise_centroid needs at least one training cell")
    weights = [1.0 - z for z in train_norm]
    gamma = 0.0
    for w in weights:
        gamma += w
    if gamma == 0.0:
        weights = [1.0 / len(train_norm)] * len(train_norm)
        for w in weights:
            gamma += w
    masses = [0.0] * dim
    for z, w in zip(train_norm, weights):
        if z > 0.0:
            masses[phi_encode(z, dim)] += w
    return NoiseCentroid(np.array([m / gamma for m in masses]), gamma)


def test_cut(cut_norm: float, centroid: NoiseCentroid,
             params: ProposedParams) -> tuple[bool, float]:
    """Infinity-norm test of the CUT's one-hot code against the centroid.

    Only the CUT's hot slot can exceed ``T2 + centroid[i]``, so the score is
    ``1 - centroid[hot]``, which always lies in [0, 1].
    """
    if len(centroid) != params.dim:
        raise UsageError(f"centroid has {len(centroid)} entries, expected {params.dim}")
    if cut_norm <= 0.0:
        return False, 0.0
    score = 1.0 - centroid[phi_encode(cut_norm, params.dim)]
    return bool(score > params.threshold), float(score)


test_cut.__test__ = False  # keep pytest from collecting it


def linf_distance(cut_norm: float, centroid: NoiseCentroid) -> float:
    """Symmetric ``max_i |phi_i - c_i|``, the untruncated form of the test."""
    return float(np.max(np.abs(one_hot(cut_norm, len(centroid)) - centroid.weights)))


def l2_distance(cut_norm: float, centroid: NoiseCentroid) -> float:
    dim = len(centroid)
    s = phi_encode(cut_norm, dim) if cut_norm > 0 else -1
    acc = 0.0
    for j in range(dim):
        d = (1.0 if j == s else 0.0) - centroid[j]
        acc += d * d
    return math.sqrt(acc)


def gram_correlation(cut_norm: float, train_norm: Sequence[float], dim: int) -> float:
    """``phi(cut) . sum_j phi(z_j)``: training cells sharing the CUT's slot."""
    if cut_norm <= 0.0:
        return math.inf
    s = phi_encode(cut_norm, dim)
    return float(sum(1 for z in train_norm if z > 0.0 and phi_encode(z, dim) == s))
