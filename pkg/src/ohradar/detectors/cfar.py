"""Baseline CFAR noise estimators (CA/GO/SO, OS, OR, TS-LN, CHA).

The functions here work on a single window and are the readable
reference for the per-profile loops in the backends.
"""

from __future__ import annotations

import math
from typing import Sequence

from ..core import UsageError

# Floor added before taking logs so silent cells do not produce -inf.
LOG_EPS = 2.0 ** -126


def std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def or_constants(gamma: float) -> tuple[float, float, float]:
    """Correction constants for a normal sample truncated at ``mu + gamma*sigma``.

    Returns ``(alpha, beta, chi)``: the truncated mean sits ``alpha*sigma``
    below the true mean and the truncated variance is ``sigma**2 / chi``.
    """
    if not gamma > 0:
        raise UsageError(f"gamma must be positive, got {gamma}")
    alpha = math.exp(-gamma * gamma / 2.0) / (math.sqrt(2.0 * math.pi) * std_normal_cdf(gamma))
    beta = 1.0 - gamma * alpha
    denom = beta - alpha * alpha
    assert denom > 0, f"degenerate truncation constants for gamma={gamma}"
    return alpha, beta, 1.0 / denom


def ca_estimate(left: Sequence[float], right: Sequence[float], variant: str = "ca") -> float:
    """Mean of the training cells (CA) or the greater/smaller side mean (GO/SO)."""
    variant = variant.lower()
    if not left and not right:
        raise UsageError("no training cells")
    if variant == "ca":
        return (sum(left) + sum(right)) / (len(left) + len(right))
    if not left:
        return sum(right) / len(right)
    if not right:
        return sum(left) / len(left)
    ml, mr = sum(left) / len(left), sum(right) / len(right)
    if variant == "go":
        return max(ml, mr)
    if variant == "so":
        return min(ml, mr)
    raise UsageError(f"unknown CA variant {variant!r}")


def os_rank(k_frac: float, n: int) -> int:
    """1-indexed ascending rank, rounding half away from zero."""
    return min(max(int(math.floor(k_frac * n + 0.5)), 1), n)


def os_estimate(train: Sequence[float], k_frac: float) -> float:
    return sorted(train)[os_rank(k_frac, len(train)) - 1]


def cha_estimate(train: Sequence[float], m_frac: float) -> float:
    """Harmonic combination of the training cells left after dropping the m smallest."""
    z = sorted(train)
    m = min(int(math.floor(m_frac * len(z))), len(z) - 1)
    acc = 0.0
    for v in z[m:]:
        acc += 1.0 / v if v != 0.0 else math.inf
    return 1.0 / acc


def truncated_estimate(train: Sequence[float], gamma: float) -> tuple[float, float, int]:
    """Outlier-truncated ML estimate ``(mu_hat, sigma_hat, n_kept)``.

    Cells with ``z - mean > gamma * std`` are dropped, then the mean and
    deviation of the survivors are corrected for the truncation. With fewer
    than two survivors the plain sample estimates are returned.
    """
    n = len(train)
    mu = sum(train) / n
    sd = math.sqrt(sum((v - mu) ** 2 for v in train) / n)
    kept = [v for v in train if v - mu <= gamma * sd]
    if len(kept) < 2:
        return mu, sd, len(kept)
    alpha_c, _, chi_c = or_constants(gamma)
    m1 = sum(kept) / len(kept)
    var = max(sum(v * v for v in kept) / len(kept) - m1 * m1, 0.0)
    sigma = math.sqrt(chi_c * var)
    return m1 + alpha_c * sigma, sigma, len(kept)
