"""Pure-Python window loops, the fallback backend.

Every function here performs the same floating-point operations, in the
same order, as its twin in ``_kernels.pyx``; the test suite checks the two
agree bit for bit. Passing an :class:`OpCounter` tallies the work done:

* ``comparisons`` - data-dependent comparisons (max search, slot checks,
  sort comparisons, truncation tests);
* ``macs`` - arithmetic on amplitudes (add, multiply, divide, sqrt, log);
* ``sorts`` - per-window sort invocations.

Index bookkeeping and loop control are not counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf


@dataclass
class OpCounter:
    comparisons: int = 0
    macs: int = 0
    sorts: int = 0

    def as_dict(self) -> dict:
        return {"comparisons": self.comparisons, "macs": self.macs, "sorts": self.sorts}

    def __iadd__(self, other: "OpCounter") -> "OpCounter":
        self.comparisons += other.comparisons
        self.macs += other.macs
        self.sorts += other.sorts
        return self


class _Null:
    """Stand-in counter that ignores increments."""

    comparisons = macs = sorts = 0

    def __setattr__(self, name, value):
        pass


_NULL = _Null()


def _span(i, n, ht, hg, skip, min_cells):
    ls, le, rs, re = i - hg - ht, i - hg, i + hg + 1, i + hg + ht + 1
    if skip and (ls < 0 or re > n):
        return None
    ls, le, rs, re = max(ls, 0), max(le, 0), min(rs, n), min(re, n)
    if (le - ls) + (re - rs) < min_cells:
        return None
    return ls, le, rs, re


def _slot(xi, dim):
    q = 1.0 / xi
    if q >= dim:
        return 0
    return dim - int(math.floor(q))


def _insertion_sort(a, ops):
    for i in range(1, len(a)):
        v = a[i]
        j = i - 1
        while j >= 0:
            ops.comparisons += 1
            if not a[j] > v:
                break
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v
    ops.sorts += 1


def _windows(mags, n_train, n_guard, skip):
    n = len(mags)
    ht, hg = n_train // 2, n_guard // 2
    min_cells = max(ht, 2)
    for i in range(n):
        span = _span(i, n, ht, hg, skip, min_cells)
        if span is None:
            continue
        ls, le, rs, re = span
        yield i, mags[ls:le], mags[rs:re]


def proposed_stats(mags, n_train, n_guard, skip, dim, mode, ops=None):
    ops = ops or _NULL
    mags = [float(v) for v in mags]
    n = len(mags)
    valid = np.zeros(n, dtype=bool)
    score = np.zeros(n, dtype=np.float64)
    for i, left, right in _windows(mags, n_train, n_guard, skip):
        valid[i] = True
        buf = left + right
        cut = mags[i]
        peak = cut
        for z in buf:
            ops.comparisons += 1
            if z > peak:
                peak = z
        ops.comparisons += 1
        if peak == 0.0 or cut == 0.0:
            score[i] = INF if mode == 2 else 0.0
            continue
        xi = cut / peak
        s = _slot(xi, dim)
        ops.macs += 2
        ops.comparisons += 1
        if mode == 2:
            mass = 0.0
            for z in buf:
                zn = z / peak
                ops.macs += 2
                ops.comparisons += 2
                if zn > 0.0 and _slot(zn, dim) == s:
                    mass += 1.0
            score[i] = mass
            continue
        gamma = 0.0
        weights = []
        slots = []
        for z in buf:
            zn = z / peak
            w = 1.0 - zn
            weights.append(w)
            gamma += w
            slots.append(_slot(zn, dim) if zn > 0.0 else -1)
            ops.macs += 4
            ops.comparisons += 1
        if gamma == 0.0:
            weights = [1.0 / len(buf)] * len(buf)
            for w in weights:
                gamma += w
            ops.macs += 2 * len(buf)
        if mode == 0:
            mass = 0.0
            for w, sl in zip(weights, slots):
                ops.comparisons += 1
                if sl == s:
                    mass += w
                    ops.macs += 1
            score[i] = 1.0 - mass / gamma
            ops.macs += 2
        else:
            masses = [0.0] * dim
            for w, sl in zip(weights, slots):
                if sl >= 0:
                    masses[sl] += w
                    ops.macs += 1
            acc = 0.0
            for j in range(dim):
                cs = masses[j] / gamma
                d = (1.0 if j == s else 0.0) - cs
                acc += d * d
            ops.macs += 4 * dim + 1
            score[i] = math.sqrt(acc)
    return valid, score


def ca_stats(mags, n_train, n_guard, skip, variant, ops=None):
    ops = ops or _NULL
    mags = [float(v) for v in mags]
    n = len(mags)
    valid = np.zeros(n, dtype=bool)
    est = np.zeros(n, dtype=np.float64)
    for i, left, right in _windows(mags, n_train, n_guard, skip):
        valid[i] = True
        sl = 0.0
        sr = 0.0
        for z in left:
            sl += z
        for z in right:
            sr += z
        ops.macs += len(left) + len(right)
        nl, nr = len(left), len(right)
        if variant == 0:
            est[i] = (sl + sr) / (nl + nr)
            ops.macs += 2
        elif nl == 0:
            est[i] = sr / nr
            ops.macs += 1
        elif nr == 0:
            est[i] = sl / nl
            ops.macs += 1
        else:
            ml = sl / nl
            mr = sr / nr
            ops.macs += 2
            ops.comparisons += 1
            if variant == 1:
                est[i] = ml if ml > mr else mr
            else:
                est[i] = ml if ml < mr else mr
    return valid, est


def os_stats(mags, n_train, n_guard, skip, k_frac, ops=None):
    ops = ops or _NULL
    mags = [float(v) for v in mags]
    n = len(mags)
    valid = np.zeros(n, dtype=bool)
    est = np.zeros(n, dtype=np.float64)
    for i, left, right in _windows(mags, n_train, n_guard, skip):
        valid[i] = True
        buf = left + right
        _insertion_sort(buf, ops)
        cnt = len(buf)
        k = int(math.floor(k_frac * cnt + 0.5))
        k = min(max(k, 1), cnt)
        est[i] = buf[k - 1]
    return valid, est


def cha_stats(mags, n_train, n_guard, skip, m_frac, ops=None):
    ops = ops or _NULL
    mags = [float(v) for v in mags]
    n = len(mags)
    valid = np.zeros(n, dtype=bool)
    est = np.zeros(n, dtype=np.float64)
    for i, left, right in _windows(mags, n_train, n_guard, skip):
        valid[i] = True
        buf = left + right
        _insertion_sort(buf, ops)
        cnt = len(buf)
        m = min(int(math.floor(m_frac * cnt)), cnt - 1)
        acc = 0.0
        for z in buf[m:]:
            acc += 1.0 / z if z != 0.0 else INF
        ops.macs += 2 * (cnt - m) + 1
        est[i] = 1.0 / acc
    return valid, est


def trunc_stats(mags, n_train, n_guard, skip, gamma, alpha_c, chi_c, log_domain, eps,
                ops=None):
    ops = ops or _NULL
    mags = [float(v) for v in mags]
    n = len(mags)
    valid = np.zeros(n, dtype=bool)
    mu_hat = np.zeros(n, dtype=np.float64)
    sd_hat = np.zeros(n, dtype=np.float64)
    for i, left, right in _windows(mags, n_train, n_guard, skip):
        valid[i] = True
        buf = left + right
        cnt = len(buf)
        if log_domain:
            buf = [math.log(z + eps) for z in buf]
            ops.macs += 2 * cnt
        s1 = 0.0
        for v in buf:
            s1 += v
        mu = s1 / cnt
        s2 = 0.0
        for v in buf:
            d = v - mu
            s2 += d * d
        sd = math.sqrt(s2 / cnt)
        ops.macs += 4 * cnt + 3
        s1 = 0.0
        s2 = 0.0
        kept = 0
        for v in buf:
            ops.comparisons += 1
            ops.macs += 2
            if v - mu <= gamma * sd:
                s1 += v
                s2 += v * v
                kept += 1
                ops.macs += 3
        if kept < 2:
            mu_hat[i] = mu
            sd_hat[i] = sd
            continue
        m1 = s1 / kept
        var = s2 / kept - m1 * m1
        if var < 0.0:
            var = 0.0
        sd_hat[i] = math.sqrt(chi_c * var)
        mu_hat[i] = m1 + alpha_c * sd_hat[i]
        ops.macs += 8
    return valid, mu_hat, sd_hat
