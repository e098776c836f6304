# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-profile window loops.

Each function walks every CUT of one profile and returns per-CUT
background statistics; thresholds are applied afterwards in numpy so a
ROC sweep evaluates the windows once. Arithmetic order mirrors
``ohradar._reference`` exactly so both backends agree bit for bit.
"""

import numpy as np
from libc.math cimport floor, sqrt, log, INFINITY


cdef inline bint _span(Py_ssize_t i, Py_ssize_t n, Py_ssize_t ht, Py_ssize_t hg,
                       bint skip, Py_ssize_t min_cells,
                       Py_ssize_t* ls, Py_ssize_t* le, Py_ssize_t* rs, Py_ssize_t* re) nogil:
    ls[0] = i - hg - ht
    le[0] = i - hg
    rs[0] = i + hg + 1
    re[0] = i + hg + ht + 1
    if skip and (ls[0] < 0 or re[0] > n):
        return False
    if ls[0] < 0:
        ls[0] = 0
    if le[0] < 0:
        le[0] = 0
    if rs[0] > n:
        rs[0] = n
    if re[0] > n:
        re[0] = n
    return (le[0] - ls[0]) + (re[0] - rs[0]) >= min_cells


cdef inline Py_ssize_t _slot(double xi, Py_ssize_t dim) nogil:
    cdef double q = 1.0 / xi
    if q >= dim:
        return 0
    return dim - <Py_ssize_t>floor(q)


cdef inline void _insertion_sort(double* a, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    cdef double v
    for i in range(1, n):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


cdef inline Py_ssize_t _gather(const double[::1] mags, Py_ssize_t ls, Py_ssize_t le,
                               Py_ssize_t rs, Py_ssize_t re, double* buf) nogil:
    cdef Py_ssize_t j, n = 0
    for j in range(ls, le):
        buf[n] = mags[j]
        n += 1
    for j in range(rs, re):
        buf[n] = mags[j]
        n += 1
    return n


def proposed_stats(const double[::1] mags, Py_ssize_t n_train, Py_ssize_t n_guard,
                   bint skip, Py_ssize_t dim, int mode):
    """Per-CUT statistic of the one-hot detector family.

    mode 0: 1 - centroid[hot slot]; mode 1: L2 distance to the centroid;
    mode 2: count of training cells sharing the CUT's slot.
    """
    cdef Py_ssize_t n = mags.shape[0]
    cdef Py_ssize_t ht = n_train // 2, hg = n_guard // 2
    cdef Py_ssize_t min_cells = ht if ht > 2 else 2
    cdef Py_ssize_t i, j, s, cnt, ls, le, rs, re
    cdef double cut, peak, xi, zn, w, gamma, mass, acc, d, cs
    valid_a = np.zeros(n, dtype=np.uint8)
    score_a = np.zeros(n, dtype=np.float64)
    buf_a = np.empty(n_train, dtype=np.float64)
    slots_a = np.empty(n_train, dtype=np.intp)
    mass_a = np.zeros(dim, dtype=np.float64)
    cdef unsigned char[::1] valid = valid_a
    cdef double[::1] score = score_a
    cdef double[::1] buf = buf_a
    cdef Py_ssize_t[::1] slots = slots_a
    cdef double[::1] masses = mass_a

    with nogil:
        for i in range(n):
            if not _span(i, n, ht, hg, skip, min_cells, &ls, &le, &rs, &re):
                continue
            valid[i] = 1
            cnt = _gather(mags, ls, le, rs, re, &buf[0])
            cut = mags[i]
            peak = cut
            for j in range(cnt):
                if buf[j] > peak:
                    peak = buf[j]
            if peak == 0.0 or cut == 0.0:
                score[i] = INFINITY if mode == 2 else 0.0
                continue
            xi = cut / peak
            s = _slot(xi, dim)
            if mode == 2:
                mass = 0.0
                for j in range(cnt):
                    zn = buf[j] / peak
                    if zn > 0.0 and _slot(zn, dim) == s:
                        mass += 1.0
                score[i] = mass
                continue
            gamma = 0.0
            for j in range(cnt):
                zn = buf[j] / peak
                buf[j] = 1.0 - zn
                gamma += buf[j]
                slots[j] = _slot(zn, dim) if zn > 0.0 else -1
            if gamma == 0.0:
                for j in range(cnt):
                    buf[j] = 1.0 / cnt
                    gamma += buf[j]
            if mode == 0:
                mass = 0.0
                for j in range(cnt):
                    if slots[j] == s:
                        mass += buf[j]
                score[i] = 1.0 - mass / gamma
            else:
                for j in range(dim):
                    masses[j] = 0.0
                for j in range(cnt):
                    if slots[j] >= 0:
                        masses[slots[j]] += buf[j]
                acc = 0.0
                for j in range(dim):
                    cs = masses[j] / gamma
                    d = (1.0 if j == s else 0.0) - cs
                    acc += d * d
                score[i] = sqrt(acc)
    return valid_a.view(bool), score_a


def ca_stats(const double[::1] mags, Py_ssize_t n_train, Py_ssize_t n_guard,
             bint skip, int variant):
    """Noise estimate of CA (0), GO (1) and SO (2) CFAR."""
    cdef Py_ssize_t n = mags.shape[0]
    cdef Py_ssize_t ht = n_train // 2, hg = n_guard // 2
    cdef Py_ssize_t min_cells = ht if ht > 2 else 2
    cdef Py_ssize_t i, j, ls, le, rs, re, nl, nr
    cdef double sl, sr, ml, mr
    valid_a = np.zeros(n, dtype=np.uint8)
    est_a = np.zeros(n, dtype=np.float64)
    cdef unsigned char[::1] valid = valid_a
    cdef double[::1] est = est_a

    with nogil:
        for i in range(n):
            if not _span(i, n, ht, hg, skip, min_cells, &ls, &le, &rs, &re):
                continue
            valid[i] = 1
            sl = 0.0
            sr = 0.0
            for j in range(ls, le):
                sl += mags[j]
            for j in range(rs, re):
                sr += mags[j]
            nl = le - ls
            nr = re - rs
            if variant == 0:
                est[i] = (sl + sr) / (nl + nr)
            elif nl == 0:
                est[i] = sr / nr
            elif nr == 0:
                est[i] = sl / nl
            else:
                ml = sl / nl
                mr = sr / nr
                if variant == 1:
                    est[i] = ml if ml > mr else mr
                else:
                    est[i] = ml if ml < mr else mr
    return valid_a.view(bool), est_a


def os_stats(const double[::1] mags, Py_ssize_t n_train, Py_ssize_t n_guard,
             bint skip, double k_frac):
    """k-th order statistic of the training cells."""
    cdef Py_ssize_t n = mags.shape[0]
    cdef Py_ssize_t ht = n_train // 2, hg = n_guard // 2
    cdef Py_ssize_t min_cells = ht if ht > 2 else 2
    cdef Py_ssize_t i, cnt, k, ls, le, rs, re
    valid_a = np.zeros(n, dtype=np.uint8)
    est_a = np.zeros(n, dtype=np.float64)
    buf_a = np.empty(n_train, dtype=np.float64)
    cdef unsigned char[::1] valid = valid_a
    cdef double[::1] est = est_a
    cdef double[::1] buf = buf_a

    with nogil:
        for i in range(n):
            if not _span(i, n, ht, hg, skip, min_cells, &ls, &le, &rs, &re):
                continue
            valid[i] = 1
            cnt = _gather(mags, ls, le, rs, re, &buf[0])
            _insertion_sort(&buf[0], cnt)
            k = <Py_ssize_t>floor(k_frac * cnt + 0.5)
            if k < 1:
                k = 1
            if k > cnt:
                k = cnt
            est[i] = buf[k - 1]
    return valid_a.view(bool), est_a


def cha_stats(const double[::1] mags, Py_ssize_t n_train, Py_ssize_t n_guard,
              bint skip, double m_frac):
    """Censored harmonic mean of the upper order statistics."""
    cdef Py_ssize_t n = mags.shape[0]
    cdef Py_ssize_t ht = n_train // 2, hg = n_guard // 2
    cdef Py_ssize_t min_cells = ht if ht > 2 else 2
    cdef Py_ssize_t i, j, cnt, m, ls, le, rs, re
    cdef double acc
    valid_a = np.zeros(n, dtype=np.uint8)
    est_a = np.zeros(n, dtype=np.float64)
    buf_a = np.empty(n_train, dtype=np.float64)
    cdef unsigned char[::1] valid = valid_a
    cdef double[::1] est = est_a
    cdef double[::1] buf = buf_a

    with nogil:
        for i in range(n):
            if not _span(i, n, ht, hg, skip, min_cells, &ls, &le, &rs, &re):
                continue
            valid[i] = 1
            cnt = _gather(mags, ls, le, rs, re, &buf[0])
            _insertion_sort(&buf[0], cnt)
            m = <Py_ssize_t>floor(m_frac * cnt)
            if m > cnt - 1:
                m = cnt - 1
            acc = 0.0
            for j in range(m, cnt):
                acc += 1.0 / buf[j]
            est[i] = 1.0 / acc
    return valid_a.view(bool), est_a


def trunc_stats(const double[::1] mags, Py_ssize_t n_train, Py_ssize_t n_guard,
                bint skip, double gamma, double alpha_c, double chi_c,
                bint log_domain, double eps):
    """Truncation-corrected ML mean and deviation of the training cells."""
    cdef Py_ssize_t n = mags.shape[0]
    cdef Py_ssize_t ht = n_train // 2, hg = n_guard // 2
    cdef Py_ssize_t min_cells = ht if ht > 2 else 2
    cdef Py_ssize_t i, j, cnt, kept, ls, le, rs, re
    cdef double mu, var, sd, s1, s2, m1, v, d
    valid_a = np.zeros(n, dtype=np.uint8)
    mu_a = np.zeros(n, dtype=np.float64)
    sd_a = np.zeros(n, dtype=np.float64)
    buf_a = np.empty(n_train, dtype=np.float64)
    cdef unsigned char[::1] valid = valid_a
    cdef double[::1] mu_hat = mu_a
    cdef double[::1] sd_hat = sd_a
    cdef double[::1] buf = buf_a

    with nogil:
        for i in range(n):
            if not _span(i, n, ht, hg, skip, min_cells, &ls, &le, &rs, &re):
                continue
            valid[i] = 1
            cnt = _gather(mags, ls, le, rs, re, &buf[0])
            if log_domain:
                for j in range(cnt):
                    buf[j] = log(buf[j] + eps)
            s1 = 0.0
            for j in range(cnt):
                s1 += buf[j]
            mu = s1 / cnt
            s2 = 0.0
            for j in range(cnt):
                d = buf[j] - mu
                s2 += d * d
            sd = sqrt(s2 / cnt)
            s1 = 0.0
            s2 = 0.0
            kept = 0
            for j in range(cnt):
                v = buf[j]
                if v - mu <= gamma * sd:
                    s1 += v
                    s2 += v * v
                    kept += 1
            if kept < 2:
                mu_hat[i] = mu
                sd_hat[i] = sd
                continue
            m1 = s1 / kept
            var = s2 / kept - m1 * m1
            if var < 0.0:
                var = 0.0
            sd_hat[i] = sqrt(chi_c * var)
            mu_hat[i] = m1 + alpha_c * sd_hat[i]
    return valid_a.view(bool), mu_a, sd_a
