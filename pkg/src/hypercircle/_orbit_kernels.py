"""Compiled inner loops for orbit-ball enumeration.

The point z is passed as integers (xn, yn, L) with z = (xn + i yn) / L.
For a coset representative with bottom row (c, d) and top row (a, b) the
scaled quantity P L^2, where P = c z^2 + (d - a) z - b, has integer real and
imaginary parts

    re = c (xn^2 - yn^2) + (d - a) xn L - b L^2
    im = 2 c xn yn + (d - a) yn L

and 4u(gz, z) + 2 <= X  iff  re^2 + im^2 <= (X - 2) yn^2 L^2.  All thresholds
passed in are already the integer floor of the right-hand side.  Callers are
responsible for checking that every intermediate fits in int64.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _gcd(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@njit(cache=True, nogil=True)
def _inv_mod(d, c):
    # inverse of d modulo c (c >= 1, gcd(c, d) = 1) via extended Euclid
    r0, r1 = d % c, c
    s0, s1 = 1, 0
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % c


@njit(cache=True, nogil=True)
def _num(xn, yn, L, a, b, c, d):
    dm = d - a
    re = c * (xn * xn - yn * yn) + dm * xn * L - b * L * L
    im = 2 * c * xn * yn + dm * yn * L
    return re * re + im * im


@njit(cache=True, nogil=True)
def _row_interval(xn, yn, L, a0, b0, c, d, thr):
    """Integer interval [lo, hi] of n with num(a0 + n c, b0 + n d) <= thr."""
    dm = d - a0
    re0 = float(c * (xn * xn - yn * yn) + dm * xn * L - b0 * L * L)
    im0 = float(2 * c * xn * yn + dm * yn * L)
    wr = float(c * xn * L + d * L * L)
    wi = float(c * yn * L)
    w2 = wr * wr + wi * wi
    center = (re0 * wr + im0 * wi) / w2
    cross = (re0 * wi - im0 * wr)
    rem = float(thr) - cross * cross / w2
    if rem < 0.0:
        # the float estimate says empty; probe the nearest integer exactly
        n = int(math.floor(center + 0.5))
        if _num(xn, yn, L, a0 + n * c, b0 + n * d, c, d) <= thr:
            return n, n
        return 1, 0
    hw = math.sqrt(rem / w2)
    lo = int(math.ceil(center - hw))
    hi = int(math.floor(center + hw))
    # exact adjustment of both ends
    while _num(xn, yn, L, a0 + (lo - 1) * c, b0 + (lo - 1) * d, c, d) <= thr:
        lo -= 1
    while lo <= hi and _num(xn, yn, L, a0 + lo * c, b0 + lo * d, c, d) > thr:
        lo += 1
    while _num(xn, yn, L, a0 + (hi + 1) * c, b0 + (hi + 1) * d, c, d) <= thr:
        hi += 1
    while hi >= lo and _num(xn, yn, L, a0 + hi * c, b0 + hi * d, c, d) > thr:
        hi -= 1
    return lo, hi


@njit(cache=True, nogil=True)
def _d_range(xn, yn, L, c, xmax):
    # rows with |cz + d|^2 <= X; generous float bound, membership is exact later
    x = xn / L
    y = yn / L
    w = xmax - (c * y) ** 2
    if w < 0.0:
        w = 0.0
    w = math.sqrt(w)
    return int(math.floor(-c * x - w)) - 1, int(math.ceil(-c * x + w)) + 1


@njit(cache=True, nogil=True)
def ball_stats(xn, yn, L, thr, xmax, c_lo, c_hi, tmax):
    """Counts per threshold, split by |trace|.

    Returns (total[k], nonhyp[k], hist[k, t]) where hist counts elements with
    |a + d| = t for t <= tmax.  Rows with c in [c_lo, c_hi) are scanned; the
    c = 0 coset is included when c_lo == 0.
    """
    K = thr.shape[0]
    tmax_thr = thr[K - 1]
    total = np.zeros(K, dtype=np.int64)
    nonhyp = np.zeros(K, dtype=np.int64)
    hist = np.zeros((K, tmax + 1), dtype=np.int64)
    for c in range(c_lo, c_hi):
        if c == 0:
            d_lo, d_hi = 1, 1
        else:
            d_lo, d_hi = _d_range(xn, yn, L, c, xmax)
        for d in range(d_lo, d_hi + 1):
            if c == 0:
                a0, b0 = 1, 0
            else:
                if _gcd(c, d) != 1:
                    continue
                a0 = _inv_mod(d, c)
                b0 = (a0 * d - 1) // c
            lo, hi = _row_interval(xn, yn, L, a0, b0, c, d, tmax_thr)
            for n in range(lo, hi + 1):
                a = a0 + n * c
                b = b0 + n * d
                v = _num(xn, yn, L, a, b, c, d)
                tr = abs(a + d)
                for k in range(K):
                    if v <= thr[k]:
                        total[k] += 1
                        if tr <= 2:
                            nonhyp[k] += 1
                        elif tr <= tmax:
                            hist[k, tr] += 1
    return total, nonhyp, hist


@njit(cache=True, nogil=True)
def ball_count_rows(xn, yn, L, thr, xmax, c_lo, c_hi):
    """Counts per threshold using row intervals only (no per-element loop)."""
    K = thr.shape[0]
    total = np.zeros(K, dtype=np.int64)
    for c in range(c_lo, c_hi):
        if c == 0:
            d_lo, d_hi = 1, 1
        else:
            d_lo, d_hi = _d_range(xn, yn, L, c, xmax)
        for d in range(d_lo, d_hi + 1):
            if c == 0:
                a0, b0 = 1, 0
            else:
                if _gcd(c, d) != 1:
                    continue
                a0 = _inv_mod(d, c)
                b0 = (a0 * d - 1) // c
            for k in range(K - 1, -1, -1):
                lo, hi = _row_interval(xn, yn, L, a0, b0, c, d, thr[k])
                if hi < lo:
                    break
                total[k] += hi - lo + 1
    return total


@njit(cache=True, nogil=True)
def ball_entries(xn, yn, L, thr, xmax, c_lo, c_hi, cap):
    """Materialize entries (a, b, c, d, num) in (c, d, a, b) order."""
    out = np.empty((cap, 5), dtype=np.int64)
    m = 0
    for c in range(c_lo, c_hi):
        if c == 0:
            d_lo, d_hi = 1, 1
        else:
            d_lo, d_hi = _d_range(xn, yn, L, c, xmax)
        for d in range(d_lo, d_hi + 1):
            if c == 0:
                a0, b0 = 1, 0
            else:
                if _gcd(c, d) != 1:
                    continue
                a0 = _inv_mod(d, c)
                b0 = (a0 * d - 1) // c
            lo, hi = _row_interval(xn, yn, L, a0, b0, c, d, thr)
            for n in range(lo, hi + 1):
                if m >= cap:
                    return out[:m], False
                a = a0 + n * c
                b = b0 + n * d
                out[m, 0] = a
                out[m, 1] = b
                out[m, 2] = c
                out[m, 3] = d
                out[m, 4] = _num(xn, yn, L, a, b, c, d)
                m += 1
    return out[:m], True
