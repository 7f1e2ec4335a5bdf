"""Compiled search for second forms of a pair with prescribed invariants.

With q1 = (A1, B1, C1) fixed and A2 given, the conditions disc(q2) = d2 and
codisc(q1, q2) = t force

    A1 B2^2 - 2 A2 B1 B2 + 4 C1 A2^2 + 2 t A2 - d2 A1 = 0,
    C2 = (B1 B2 - 2 C1 A2 - t) / (2 A1),

so B2 = (A2 B1 +- sqrt(d1 A2^2 - 2 t A1 A2 + d2 A1^2)) / A1.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _isqrt_exact(n):
    if n < 0:
        return -1
    r = int(math.sqrt(float(n)))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    if r * r == n:
        return r
    return -1


@njit(cache=True, nogil=True)
def second_forms(A1, B1, C1, d1, d2, t, a_lo, a_hi):
    """All integral (A2, B2, C2) with a_lo <= A2 <= a_hi meeting both conditions."""
    buf = np.empty((64, 3), dtype=np.int64)
    m = 0
    for A2 in range(a_lo, a_hi + 1):
        delta = d1 * A2 * A2 - 2 * t * A1 * A2 + d2 * A1 * A1
        s = _isqrt_exact(delta)
        if s < 0:
            continue
        for sign in (1, -1):
            if sign == -1 and s == 0:
                break
            nb = A2 * B1 + sign * s
            if nb % A1:
                continue
            B2 = nb // A1
            nc = B1 * B2 - 2 * C1 * A2 - t
            if nc % (2 * A1):
                continue
            C2 = nc // (2 * A1)
            if B2 * B2 - 4 * A2 * C2 != d2:
                continue
            if m >= buf.shape[0]:
                nbuf = np.empty((2 * buf.shape[0], 3), dtype=np.int64)
                nbuf[:m] = buf[:m]
                buf = nbuf
            buf[m, 0] = A2
            buf[m, 1] = B2
            buf[m, 2] = C2
            m += 1
    return buf[:m]
