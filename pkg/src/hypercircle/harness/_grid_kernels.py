"""Compiled grid sums for fundamental-domain quadrature.

Points are parametrized by (x, s) with s = 1/y, in which the hyperbolic
measure dx dy / y^2 becomes Lebesgue measure dx ds.  Columns run over
x in [-1/2, 1/2] and s in [1/H, 1/sqrt(1 - x^2)].
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def trace_class_count(x, y, t, xbound):
    """#{g in SL2(Z), trace t : 4u(z, gz) <= xbound} at z = x + iy.

    Runs over forms (A, B, C) of discriminant t^2 - 4 with B = t (mod 2):
    |Q(z)|^2 <= xbound y^2 forces |A| <= sqrt(xbound)/y and |2Ax + B| <= sqrt(xbound).
    """
    D = t * t - 4
    r = math.sqrt(xbound)
    lim = xbound * y * y
    amax = int(math.floor(r / y)) + 1
    cnt = 0
    for A in range(-amax, amax + 1):
        if A == 0:
            continue
        blo = int(math.ceil(-2.0 * A * x - r)) - 1
        bhi = int(math.floor(-2.0 * A * x + r)) + 1
        if (blo - t) % 2:
            blo += 1
        for B in range(blo, bhi + 1, 2):
            num = B * B - D
            if num % (4 * A):
                continue
            C = num // (4 * A)
            re = A * (x * x - y * y) + B * x + C
            im = (2.0 * A * x + B) * y
            if re * re + im * im <= lim:
                cnt += 1
    return cnt


@njit(cache=True, nogil=True)
def product_integral(t1, t2, x1, x2, H, nx, nv):
    """Midpoint rule in (x, s) for the integral of M_t1 M_t2 over the domain cut at H."""
    fine = 0.0
    smin = 1.0 / H
    for i in range(nx):
        x = -0.5 + (i + 0.5) / nx
        smax = 1.0 / math.sqrt(1.0 - x * x)
        h = (smax - smin) / nv
        col = 0.0
        for j in range(nv):
            s = smin + (j + 0.5) * h
            y = 1.0 / s
            m1 = trace_class_count(x, y, t1, x1)
            if m1 == 0:
                continue
            m2 = trace_class_count(x, y, t2, x2)
            col += m1 * m2
        fine += col * h / nx
    return fine


@njit(cache=True, nogil=True)
def midpoint_nodes(H, nx, nv):
    """Nodes (x, y) and weights of the (x, s) midpoint rule."""
    n = nx * nv
    xs = np.empty(n)
    ys = np.empty(n)
    ws = np.empty(n)
    smin = 1.0 / H
    k = 0
    for i in range(nx):
        x = -0.5 + (i + 0.5) / nx
        smax = 1.0 / math.sqrt(1.0 - x * x)
        h = (smax - smin) / nv
        for j in range(nv):
            s = smin + (j + 0.5) * h
            xs[k] = x
            ys[k] = 1.0 / s
            ws[k] = h / nx
            k += 1
    return xs, ys, ws
