"""Special functions behind the pair-correlation identity.

Z(S0, T0, F) is the integral of 1/sqrt(S^2 + T^2 + 2FST + 1 - F^2) over the
part of the box |S| <= S0, |T| <= T0 where the radicand is nonnegative.  It
splits as 2J(S0, T0, F) + 2J(T0, S0, F) and each J has a closed form:

* F > 1:  J = S0 (F(y1) + eps F(y2)), with the primitive
  F(S0, y) = artanh(y) - arctan(S0 y) / S0;
* F < 1:  J = S0 (V(s1) - V(s2)) - pi/2, with
  V(S0, s) = artanh(s) + arctan(s / S0) / S0.

Both primitives come from partial fractions of their defining integrands and
are validated against quadrature in the test-suite.  ``z_quadrature`` is the
independent check: the S-integral is done analytically (an inverse-hyperbolic
antiderivative, which absorbs the inverse-square-root edge) and the T-integral
by adaptive Gauss-Kronrod with the edge crossings passed as breakpoints.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .exceptions import DomainError, QuadratureError
from .moebius import GroupElement
from .pairs import FormPair, codiscriminant
from .quadforms import gamma_to_form

EPSABS = 1e-12
EPSREL = 1e-11


@dataclass(frozen=True)
class KernelParams:
    s0: float
    t0: float
    f_ratio: float

    def __post_init__(self):
        if not (self.s0 > 0 and self.t0 > 0):
            raise DomainError("KernelParams needs s0, t0 > 0")
        if self.f_ratio < 0:
            raise DomainError("KernelParams needs f_ratio >= 0")

    def swapped(self) -> "KernelParams":
        return KernelParams(self.t0, self.s0, self.f_ratio)


def _params(p) -> KernelParams:
    return p if isinstance(p, KernelParams) else KernelParams(*p)


def quad(fn, a, b, *, points=None, epsabs=EPSABS, epsrel=EPSREL, limit=500):
    """scipy quad with a hard failure when the error estimate misses the target."""
    if a == b:
        return 0.0, 0.0
    if points is not None:
        lo, hi = min(a, b), max(a, b)
        points = sorted({p for p in points if lo < p < hi})
        if not points:
            points = None
    # scipy's own warning is superseded by the error check below
    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(fn, a, b, points=points, epsabs=epsabs,
                                  epsrel=epsrel, limit=limit, full_output=0)
    tol = max(epsabs, epsrel * abs(val))
    if not math.isfinite(val) or err > 100 * tol:
        raise QuadratureError(f"quadrature error {err:.3g} above target {tol:.3g}",
                              estimate=val, error=err)
    return val, err


# ---------------------------------------------------------------- thresholds


def thresholds_AB(s0: float, t0: float):
    r = math.sqrt((1 + s0 * s0) * (1 + t0 * t0))
    return r - s0 * t0, r + s0 * t0


def thresholds_CD(F: float, s0: float):
    if F <= 1:
        raise DomainError("C, D are defined for F > 1")
    w = math.sqrt(F * F - 1) * math.sqrt(1 + s0 * s0) / s0
    return -F - w, -F + w


def thresholds(p):
    """(A, B, C, D); C and D are None when F <= 1."""
    p = _params(p)
    A, B = thresholds_AB(p.s0, p.t0)
    if p.f_ratio > 1:
        C, D = thresholds_CD(p.f_ratio, p.s0)
    else:
        C = D = None
    return A, B, C, D


# ---------------------------------------------------------------- primitives


def bigF(s0: float, y: float) -> float:
    """Primitive of A r^2 / ((1 - r^2)(r^2 + A - 1)), A = 1 + 1/s0^2, from 0 to y."""
    if not 0 <= y < 1:
        raise DomainError("bigF needs 0 <= y < 1")
    return math.atanh(y) - math.atan(s0 * y) / s0


def bigF_quad(s0: float, y: float) -> float:
    A = 1 + 1 / (s0 * s0)
    return quad(lambda r: A * r * r / ((1 - r * r) * (r * r + A - 1)), 0.0, y)[0]


def V(s0: float, s: float) -> float:
    """Primitive of A / ((1 - r^2)(1 + (A - 1) r^2)) from 0 to s, for |s| < 1."""
    if not -1 < s < 1:
        raise DomainError("V needs |s| < 1")
    return math.atanh(s) + math.atan(s / s0) / s0


def V_quad(s0: float, s: float) -> float:
    A = 1 + 1 / (s0 * s0)
    return quad(lambda r: A / ((1 - r * r) * (1 + (A - 1) * r * r)), 0.0, s)[0]


def half_line_constant_quad(F: float) -> float:
    """(1/2) * integral over R of sqrt(1 - F^2) / (1 + y^2 + 2Fy); equals pi/2."""
    if not 0 <= F < 1:
        raise DomainError("needs 0 <= F < 1")
    c = math.sqrt(1 - F * F)
    return 0.5 * quad(lambda y: c / (1 + y * y + 2 * F * y), -np.inf, np.inf)[0]


# ---------------------------------------------------------------------- J, Z


def _radicand(y, s0, F):
    return (1 + y * y + 2 * F * y) * s0 * s0 + 1 - F * F


def _j_integrand(y, s0, F):
    q = 1 + y * y + 2 * F * y
    return math.sqrt(max(q * s0 * s0 + 1 - F * F, 0.0)) / q


def y_pair(p):
    """(y1, y2) for F > 1; y2 is None when not needed (F > A)."""
    p = _params(p)
    s0, t0, F = p.s0, p.t0, p.f_ratio
    k = (1 + s0 * s0) * (F * F - 1)
    y1 = math.sqrt(max(0.0, 1 - k / (t0 + s0 * F) ** 2))
    den = (t0 - s0 * F) ** 2
    y2 = math.sqrt(max(0.0, 1 - k / den)) if den > 0 else 0.0
    return min(y1, 1.0), min(y2, 1.0)


def eps_sign(p) -> int:
    p = _params(p)
    A, _ = thresholds_AB(p.s0, p.t0)
    if p.f_ratio < A:
        r = p.t0 / p.s0
        if r > 1:
            return 1
        if r < 1:
            return -1
        return 0  # unreachable: F < A forces T0 != S0
    return 0


def _bigF_safe(s0, y):
    # F(y) diverges logarithmically as y -> 1; keep y strictly inside
    if y >= 1.0:
        y = math.nextafter(1.0, 0.0)
    return bigF(s0, y)


def j_gt1(p) -> float:
    p = _params(p)
    s0, t0, F = p.s0, p.t0, p.f_ratio
    if F <= 1:
        raise DomainError("j_gt1 needs F > 1")
    _, B = thresholds_AB(s0, t0)
    if F >= B:
        return 0.0
    y1, y2 = y_pair(p)
    e = eps_sign(p)
    out = _bigF_safe(s0, y1)
    if e:
        out += e * _bigF_safe(s0, y2)
    return s0 * out


def j_gt1_quad(p) -> float:
    """Direct quadrature of the F > 1 J-integral over the admissible y-set."""
    p = _params(p)
    s0, t0, F = p.s0, p.t0, p.f_ratio
    Y = t0 / s0
    C, D = thresholds_CD(F, s0)
    fn = lambda y: _j_integrand(y, s0, F)
    total = 0.0
    if -Y < C:
        total += quad(fn, -Y, min(C, Y))[0]
    if D < Y:
        total += quad(fn, max(D, -Y), Y)[0]
    return total


def j_lt1(p) -> float:
    p = _params(p)
    s0, t0, F = p.s0, p.t0, p.f_ratio
    if not 0 <= F < 1:
        raise DomainError("j_lt1 needs 0 <= F < 1")
    k = (1 + s0 * s0) * (1 - F * F)
    u1, u2 = s0 * F + t0, s0 * F - t0
    s1 = u1 / math.sqrt(u1 * u1 + k)
    s2 = u2 / math.sqrt(u2 * u2 + k)
    return s0 * (V(s0, s1) - V(s0, s2)) - math.pi / 2


def j_lt1_quad(p) -> float:
    p = _params(p)
    s0, t0, F = p.s0, p.t0, p.f_ratio
    Y = t0 / s0
    body = quad(lambda y: _j_integrand(y, s0, F), -Y, Y)[0]
    return body - half_line_constant_quad(F)


def j_fn(p) -> float:
    p = _params(p)
    if p.f_ratio == 1:
        raise DomainError("F = 1 is excluded")
    return j_gt1(p) if p.f_ratio > 1 else j_lt1(p)


def z_closed(p) -> float:
    p = _params(p)
    if p.f_ratio == 1:
        raise DomainError("F = 1 is excluded")
    return 2 * j_fn(p) + 2 * j_fn(p.swapped())


def _inner_S(T, s0, F):
    """Analytic S-integral of 1/sqrt((S + FT)^2 + c) over |S| <= s0 within the region."""
    c = (1 - F * F) * (1 + T * T)
    lo, hi = -s0 + F * T, s0 + F * T
    if c > 0:
        r = math.sqrt(c)
        return math.asinh(hi / r) - math.asinh(lo / r)
    w = math.sqrt(-c)
    out = 0.0
    if hi > w:
        out += math.acosh(hi / w) - math.acosh(max(lo, w) / w)
    if lo < -w:
        out += math.acosh(-lo / w) - math.acosh(max(-hi, w) / w)
    return out


def z_quadrature(p, *, epsrel: float = 1e-10) -> float:
    p = _params(p)
    s0, t0, F = p.s0, p.t0, p.f_ratio
    if F == 1:
        raise DomainError("F = 1 is excluded")
    pts = []
    if F > 1:
        r = math.sqrt((F * F - 1) * (s0 * s0 + 1))
        pts = [F * s0 + r, F * s0 - r, -F * s0 + r, -F * s0 - r]
    pts.append(0.0)
    return quad(lambda T: _inner_S(T, s0, F), -t0, t0, points=pts,
                epsabs=1e-13, epsrel=epsrel)[0]


def z_montecarlo(p, n: int = 200_000, seed: int = 0):
    """Crude uniform Monte Carlo over the box; returns (estimate, stderr)."""
    p = _params(p)
    s0, t0, F = p.s0, p.t0, p.f_ratio
    rng = np.random.default_rng(seed)
    S = rng.uniform(-s0, s0, n)
    T = rng.uniform(-t0, t0, n)
    q = S * S + T * T + 2 * F * S * T + 1 - F * F
    val = np.where(q > 0, 1.0 / np.sqrt(np.where(q > 0, q, 1.0)), 0.0)
    area = 4 * s0 * t0
    return area * val.mean(), area * val.std(ddof=1) / math.sqrt(n)


def k_fn(p) -> float:
    """K(S0, T0, F) by quadrature, 0 < F < 1."""
    p = _params(p)
    s0, t0, F = p.s0, p.t0, p.f_ratio
    if not 0 < F < 1:
        raise DomainError("k_fn needs 0 < F < 1")
    c = math.sqrt(1 - F * F)

    def fn(y):
        q = 1 + y * y + 2 * F * y
        # difference of square roots written without cancellation
        return q * s0 * s0 / (math.sqrt(q * s0 * s0 + 1 - F * F) + c) / q

    Y = t0 / s0
    return quad(fn, -Y, Y)[0]


# ------------------------------------------------------- arithmetic interface


def _d(t: int) -> int:
    if t <= 2:
        raise DomainError("trace must exceed 2")
    return t * t - 4


def char_params(t1: int, t2: int, f: int, x1: float, x2: float):
    """KernelParams for indicator kernels k_{x1/4}, k_{x2/4}, or None if a support is empty."""
    d1, d2 = _d(t1), _d(t2)
    if f * f == d1 * d2:
        raise DomainError("f^2 = (t1^2 - 4)(t2^2 - 4) is excluded")
    if x1 <= d1 or x2 <= d2:
        return None
    s0 = math.sqrt(x1 / d1 - 1)
    t0 = math.sqrt(x2 / d2 - 1)
    F = abs(f) / (math.sqrt(d1) * math.sqrt(d2))
    return KernelParams(s0, t0, F)


def i_char(t1: int, t2: int, f: int, x1: float, x2: float) -> float:
    p = char_params(t1, t2, f, x1, x2)
    if p is None:
        return 0.0
    assert p.f_ratio != 1.0
    return z_closed(p)


def f_support_bound(t1: int, t2: int, x1: float, x2: float) -> float:
    """i_char(t1, t2, f, x1, x2) vanishes unless |f| is below this value."""
    d1, d2 = _d(t1), _d(t2)
    if x1 <= d1 or x2 <= d2:
        return 0.0
    _, B = thresholds_AB(math.sqrt(x1 / d1 - 1), math.sqrt(x2 / d2 - 1))
    return B * math.sqrt(d1) * math.sqrt(d2)


def j_char(t1: int, t2: int, x1: float, x2: float) -> float:
    d1, d2 = _d(t1), _d(t2)
    if x1 <= d1 or x2 <= d2:
        return 0.0
    m = max(d1 / x1, d2 / x2)
    return 2 * math.sqrt(1 - m) / math.sqrt(m)


def j_char_quad(t1: int, t2: int, x1: float, x2: float) -> float:
    """Angular integral of the two indicators against dtheta / cos^2 theta."""
    d1, d2 = _d(t1), _d(t2)
    ind = lambda th, d, x: 1.0 if d / (4 * math.cos(th) ** 2) <= x / 4 else 0.0
    fn = lambda th: ind(th, d1, x1) * ind(th, d2, x2) / math.cos(th) ** 2
    # edges of the two indicator supports, located by root finding
    from scipy.optimize import brentq
    pts = []
    for d, x in ((d1, x1), (d2, x2)):
        if x > d:
            g = lambda th: math.cos(th) ** 2 - d / x
            r = brentq(g, 0.0, math.pi / 2, xtol=1e-15)
            pts += [r, -r]
    if not pts:
        return 0.0
    edge = max(abs(v) for v in pts)
    # the integrand vanishes beyond the outer edge; integrate piecewise
    return quad(fn, -edge, edge, points=pts, epsrel=1e-12)[0]


# --------------------------------------------------------------- Monte Carlo


def _axis(g: GroupElement):
    Q = gamma_to_form(g)
    D = Q.disc
    r = math.sqrt(D)
    th1, th2 = (-Q.B - r) / (2 * Q.A), (-Q.B + r) / (2 * Q.A)
    return Q, (min(th1, th2), max(th1, th2))


def f_of_pair(g1: GroupElement, g2: GroupElement) -> int:
    return codiscriminant(gamma_to_form(g1), gamma_to_form(g2))


def lemma23_mc(g1: GroupElement, g2: GroupElement, x1: float, x2: float,
               n: int = 400_000, seed: int = 0, strata: int = 64):
    """Monte Carlo estimate of the hyperbolic-area integral of the product of
    the two indicators u(z, g_i z) <= x_i / 4.  Returns (estimate, stderr).

    Sampling is stratified in (x, log y) over a box that provably contains the
    intersection of the two supports.
    """
    t1, t2 = g1.trace, g2.trace
    if t1 <= 2 or t2 <= 2:
        raise DomainError("lemma23_mc needs traces > 2")
    Q1, (p1, p1b) = _axis(g1)
    Q2, (p2, p2b) = _axis(g2)
    if FormPair(Q1, Q2).is_proportional():
        raise DomainError("proportional forms share their fixed points")
    if x1 <= t1 * t1 - 4 or x2 <= t2 * t2 - 4:
        return 0.0, 0.0

    sx1, sx2 = math.sqrt(x1), math.sqrt(x2)
    ymax = min(sx1 / abs(Q1.A), sx2 / abs(Q2.A))
    k1 = 2 * sx1 / (abs(Q1.A) * (p1b - p1))
    k2 = 2 * sx2 / (abs(Q2.A) * (p2b - p2))
    delta = min(abs(a - b) for a in (p1, p1b) for b in (p2, p2b))
    ymin = delta / (k1 + k2)
    if ymin >= ymax:
        return 0.0, 0.0
    xlo = max(p1 - k1 * ymax, p2 - k2 * ymax)
    xhi = min(p1b + k1 * ymax, p2b + k2 * ymax)
    if xlo >= xhi:
        return 0.0, 0.0

    rng = np.random.default_rng(seed)
    la, lb = math.log(ymin), math.log(ymax)
    per = max(n // strata, 2)
    edges = np.linspace(la, lb, strata + 1)
    w_stratum = (edges[1] - edges[0]) * (xhi - xlo)
    est, var = 0.0, 0.0
    for s in range(strata):
        ls = rng.uniform(edges[s], edges[s + 1], per)
        xs = rng.uniform(xlo, xhi, per)
        ys = np.exp(ls)
        z = xs + 1j * ys
        in1 = np.abs(Q1.A * z * z + Q1.B * z + Q1.C) <= sx1 * ys
        in2 = np.abs(Q2.A * z * z + Q2.B * z + Q2.C) <= sx2 * ys
        vals = np.where(in1 & in2, 1.0 / ys, 0.0)
        est += w_stratum * vals.mean()
        var += w_stratum ** 2 * vals.var(ddof=1) / per
    return est, math.sqrt(var)


# -------------------------------------------------------- elementary bounds


def sqrt_product_gap(t1: int, t2: int):
    """(sqrt(d1 d2) - (t1 t2 - 5), (t1 t2 - 4) - sqrt(d1 d2)) with d_i = t_i^2 - 4."""
    r = math.sqrt((t1 * t1 - 4) * (t2 * t2 - 4))
    return r - (t1 * t2 - 5), (t1 * t2 - 4) - r
