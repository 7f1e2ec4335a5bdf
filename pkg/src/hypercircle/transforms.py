"""Smoothed counting kernels and their radial transforms.

The bump is eta0(tau) = c exp(-1 / (1 - (2 tau - 3)^2)) on (1, 2), symmetric
about 3/2, so its first moment is exactly 3/2.  Writing Phi for its
cumulative integral from 1,

    k_{x,D}(y) = Phi(clip((x - y) / D, 1, 2)),

which is the form used for bulk evaluation.  The transform chain is

    q_m(v) = int_0^inf m(v + s) s^{-1/2} ds,
    g_m(a) = 2 q_m(sinh^2(a / 2)),
    h_m(r) = int g_m(a) e^{ira} da = 2 int_0^inf g_m(a) cos(ra) da,

and for the sharp kernel q(v) = 2 sqrt(max(x - v, 0)) in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from . import moebius
from .exceptions import DomainError
from .kernels import quad
from .moebius import HPoint

# ---------------------------------------------------------------- the bump


def _eta_raw(t):
    t = np.asarray(t, dtype=float)
    u = 2 * t - 3
    inside = np.abs(u) < 1
    out = np.zeros_like(t)
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


_TABLE_N = 20000
_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


@lru_cache(maxsize=1)
def _table():
    # cumulative integral on a fine grid by 10-point Gauss-Legendre per cell
    edges = np.linspace(1.0, 2.0, _TABLE_N + 1)
    gx, gw = np.polynomial.legendre.leggauss(10)
    h = edges[1] - edges[0]
    mids = (edges[:-1] + edges[1:]) / 2
    nodes = mids[:, None] + (h / 2) * gx[None, :]
    cell = (_eta_raw(nodes) * gw[None, :]).sum(axis=1) * (h / 2)
    cum = np.concatenate([[0.0], np.cumsum(cell)])
    norm = cum[-1]
    spline = CubicHermiteSpline(edges, cum / norm, _eta_raw(edges) / norm)
    return norm, spline


def eta0_normalizer() -> float:
    """c such that eta0 = c * exp(...) integrates to 1."""
    return 1.0 / _table()[0]


def eta0(tau):
    """The bump profile; accepts scalars or arrays."""
    out = _eta_raw(np.atleast_1d(tau)) * eta0_normalizer()
    return float(out[0]) if np.ndim(tau) == 0 else out


def eta0_cdf(s):
    """Phi(s) = int_1^s eta0, vectorized; 0 below 1 and 1 above 2."""
    s = np.clip(np.asarray(s, dtype=float), 1.0, 2.0)
    out = _table()[1](s)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def eta0_moment(k: int = 1) -> float:
    """int_1^2 tau^k eta0(tau) dtau by quadrature."""
    return quad(lambda t: t ** k * eta0(t), 1.0, 2.0, epsabs=1e-15, epsrel=1e-14)[0]


# ----------------------------------------------------------------- kernels


def k_char(x: float, y: float) -> int:
    if y < 0:
        raise DomainError("k_char needs y >= 0")
    return 1 if y <= x else 0


def k_smooth(x: float, D: float, y):
    """(1/D) int_D^{2D} eta0(tau/D) k_x(y + tau) dtau; vectorized in y."""
    if D <= 0:
        raise DomainError("k_smooth needs D > 0")
    y = np.asarray(y, dtype=float)
    out = eta0_cdf((x - y) / D)
    return out


def k_smooth_quad(x: float, D: float, y: float) -> float:
    """Oracle: the defining integral, with the indicator's jump as a breakpoint."""
    lo, hi = D, min(2 * D, x - y)
    if hi <= lo:
        return 0.0
    return quad(lambda t: eta0(t / D), lo, hi, epsabs=1e-14, epsrel=1e-13)[0] / D


@dataclass(frozen=True)
class SmoothingConfig:
    x: float
    D: float
    J: int = 2
    d: float = 100.0
    eta0_id: str = "symmetric-bump"

    def __post_init__(self):
        if not 1 < self.D < self.x / 10:
            raise DomainError("SmoothingConfig needs 1 < D < x/10")
        if self.J < 2:
            raise DomainError("SmoothingConfig needs J >= 2")
        if self.eta0_id != "symmetric-bump":
            raise DomainError(f"unknown bump profile {self.eta0_id!r}")


@dataclass(frozen=True)
class TransformProbe:
    r: complex
    value: complex


class SharpKernel:
    """Indicator of [0, x]."""

    def __init__(self, x: float):
        self.x = float(x)

    @property
    def support(self) -> float:
        return self.x

    def __call__(self, y):
        return np.where(np.asarray(y) <= self.x, 1.0, 0.0)

    def q(self, v: float) -> float:
        return 2.0 * math.sqrt(max(self.x - v, 0.0))

    def q_quad(self, v: float) -> float:
        # s = w^2 removes the s^{-1/2} endpoint singularity
        if v >= self.x:
            return 0.0
        return quad(lambda w: 2.0, 0.0, math.sqrt(self.x - v))[0]


class SmoothedKernel:
    """k_{x,D}, the bump average of sharp kernels."""

    def __init__(self, x: float, D: float):
        if D <= 0:
            raise DomainError("SmoothedKernel needs D > 0")
        self.x, self.D = float(x), float(D)

    @property
    def support(self) -> float:
        return self.x - self.D

    def __call__(self, y):
        return k_smooth(self.x, self.D, y)

    def q(self, v: float) -> float:
        # with tau = w^2, q = 2 int k(v + w^2) dw: the plateau gives 2 w_a
        # exactly and the smooth transition band is a Gauss-Legendre sum
        x, D = self.x, self.D
        wb2 = x - D - v
        if wb2 <= 0:
            return 0.0
        wa = math.sqrt(max(x - 2 * D - v, 0.0))
        wb = math.sqrt(wb2)
        half = (wb - wa) / 2
        w = wa + half * (1 + _GL_X)
        band = half * float(np.dot(_GL_W, eta0_cdf((x - v - w * w) / D)))
        return 2.0 * (wa + band)

    def q_quad(self, v: float) -> float:
        """Oracle: the bump average of sharp-kernel q values."""
        x, D = self.x, self.D
        hi = min(2.0, (x - v) / D)
        if hi <= 1.0:
            return 0.0
        return quad(lambda s: eta0(s) * 2.0 * math.sqrt(max(x - D * s - v, 0.0)), 1.0, hi,
                    epsabs=1e-13, epsrel=1e-12)[0]


def g_transform(m, a: float) -> float:
    return 2.0 * m.q(math.sinh(a / 2) ** 2)


def _a_support(m) -> float:
    return 2.0 * math.asinh(math.sqrt(max(m.support, 0.0)))


def h_transform(m, r: complex, *, epsrel: float = 1e-11) -> complex:
    """h_m(r) = 2 int_0^A g_m(a) cos(ra) da over the compact support [0, A]."""
    r = complex(r)
    A = _a_support(m)
    if A == 0:
        return 0j
    g = lambda a: g_transform(m, a)
    al, be = r.real, r.imag
    if al == 0.0:
        val = quad(lambda a: g(a) * math.cosh(be * a), 0.0, A, epsabs=1e-12, epsrel=epsrel)[0]
        return complex(2 * val, 0.0)
    if be == 0.0:
        val, err = integrate.quad(g, 0.0, A, weight="cos", wvar=al, limit=2000,
                                  epsabs=1e-12, epsrel=epsrel)
        return complex(2 * val, 0.0)
    re = quad(lambda a: g(a) * math.cos(al * a) * math.cosh(be * a), 0.0, A, limit=2000)[0]
    im = quad(lambda a: -g(a) * math.sin(al * a) * math.sinh(be * a), 0.0, A, limit=2000)[0]
    return complex(2 * re, 2 * im)


def h_probe(m, r: complex) -> TransformProbe:
    return TransformProbe(complex(r), h_transform(m, r))


def h_smoothed_by_average(x: float, D: float, r: complex) -> complex:
    """Right side of the averaging identity: int_1^2 eta0(s) h_{x - Ds}(r) ds."""
    re = quad(lambda s: eta0(s) * h_transform(SharpKernel(x - D * s), r).real, 1.0, 2.0,
              epsabs=1e-10, epsrel=1e-9)[0]
    im = quad(lambda s: eta0(s) * h_transform(SharpKernel(x - D * s), r).imag, 1.0, 2.0,
              epsabs=1e-10, epsrel=1e-9)[0]
    return complex(re, im)


def h_exact_half(x: float, D: float | None = None) -> float:
    """Exact value at r = i/2: 4 pi x for the sharp kernel, 4 pi x - 6 pi D smoothed."""
    return 4 * math.pi * x - (0.0 if D is None else 6 * math.pi * D)


# ----------------------------------------------------------- count identity


def ball_u_floats(z: HPoint, U, *, cap=None):
    """u(gz, z) as floats for every g with u <= U (from exact integer numerators)."""
    X = 4 * moebius.as_fraction(U) + 2
    entries = moebius.enumerate_ball_array(z, X, cap=cap)
    _, yn, L = z.scaled()
    scale = 4.0 * yn * yn * L * L
    return entries[:, 4].astype(float) / scale


def check_lemma52(z: HPoint, x: float, D: float, *, cap=None) -> dict:
    """Smoothed count against its main term 12x - 18D."""
    # D up to x/4 keeps the plateau x - 2D of the kernel nonempty
    if not 1 < D < x / 4:
        raise DomainError("check_lemma52 needs 1 < D < x/4")
    u = ball_u_floats(z, moebius.as_fraction(x) - moebius.as_fraction(D), cap=cap)
    lhs = float(np.sum(k_smooth(x, D, u)))
    main = 12 * x - 18 * D
    resid = lhs - main
    scale = x / math.sqrt(D) + math.sqrt(x) * math.log(x)
    return {
        "x": x, "D": D, "lhs": lhs, "main": main, "residual": resid,
        "ratio": resid / scale, "ratio_x_over_sqrtD": resid / (x / math.sqrt(D)),
        "terms": int(u.size),
    }


# ------------------------------------------------------------- differencing


def binom_weights(J: int):
    """a[j1][j2] = (-1)^(j1 + j2) C(J, j1) C(J, j2) as exact integers."""
    if J < 1:
        raise DomainError("binom_weights needs J >= 1")
    row = [(-1) ** j * math.comb(J, j) for j in range(J + 1)]
    return [[a * b for b in row] for a in row]


def _check_dJ(X, d, J):
    if d < 100 or 100 * J * d > X:
        raise DomainError("n_dJ needs d >= 100 and 100 J d <= X")
    if J < 1:
        raise DomainError("n_dJ needs J >= 1")


def n_dJ_terms(z: HPoint, X, d, J: int, *, mode: str = "exact", nodes: int = 64, cap=None):
    """The J + 1 terms int_1^2 eta0(tau) N(z, X - j d tau) dtau (unsigned).

    ``exact`` sums the bump CDF over orbit points, which is the integral with
    every breakpoint; ``gauss`` uses Gauss-Legendre nodes with exact counts.
    """
    X = moebius.as_fraction(X)
    _check_dJ(X, d, J)
    terms = [Fraction(moebius.count_N(z, X, cap=cap))]
    if mode == "exact":
        u = ball_u_floats(z, (X - 2 - moebius.as_fraction(d)) / 4, cap=cap)
        v = 4 * u + 2
        Xf = float(X)
        for j in range(1, J + 1):
            terms.append(float(np.sum(eta0_cdf((Xf - v) / (j * float(d))))))
    elif mode == "gauss":
        gx, gw = np.polynomial.legendre.leggauss(nodes)
        tau = 1.5 + 0.5 * gx
        w = 0.5 * gw * eta0(tau)
        for j in range(1, J + 1):
            Xs = [X - moebius.as_fraction(j * d * float(t)) for t in tau]
            counts = np.array(moebius.count_many(z, Xs, cap=cap), dtype=float)
            terms.append(float(np.dot(w, counts)))
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return terms


def n_dJ(z: HPoint, X, d, J: int, *, mode: str = "exact", nodes: int = 64, cap=None) -> float:
    terms = n_dJ_terms(z, X, d, J, mode=mode, nodes=nodes, cap=cap)
    return math.fsum((-1) ** j * math.comb(J, j) * float(t) for j, t in enumerate(terms))


def difference_constant(J: int, value: float = 1.0) -> float:
    """The differencing applied to a constant function; zero for J >= 1."""
    return sum((-1) ** j * math.comb(J, j) * value for j in range(J + 1))
