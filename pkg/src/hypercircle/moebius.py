"""Exact arithmetic on PSL2(Z) acting on the upper half plane.

Points carry rational coordinates so every orbit predicate is decided in
integers.  For z = x + iy and g = (a, b; c, d),

    4 u(gz, z) = |c z^2 + (d - a) z - b|^2 / y^2,

and the ball {g : 4u(gz, z) + 2 <= X} is enumerated coset by coset: for each
coprime bottom row (c, d) the left translates (1, n; 0, 1) g form an
arithmetic progression in which the quantity above is a convex quadratic in
n, so the admissible n form an interval.

Counting uses a compiled int64 kernel whenever an a priori magnitude bound
shows no intermediate can overflow; otherwise the same algorithm runs on
Python integers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _orbit_kernels as _k
from .exceptions import DomainError, ResourceCapError

DEFAULT_CAP = 10**8
_INT64_SAFE = 2**62


def as_fraction(v) -> Fraction:
    """Exact rational from int, Fraction, str ('3/2', '0.25') or float."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, (float, np.floating)):
        return Fraction(float(v))
    raise TypeError(f"cannot convert {v!r} to an exact rational")


@dataclass(frozen=True)
class GroupElement:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if not isinstance(v, int):
                object.__setattr__(self, name, int(v))
        if self.a * self.d - self.b * self.c != 1:
            raise DomainError(f"determinant of {self.as_tuple()} is not 1")

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> int:
        return self.a + self.d

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def neg(self) -> "GroupElement":
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def normalized(self) -> "GroupElement":
        """PSL2 representative with c > 0, or c = 0 and d > 0."""
        if self.c < 0 or (self.c == 0 and self.d < 0):
            return self.neg()
        return self

    def psl_equal(self, other: "GroupElement") -> bool:
        return self.normalized() == other.normalized()

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def __pow__(self, n: int) -> "GroupElement":
        base = self if n >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(n)):
            out = compose(out, base)
        return out


IDENTITY = GroupElement(1, 0, 0, 1)
S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)


@dataclass(frozen=True)
class HPoint:
    """Point x + iy of the upper half plane with rational coordinates."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", as_fraction(self.x))
        object.__setattr__(self, "y", as_fraction(self.y))
        if self.y <= 0:
            raise DomainError("HPoint requires y > 0")

    def __complex__(self):
        return complex(float(self.x), float(self.y))

    def scaled(self):
        """Integers (xn, yn, L) with x = xn/L, y = yn/L."""
        L = math.lcm(self.x.denominator, self.y.denominator)
        return int(self.x * L), int(self.y * L), L


@dataclass(frozen=True)
class BallEntry:
    """One orbit-ball member.

    ``element`` is the normalized PSL2 representative (c > 0 or c = 0, d > 0);
    ``trace`` is |a + d|, the trace of the positive-trace SL2 lift.
    """

    element: GroupElement
    u_value: Fraction
    trace: int


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    # Python ints never overflow, so no promotion step is needed
    return GroupElement(
        g.a * h.a + g.b * h.c,
        g.a * h.b + g.b * h.d,
        g.c * h.a + g.d * h.c,
        g.c * h.b + g.d * h.d,
    )


def apply(g: GroupElement, z: HPoint) -> HPoint:
    """Image (az + b)/(cz + d), exact."""
    x, y = z.x, z.y
    # (az+b)(c zbar+d) / |cz+d|^2
    den = (g.c * x + g.d) ** 2 + (g.c * y) ** 2
    re = (g.a * x + g.b) * (g.c * x + g.d) + g.a * g.c * y * y
    return HPoint(re / den, y / den)


def point_pair_u(z: HPoint, w: HPoint) -> Fraction:
    return ((z.x - w.x) ** 2 + (z.y - w.y) ** 2) / (4 * z.y * w.y)


def cosh_distance(z: HPoint, w: HPoint) -> float:
    """cosh of the hyperbolic distance, from the log-ratio formula on complex floats."""
    zc, wc = complex(z), complex(w)
    rho = 2.0 * math.atanh(abs(zc - wc) / abs(zc - wc.conjugate()))
    return math.cosh(rho)


# ---------------------------------------------------------------- enumeration


def _threshold(z_scaled, X: Fraction) -> int:
    xn, yn, L = z_scaled
    return math.floor((X - 2) * yn * yn * L * L)


def _entry_bound(z: HPoint, X: Fraction) -> float:
    # Frobenius norm bound: |entry| <= sqrt(X) (1 + |z|^2) / y
    return math.sqrt(float(X)) * (1 + float(z.x) ** 2 + float(z.y) ** 2) / float(z.y) + 2


def _fits_int64(z: HPoint, X: Fraction) -> bool:
    xn, yn, L = z.scaled()
    E = _entry_bound(z, X)
    R = E * (xn * xn + yn * yn + 2 * abs(xn) * L + L * L) + 1
    return 2.0 * R * R < _INT64_SAFE


def _c_max(z: HPoint, X: Fraction) -> int:
    return int(math.floor(math.sqrt(float(X)) / float(z.y))) + 2


def predicted_size(X) -> int:
    """Generous a priori size of a ball (main term 3X with headroom)."""
    X = as_fraction(X)
    return int(4 * max(X, 0)) + 64


def _check_cap(X: Fraction, cap):
    cap = DEFAULT_CAP if cap is None else cap
    pred = predicted_size(X)
    if cap and pred > cap:
        raise ResourceCapError(
            f"predicted ball size {pred} exceeds cap {cap}", predicted=pred, cap=cap
        )


def _chunks(c_hi: int, workers: int):
    if workers <= 1 or c_hi < 64:
        return [(0, c_hi)]
    # rows near c = 0 carry the most work; split by roughly equal area
    edges = sorted({int(c_hi * math.sqrt(k / (4 * workers))) for k in range(4 * workers + 1)})
    edges[0], edges[-1] = 0, c_hi
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1) if edges[i] < edges[i + 1]]


def _run_chunks(fn, chunks, workers):
    if len(chunks) == 1 or workers <= 1:
        return [fn(lo, hi) for lo, hi in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ch: fn(*ch), chunks))


# pure-Python path: same coset algorithm on unbounded integers

def _py_num(xn, yn, L, a, b, c, d):
    dm = d - a
    re = c * (xn * xn - yn * yn) + dm * xn * L - b * L * L
    im = 2 * c * xn * yn + dm * yn * L
    return re * re + im * im


def _py_row_interval(xn, yn, L, a0, b0, c, d, thr):
    dm = d - a0
    re0 = c * (xn * xn - yn * yn) + dm * xn * L - b0 * L * L
    im0 = 2 * c * xn * yn + dm * yn * L
    wr = c * xn * L + d * L * L
    wi = c * yn * L
    w2 = wr * wr + wi * wi
    center = Fraction(re0 * wr + im0 * wi, w2)
    cross = re0 * wi - im0 * wr
    rem_num = thr * w2 - cross * cross  # (n - center)^2 <= rem_num / w2^2
    num = lambda n: _py_num(xn, yn, L, a0 + n * c, b0 + n * d, c, d)
    if rem_num < 0:
        return 1, 0
    hw = Fraction(math.isqrt(rem_num), w2)
    lo = math.ceil(center - hw) - 1
    hi = math.floor(center + hw) + 1
    while num(lo - 1) <= thr:
        lo -= 1
    while lo <= hi and num(lo) > thr:
        lo += 1
    while num(hi + 1) <= thr:
        hi += 1
    while hi >= lo and num(hi) > thr:
        hi -= 1
    return lo, hi


def _py_rows(z: HPoint, Xmax: Fraction):
    """Yield (c, d, a0, b0) for every candidate coset, in (c, d) order."""
    x, y = z.x, z.y
    yield 0, 1, 1, 0
    for c in range(1, _c_max(z, Xmax) + 1):
        w2 = Xmax - (c * y) ** 2
        if w2 < 0:
            continue
        w = math.isqrt(math.ceil(w2)) + 1
        cx = c * x
        for d in range(math.floor(-cx) - w - 1, math.ceil(-cx) + w + 2):
            if math.gcd(c, d) != 1:
                continue
            a0 = pow(d, -1, c) if c > 1 else 0
            b0 = (a0 * d - 1) // c
            yield c, d, a0, b0


def _py_entries(z: HPoint, X: Fraction):
    sc = z.scaled()
    xn, yn, L = sc
    thr = _threshold(sc, X)
    for c, d, a0, b0 in _py_rows(z, X):
        lo, hi = _py_row_interval(xn, yn, L, a0, b0, c, d, thr)
        for n in range(lo, hi + 1):
            a, b = a0 + n * c, b0 + n * d
            yield a, b, c, d, _py_num(xn, yn, L, a, b, c, d)


def _prep(z: HPoint, Xs: Sequence[Fraction]):
    xn, yn, L = z.scaled()
    thr = np.array([_threshold((xn, yn, L), X) for X in Xs], dtype=np.int64)
    return xn, yn, L, thr


def _ball_rows(z: HPoint, X: Fraction, cap, workers, force_python):
    _check_cap(X, cap)
    if force_python or not _fits_int64(z, X):
        rows = list(_py_entries(z, X))
        return np.array(rows, dtype=object).reshape(-1, 5)
    xn, yn, L, thr = _prep(z, [X])
    est = predicted_size(X)

    def run(lo, hi):
        size = est
        while True:
            out, done = _k.ball_entries(xn, yn, L, thr[0], float(X), lo, hi, size)
            if done:
                return out
            size *= 2

    parts = _run_chunks(run, _chunks(_c_max(z, X) + 1, workers), workers)
    return np.concatenate(parts) if parts else np.empty((0, 5), dtype=np.int64)


def enumerate_ball_array(z: HPoint, X, *, cap=None, workers: int = 1,
                         force_python: bool = False) -> np.ndarray:
    """The ball as an (m, 5) array of rows (a, b, c, d, num).

    u = num / (4 yn^2 L^2) exactly, with (xn, yn, L) = z.scaled().  The dtype
    is int64 on the compiled path and object (Python ints) on the fallback.
    """
    X = as_fraction(X)
    if X < 2:
        return np.empty((0, 5), dtype=np.int64)
    return _ball_rows(z, X, cap, workers, force_python)


def enumerate_ball(z: HPoint, X, *, cap=None, workers: int = 1, force_python: bool = False):
    """All PSL2(Z) elements with 4u(gz, z) + 2 <= X, sorted by (c, d, a, b).

    Each entry carries its exact u value.  Raises ResourceCapError when the
    predicted size exceeds ``cap`` (default 10**8; pass 0 to disable).
    """
    X = as_fraction(X)
    if X < 2:
        return []
    _, yn, L = z.scaled()
    scale = 4 * yn * yn * L * L
    rows = enumerate_ball_array(z, X, cap=cap, workers=workers, force_python=force_python)
    out = []
    for r in rows.tolist():
        a, b, c, d, num = (int(v) for v in r)
        out.append(BallEntry(GroupElement(a, b, c, d), Fraction(num, scale), abs(a + d)))
    return out


def ball_stats(z: HPoint, Xs: Iterable, *, tmax: int | None = None, cap=None,
               workers: int = 1, force_python: bool = False):
    """Single pass over the largest ball, reporting for each X in ``Xs``:

    ``total`` - N(z, X); ``nonhyp`` - members with |trace| <= 2; ``hist`` -
    array with hist[k, t] = members with |trace| = t (for 3 <= t <= tmax).
    """
    Xs = [as_fraction(X) for X in Xs]
    order = sorted(range(len(Xs)), key=lambda i: Xs[i])
    Xsorted = [Xs[i] for i in order]
    if Xsorted[0] < 2:
        raise DomainError("ball_stats needs X >= 2")
    Xmax = Xsorted[-1]
    _check_cap(Xmax, cap)
    if tmax is None:
        tmax = math.isqrt(math.floor(Xmax) + 2) + 1
    K = len(Xs)
    if force_python or not _fits_int64(z, Xmax):
        sc = z.scaled()
        thr = [_threshold(sc, X) for X in Xsorted]
        total = np.zeros(K, dtype=np.int64)
        nonhyp = np.zeros(K, dtype=np.int64)
        hist = np.zeros((K, tmax + 1), dtype=np.int64)
        for a, b, c, d, num in _py_entries(z, Xmax):
            tr = abs(a + d)
            for k in range(K):
                if num <= thr[k]:
                    total[k] += 1
                    if tr <= 2:
                        nonhyp[k] += 1
                    elif tr <= tmax:
                        hist[k, tr] += 1
    else:
        xn, yn, L, thr = _prep(z, Xsorted)
        parts = _run_chunks(
            lambda lo, hi: _k.ball_stats(xn, yn, L, thr, float(Xmax), lo, hi, tmax),
            _chunks(_c_max(z, Xmax) + 1, workers),
            workers,
        )
        total = sum(p[0] for p in parts)
        nonhyp = sum(p[1] for p in parts)
        hist = sum(p[2] for p in parts)
    inv = np.argsort(order)
    return {"total": total[inv], "nonhyp": nonhyp[inv], "hist": hist[inv]}


def count_many(z: HPoint, Xs: Iterable, *, cap=None, workers: int = 1,
               force_python: bool = False) -> list[int]:
    """N(z, X) for several X in one pass without materializing entries."""
    Xs = [as_fraction(X) for X in Xs]
    out = [0] * len(Xs)
    live = [i for i, X in enumerate(Xs) if X >= 2]
    if not live:
        return out
    order = sorted(live, key=lambda i: Xs[i])
    Xsorted = [Xs[i] for i in order]
    Xmax = Xsorted[-1]
    _check_cap(Xmax, cap)
    if force_python or not _fits_int64(z, Xmax):
        sc = z.scaled()
        thr = [_threshold(sc, X) for X in Xsorted]
        counts = [0] * len(order)
        for *_, num in _py_entries(z, Xmax):
            for k, th in enumerate(thr):
                if num <= th:
                    counts[k] += 1
    else:
        xn, yn, L, thr = _prep(z, Xsorted)
        parts = _run_chunks(
            lambda lo, hi: _k.ball_count_rows(xn, yn, L, thr, float(Xmax), lo, hi),
            _chunks(_c_max(z, Xmax) + 1, workers),
            workers,
        )
        counts = [int(v) for v in sum(parts)]
    for k, i in enumerate(order):
        out[i] = int(counts[k])
    return out


def count_N(z: HPoint, X, *, cap=None, workers: int = 1, force_python: bool = False) -> int:
    """N(z, X) = #{g in PSL2(Z) : 4u(gz, z) + 2 <= X}, streaming."""
    return count_many(z, [X], cap=cap, workers=workers, force_python=force_python)[0]


def count_nonhyperbolic(z: HPoint, X, *, cap=None, workers: int = 1,
                        force_python: bool = False) -> int:
    X = as_fraction(X)
    if X < 2:
        return 0
    return int(ball_stats(z, [X], tmax=2, cap=cap, workers=workers,
                          force_python=force_python)["nonhyp"][0])


def enumerate_trace_class(z: HPoint, t: int, U, *, cap=None) -> list[GroupElement]:
    """SL2 elements of trace exactly t (> 2) with u(gz, z) <= U."""
    if t <= 2:
        raise DomainError("trace class needs t > 2")
    U = as_fraction(U)
    if U < Fraction(t * t - 4, 4):
        return []
    out = []
    for e in enumerate_ball(z, 4 * U + 2, cap=cap):
        if e.trace == t:
            g = e.element
            out.append(g if g.trace == t else g.neg())
    return out


def count_trace_class(z: HPoint, t: int, U, *, cap=None) -> int:
    if t <= 2:
        raise DomainError("trace class needs t > 2")
    U = as_fraction(U)
    if U < Fraction(t * t - 4, 4):
        return 0
    return int(ball_stats(z, [4 * U + 2], tmax=t, cap=cap)["hist"][0, t])


def brute_force_ball(z: HPoint, X) -> list[tuple[int, int, int, int]]:
    """Box oracle: scan every matrix with entries bounded by the Frobenius bound."""
    X = as_fraction(X)
    R = math.ceil(_entry_bound(z, X))
    out = []
    x, y = z.x, z.y
    for c in range(0, R + 1):
        for d in range(-R, R + 1):
            if c == 0 and d <= 0:
                continue
            if math.gcd(c, d) != 1:
                continue
            for a in range(-R, R + 1):
                # b is determined by ad - bc = 1
                if c == 0:
                    if a * d != 1:
                        continue
                    bs = range(-R, R + 1)
                else:
                    if (a * d - 1) % c:
                        continue
                    bs = [(a * d - 1) // c]
                for b in bs:
                    P2 = (c * (x * x - y * y) + (d - a) * x - b) ** 2 + (2 * c * x * y + (d - a) * y) ** 2
                    if P2 / (y * y) + 2 <= X:
                        out.append((a, b, c, d))
    out.sort(key=lambda g: (g[2], g[3], g[0], g[1]))
    return out
