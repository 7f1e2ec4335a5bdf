"""Error scans of N(z, X) - 3X over a rational grid and power-law fits.

The grid statistic for each X is sqrt(sum_k w_k err_k^2), with w_k the
hyperbolic area of the k-th cell (cell area / y_k^2 at its midpoint).  All
integer counts are exact; float aggregates use math.fsum so the result does
not depend on evaluation order or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .. import moebius
from ..exceptions import DomainError
from ..moebius import HPoint, as_fraction

DEFAULT_X = (10**3, 3 * 10**3, 10**4, 3 * 10**4, 10**5, 3 * 10**5, 10**6)


@dataclass(frozen=True)
class OmegaSpec:
    """Rectangle [x0, x1] x [y0, y1] inside the fundamental domain, n x m grid."""

    x0: Fraction = Fraction(-1, 4)
    x1: Fraction = Fraction(1, 4)
    y0: Fraction = Fraction(11, 10)
    y1: Fraction = Fraction(2)
    nx: int = 16
    ny: int = 16

    def __post_init__(self):
        for k in ("x0", "x1", "y0", "y1"):
            object.__setattr__(self, k, as_fraction(getattr(self, k)))
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise DomainError("empty rectangle")
        if self.nx < 1 or self.ny < 1:
            raise DomainError("grid sizes must be positive")
        # compact inside the domain: |x| <= 1/2 and the lower corners above |z| = 1
        if max(abs(self.x0), abs(self.x1)) > Fraction(1, 2):
            raise DomainError("rectangle leaves the strip |x| <= 1/2")
        if max(self.x0 ** 2, self.x1 ** 2) + self.y0 ** 2 <= 1:
            raise DomainError("rectangle meets the unit circle")

    def points(self) -> list[tuple[HPoint, float]]:
        """Cell midpoints with their hyperbolic cell weights, row-major in (x, y)."""
        hx = (self.x1 - self.x0) / self.nx
        hy = (self.y1 - self.y0) / self.ny
        out = []
        for i in range(self.nx):
            for j in range(self.ny):
                x = self.x0 + (2 * i + 1) * hx / 2
                y = self.y0 + (2 * j + 1) * hy / 2
                out.append((HPoint(x, y), float(hx * hy / (y * y))))
        return out


@dataclass(frozen=True)
class ScanRow:
    z: HPoint
    X: Fraction
    N: int
    err: Fraction
    weight: float = 1.0
    nonhyp: int | None = None


@dataclass
class ScanResult:
    rows: list
    X_values: tuple
    l2: dict = field(default_factory=dict)
    nonhyp_mean: dict = field(default_factory=dict)


def l2_statistic(rows: Iterable[ScanRow]) -> dict:
    """X -> sqrt(sum of weight * err^2) over the rows at that X."""
    acc: dict = {}
    for r in rows:
        acc.setdefault(r.X, []).append(r.weight * float(r.err) ** 2)
    return {X: math.sqrt(math.fsum(v)) for X, v in sorted(acc.items())}


def _scan_point(z: HPoint, Xs, cap, with_nonhyp):
    if with_nonhyp:
        st = moebius.ball_stats(z, Xs, tmax=2, cap=cap)
        return [int(v) for v in st["total"]], [int(v) for v in st["nonhyp"]]
    return moebius.count_many(z, Xs, cap=cap), None


def error_scan(omega: OmegaSpec | None = None, X_values: Sequence = DEFAULT_X, *,
               workers: int = 1, cap=None, with_nonhyp: bool = True,
               points: Sequence[tuple[HPoint, float]] | None = None) -> ScanResult:
    """Exact N(z, X) at every grid point for every X; rows are ordered (point, X)."""
    Xs = tuple(as_fraction(X) for X in X_values)
    if not Xs:
        raise DomainError("no X values")
    pts = list(points) if points is not None else (omega or OmegaSpec()).points()
    job = lambda zw: _scan_point(zw[0], Xs, cap, with_nonhyp)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, pts))
    else:
        results = [job(p) for p in pts]
    rows = []
    for (z, w), (counts, nh) in zip(pts, results):
        for k, X in enumerate(Xs):
            rows.append(ScanRow(z, X, counts[k], counts[k] - 3 * X, w,
                                None if nh is None else nh[k]))
    res = ScanResult(rows, Xs, l2_statistic(rows))
    if with_nonhyp:
        wsum = math.fsum(w for _, w in pts)
        for X in Xs:
            res.nonhyp_mean[X] = math.fsum(r.weight * r.nonhyp for r in rows if r.X == X) / wsum
    return res


@dataclass(frozen=True)
class PowerFit:
    slope: float
    stderr: float
    intercept: float
    n: int


def fit_power(xs: Sequence[float], ys: Sequence[float]) -> PowerFit:
    """Least-squares slope of log y on log x; needs 4 distinct x over 2 decades."""
    pairs = sorted((float(x), float(y)) for x, y in zip(xs, ys) if float(y) > 0)
    xs_ = sorted({p[0] for p in pairs})
    if len(xs_) < 4:
        raise DomainError("need at least 4 distinct X values with nonzero statistic")
    if math.log10(xs_[-1] / xs_[0]) < 2 - 1e-12:
        raise DomainError("X values must span at least 2 decades")
    lx = np.log([p[0] for p in pairs])
    ly = np.log([p[1] for p in pairs])
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    n = len(lx)
    resid = ly - A @ coef
    dof = n - 2
    s2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = s2 * np.linalg.inv(A.T @ A)
    return PowerFit(float(coef[0]), math.sqrt(max(cov[0, 0], 0.0)), float(coef[1]), n)


def exponent_fit(rows: Iterable[ScanRow]) -> tuple[float, float]:
    """(slope, stderr) of the L2 statistic against X; zero-error rows are dropped."""
    rows = [r for r in rows if r.err != 0]
    stat = l2_statistic(rows)
    fit = fit_power(list(stat.keys()), list(stat.values()))
    return fit.slope, fit.stderr


def nonhyperbolic_fit(result: ScanResult) -> tuple[float, float]:
    if not result.nonhyp_mean:
        raise DomainError("scan was run without nonhyperbolic counts")
    fit = fit_power(list(result.nonhyp_mean.keys()), list(result.nonhyp_mean.values()))
    return fit.slope, fit.stderr
