"""The inner-product identity for trace-class counting functions.

Left side: the integral over the fundamental domain of M_t1(z) M_t2(z),
where M_t(z) counts g of trace t with 4u(z, gz) <= x.  For t > 2 the lower
left entry of g is nonzero, so 4u >= y^2 and M_t vanishes above y = sqrt(x);
the domain is cut there and integrated by the (x, 1/y) midpoint rule.

Right side: J * E plus the sum over codiscriminants f of h(d1, d2, f) I_f,
computed from class numbers and closed-form kernels only.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .. import kernels, pairs
from ..exceptions import DomainError
from ..moebius import HPoint, as_fraction, enumerate_trace_class
from ._grid_kernels import product_integral, trace_class_count


@dataclass(frozen=True)
class IdentityReport:
    t1: int
    t2: int
    x1: float
    x2: float
    lhs: float
    lhs_error: float
    rhs_E_term: float
    rhs_f_sum: float
    rel_gap: float
    tol: float
    n_grid: int
    f_terms: int

    @property
    def rhs(self) -> float:
        return self.rhs_E_term + self.rhs_f_sum

    @property
    def passed(self) -> bool:
        return self.rel_gap <= self.tol

    def as_dict(self) -> dict:
        out = asdict(self)
        out.update(rhs=self.rhs, passed=self.passed)
        return out


def M_t(z: HPoint, t: int, x) -> int:
    """#{g of trace t : u(z, gz) <= x/4}, exact."""
    if t <= 2:
        raise DomainError("M_t needs t > 2")
    return len(enumerate_trace_class(z, t, as_fraction(x) / 4))


def M_t_float(x: float, y: float, t: int, xbound: float) -> int:
    """Compiled form count used on quadrature grids (floating predicate)."""
    return int(trace_class_count(float(x), float(y), int(t), float(xbound)))


def lhs_integral(t1: int, t2: int, x1: float, x2: float, n: int = 1000):
    """(value, error estimate) of the left side on an n x n grid and its n/2 coarsening."""
    H = math.sqrt(max(x1, x2))
    fine = product_integral(t1, t2, float(x1), float(x2), H, n, n)
    coarse = product_integral(t1, t2, float(x1), float(x2), H, n // 2, n // 2)
    return fine, abs(fine - coarse)


def f_window(t1: int, t2: int, x1: float, x2: float) -> list[int]:
    """Codiscriminants that can contribute: right parity, |f| below the support bound."""
    d1, d2 = t1 * t1 - 4, t2 * t2 - 4
    bound = kernels.f_support_bound(t1, t2, x1, x2)
    if bound <= 0:
        return []
    fmax = math.floor(bound)
    par = (d1 * d2) % 2
    return [f for f in range(-fmax, fmax + 1) if f % 2 == par and f * f != d1 * d2]


def rhs_terms(t1: int, t2: int, x1: float, x2: float, *, extra: int = 0):
    """(E term, f sum, number of f tried); ``extra`` widens the f window on both sides."""
    d1, d2 = t1 * t1 - 4, t2 * t2 - 4
    fs = f_window(t1, t2, x1, x2)
    if extra and fs:
        lo, hi = fs[0], fs[-1]
        fs = list(range(lo - 2 * extra, lo, 2)) + fs + list(range(hi + 2, hi + 2 * extra + 1, 2))
        fs = [f for f in fs if f * f != d1 * d2]
    total = 0.0
    for f in fs:
        h = pairs.class_count_h(d1, d2, f)
        if h:
            total += h * kernels.i_char(t1, t2, f, x1, x2)
    J = kernels.j_char(t1, t2, x1, x2)
    E = J * pairs.E_sum(t1, t2) if J else 0.0
    return E, total, len(fs)


def verify_lemma21(t1: int, t2: int, x1: float, x2: float, tol: float = 0.02, *,
                   n: int = 1000) -> IdentityReport:
    if t1 <= 2 or t2 <= 2:
        raise DomainError("verify_lemma21 needs t1, t2 > 2")
    if n < 4:
        raise DomainError("grid size must be at least 4")
    d1, d2 = t1 * t1 - 4, t2 * t2 - 4
    if x1 <= d1 or x2 <= d2:
        lhs, err = 0.0, 0.0
    else:
        lhs, err = lhs_integral(t1, t2, x1, x2, n)
    E, S, nf = rhs_terms(t1, t2, x1, x2)
    rhs = E + S
    scale = max(abs(lhs), abs(rhs))
    gap = abs(lhs - rhs) / scale if scale else 0.0
    return IdentityReport(t1, t2, float(x1), float(x2), lhs, err, E, S, gap, tol, n, nf)
