"""Quadrature over the standard fundamental domain.

In the coordinates (x, s) with s = 1/y the measure dx dy / y^2 is plain
dx ds, and the domain cut at height H becomes

    -1/2 <= x <= 1/2,   1/H <= s <= 1/sqrt(1 - x^2),

whose area is pi/3 - 1/H.  A product midpoint rule in (x, s) is used; the
integrands met here are piecewise constant, so refinement by doubling and
comparing successive values is the error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import DomainError
from ._grid_kernels import midpoint_nodes


@dataclass(frozen=True)
class DomainSpec:
    truncation_height: float
    nx: int = 200
    nv: int = 200

    def __post_init__(self):
        if self.truncation_height < 1:
            raise DomainError("truncation height must be at least 1")
        if self.nx < 1 or self.nv < 1:
            raise DomainError("grid sizes must be positive")

    def refined(self, k: int = 2) -> "DomainSpec":
        return DomainSpec(self.truncation_height, self.nx * k, self.nv * k)

    def nodes(self):
        """(x, y, weight) arrays; weights are positive and sum to the area."""
        return midpoint_nodes(float(self.truncation_height), self.nx, self.nv)


@dataclass(frozen=True)
class FDResult:
    value: float
    error: float
    converged: bool
    spec: DomainSpec


def truncated_area(H: float) -> float:
    return math.pi / 3 - 1.0 / H


def _apply(f, spec: DomainSpec) -> float:
    xs, ys, ws = spec.nodes()
    vals = np.asarray(f(xs, ys), dtype=float)
    if vals.shape != xs.shape:
        vals = np.broadcast_to(vals, xs.shape)
    return float(np.dot(ws, vals))


def fd_integral(f, spec: DomainSpec, *, rtol: float = 1e-6, atol: float = 1e-12,
                max_refinements: int = 4) -> FDResult:
    """Integrate f(x, y) (vectorized over arrays) against dx dy / y^2.

    Doubles the grid until two successive values agree to rtol; if the cap
    on refinements is reached the last difference is returned flagged.
    """
    prev = _apply(f, spec)
    err = math.inf
    for _ in range(max_refinements):
        spec = spec.refined()
        cur = _apply(f, spec)
        err = abs(cur - prev)
        prev = cur
        if err <= rtol * abs(cur) + atol:
            return FDResult(cur, err, True, spec)
    return FDResult(prev, err, False, spec)
