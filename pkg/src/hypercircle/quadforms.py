"""Integral binary quadratic forms AX^2 + BXY + CY^2.

Indefinite forms are reduced with the operator

    rho(A, B, C) = (C, B', (B'^2 - D) / (4C)),   B' = -B + 2Cs,

which is the substitution by (0, -1; 1, s).  A form is reduced when
0 < B < sqrt(D) and |sqrt(D) - 2|A|| < B.  Every reduced form lies on a
finite rho-cycle, and two forms are SL2(Z)-equivalent exactly when their
cycles coincide; the lexicographically least member of the cycle is used as
a canonical anchor.

All comparisons against sqrt(D) are made in integers using isqrt, which is
exact because D is never a perfect square here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .exceptions import DomainError
from .moebius import GroupElement, IDENTITY, compose

PELL_BRUTE_LIMIT = 10**6


@dataclass(frozen=True, order=True)
class BinaryQF:
    A: int
    B: int
    C: int

    def __post_init__(self):
        for name in "ABC":
            v = getattr(self, name)
            if not isinstance(v, int):
                object.__setattr__(self, name, int(v))

    def __call__(self, x, y):
        return self.A * x * x + self.B * x * y + self.C * y * y

    def as_tuple(self):
        return (self.A, self.B, self.C)

    @property
    def disc(self) -> int:
        return self.B * self.B - 4 * self.A * self.C

    @property
    def content(self) -> int:
        return math.gcd(self.A, self.B, self.C)

    def primitive(self) -> "BinaryQF":
        g = self.content
        return BinaryQF(self.A // g, self.B // g, self.C // g)

    def scale(self, k: int) -> "BinaryQF":
        return BinaryQF(k * self.A, k * self.B, k * self.C)

    def l1(self) -> int:
        return abs(self.A) + abs(self.B) + abs(self.C)


@dataclass(frozen=True)
class FormCycle:
    forms: tuple
    anchor: BinaryQF

    @property
    def disc(self) -> int:
        return self.anchor.disc

    def __len__(self):
        return len(self.forms)


@dataclass(frozen=True)
class Automorph:
    generator: GroupElement
    pell_t: int
    pell_u: int
    norm_log: float


def discriminant(Q: BinaryQF) -> int:
    return Q.disc


def act(Q: BinaryQF, tau: GroupElement) -> BinaryQF:
    """Q^tau(X, Y) = Q(aX + bY, cX + dY)."""
    a, b, c, d = tau.a, tau.b, tau.c, tau.d
    A, B, C = Q.A, Q.B, Q.C
    return BinaryQF(
        A * a * a + B * a * c + C * c * c,
        2 * A * a * b + B * (a * d + b * c) + 2 * C * c * d,
        A * b * b + B * b * d + C * d * d,
    )


def gamma_to_form(g: GroupElement) -> BinaryQF:
    """Q_g = c X^2 + (d - a) XY - b Y^2, whose roots are the fixed points of g."""
    return BinaryQF(g.c, g.d - g.a, -g.b)


def form_to_gamma(Q: BinaryQF, t: int) -> GroupElement:
    """The unique g of trace t with Q_g = Q."""
    if t <= 2:
        raise DomainError("form_to_gamma needs t > 2")
    if Q.disc != t * t - 4:
        raise DomainError(f"disc {Q.disc} != t^2 - 4 = {t * t - 4}")
    if (t - Q.B) % 2:
        raise DomainError("parity of t and B incompatible")
    return GroupElement((t - Q.B) // 2, -Q.C, Q.A, (t + Q.B) // 2)


def _check_indefinite(D: int):
    if D <= 0:
        raise DomainError(f"discriminant {D} is not positive")
    r = math.isqrt(D)
    if r * r == D:
        raise DomainError(f"discriminant {D} is a perfect square")
    return r


def is_reduced(Q: BinaryQF, s: int | None = None) -> bool:
    s = math.isqrt(Q.disc) if s is None else s
    a2 = 2 * abs(Q.A)
    return 0 < Q.B <= s and a2 + Q.B > s and a2 - Q.B <= s


def rho_step(Q: BinaryQF, s: int):
    """One reduction step; returns (Q', tau) with act(Q, tau) = Q'."""
    C = Q.C
    if C == 0:
        raise DomainError("rho step undefined for C = 0 (square discriminant)")
    m = 2 * abs(C)
    if abs(C) > s:
        r = abs(C) - ((abs(C) + Q.B) % m)
    else:
        r = s - ((s + Q.B) % m)
    # r = -B + 2 C k for the integer k below
    k = (r + Q.B) // (2 * C)
    tau = GroupElement(0, -1, 1, k)
    return act(Q, tau), tau


def reduce_form(Q: BinaryQF):
    """Reduced form equivalent to Q together with M such that act(Q, M) is it."""
    s = _check_indefinite(Q.disc)
    M = IDENTITY
    while not is_reduced(Q, s):
        Q, tau = rho_step(Q, s)
        M = compose(M, tau)
    return Q, M


def _cycle_from_reduced(R: BinaryQF, s: int):
    forms = [R]
    mats = [IDENTITY]
    Q, M = R, IDENTITY
    while True:
        Q, tau = rho_step(Q, s)
        M = compose(M, tau)
        if Q == R:
            return forms, mats, M
        forms.append(Q)
        mats.append(M)


def reduce_cycle(Q: BinaryQF) -> FormCycle:
    R, _ = reduce_form(Q)
    forms, _, _ = _cycle_from_reduced(R, math.isqrt(R.disc))
    return FormCycle(tuple(forms), min(forms))


def to_anchor(Q: BinaryQF):
    """(anchor, M) with act(Q, M) = anchor of Q's cycle."""
    R, M = reduce_form(Q)
    forms, mats, _ = _cycle_from_reduced(R, math.isqrt(R.disc))
    i = min(range(len(forms)), key=lambda j: forms[j])
    return forms[i], compose(M, mats[i])


def anchor(Q: BinaryQF) -> BinaryQF:
    return to_anchor(Q)[0]


def equivalent(Q1: BinaryQF, Q2: BinaryQF) -> bool:
    return Q1.disc == Q2.disc and anchor(Q1) == anchor(Q2)


def _check_class_disc(D: int):
    s = _check_indefinite(D)
    if D % 4 not in (0, 1):
        raise DomainError(f"no forms of discriminant {D} (need D = 0, 1 mod 4)")
    return s


def reduced_forms(D: int) -> list[BinaryQF]:
    """Every reduced form of discriminant D (primitive or not)."""
    s = _check_class_disc(D)
    out = []
    for B in range(D % 2 or 2, s + 1, 2):
        N = (D - B * B) // 4  # = -AC > 0
        for a in range(1, N + 1):
            if a * a > N:
                break
            if N % a:
                continue
            for A in {a, N // a}:
                for sA in (A, -A):
                    F = BinaryQF(sA, B, -N // sA)
                    if is_reduced(F, s):
                        out.append(F)
    return sorted(set(out))


@lru_cache(maxsize=None)
def _class_list(D: int) -> tuple:
    s = _check_class_disc(D)
    seen = set()
    anchors = []
    for F in reduced_forms(D):
        if F in seen:
            continue
        forms, _, _ = _cycle_from_reduced(F, s)
        seen.update(forms)
        anchors.append(min(forms))
    return tuple(sorted(anchors))


def class_list(D: int) -> list[BinaryQF]:
    """One anchor per SL2(Z) class of forms of discriminant D, sorted."""
    return list(_class_list(D))


def _pell_brute(D: int, limit: int):
    for u in range(1, limit + 1):
        v = D * u * u + 4
        t = math.isqrt(v)
        if t * t == v:
            return t, u
    return None


def _pell_cycle(D: int):
    # the product of rho steps once around the principal cycle is a
    # nontrivial automorph of the principal form; it generates the stabilizer
    s = _check_indefinite(D)
    B0 = D % 2
    P = BinaryQF(1, B0, (B0 - D) // 4)
    R, _ = reduce_form(P)
    _, _, M = _cycle_from_reduced(R, s)
    t = abs(M.trace)
    u = abs(M.c) // abs(R.A)
    return t, u


@lru_cache(maxsize=None)
def _pell(D: int, limit: int):
    _check_indefinite(D)
    hit = _pell_brute(D, limit)
    if hit is not None:
        return hit
    return _pell_cycle(D)


def pell_fundamental(D: int, *, brute_limit: int = PELL_BRUTE_LIMIT):
    """Least (t, u), u >= 1, with t^2 - D u^2 = 4."""
    return _pell(D, brute_limit)


def automorph(Q: BinaryQF) -> Automorph:
    """Generator of the stabilizer of Q, built on the primitive part."""
    D = Q.disc
    _check_indefinite(D)
    P = Q.primitive()
    t, u = pell_fundamental(P.disc)
    g = GroupElement((t - P.B * u) // 2, -P.C * u, P.A * u, (t + P.B * u) // 2)
    eps = (t + u * math.sqrt(P.disc)) / 2
    return Automorph(g, t, u, 2.0 * math.log(eps))


def norm_log(Q: BinaryQF) -> float:
    return automorph(Q).norm_log
