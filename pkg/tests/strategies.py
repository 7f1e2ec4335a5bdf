"""Shared hypothesis strategies."""

import math
from fractions import Fraction

from hypothesis import strategies as st

from hypercircle.moebius import GroupElement, HPoint, S, T, compose


@st.composite
def group_elements(draw, max_len=8):
    word = draw(st.lists(st.sampled_from(["S", "T", "t"]), max_size=max_len))
    g = GroupElement(1, 0, 0, 1)
    for w in word:
        g = compose(g, {"S": S, "T": T, "t": T.inverse()}[w])
    return g


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=12)
positive_rationals = st.fractions(min_value=Fraction(1, 10), max_value=4, max_denominator=12)


@st.composite
def hpoints(draw):
    return HPoint(draw(rationals), draw(positive_rationals))


@st.composite
def forms(draw, lo=-12, hi=12, positive_disc=True):
    from hypercircle.quadforms import BinaryQF

    A = draw(st.integers(lo, hi).filter(lambda v: v != 0))
    B = draw(st.integers(lo, hi))
    C = draw(st.integers(lo, hi))
    q = BinaryQF(A, B, C)
    D = q.disc
    if positive_disc:
        from hypothesis import assume

        assume(D > 0 and math.isqrt(D) ** 2 != D)
    return q
