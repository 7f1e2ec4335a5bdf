import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypercircle.exceptions import DomainError
from hypercircle.moebius import GroupElement, HPoint, IDENTITY, S, T, compose, enumerate_trace_class
from hypercircle.quadforms import (
    BinaryQF, act, anchor, automorph, class_list, discriminant, equivalent,
    form_to_gamma, gamma_to_form, is_reduced, norm_log, pell_fundamental,
    reduce_cycle, reduce_form, reduced_forms,
)

from strategies import forms, group_elements


NAIVE_CAP = 200_000


def _pell_naive(D):
    """Least u <= NAIVE_CAP with D u^2 + 4 a square, or None."""
    u = np.arange(1, NAIVE_CAP + 1, dtype=np.int64)
    v = D * u * u + 4
    t = np.rint(np.sqrt(v.astype(float))).astype(np.int64)
    hits = np.nonzero(((t - 1) ** 2 == v) | (t * t == v) | ((t + 1) ** 2 == v))[0]
    if hits.size == 0:
        return None
    uu = int(u[hits[0]])
    return math.isqrt(D * uu * uu + 4), uu


def _bfs_classes(D, radius=3):
    """Classes via orbit search: join forms reachable by short generator words."""
    base = reduced_forms(D)
    parent = {q: q for q in base}

    def find(q):
        while parent[q] != q:
            parent[q] = parent[parent[q]]
            q = parent[q]
        return q

    gens = [S, T, T.inverse()]
    for q in base:
        frontier = [q]
        for _ in range(radius * 4):
            nxt = []
            for f in frontier:
                for g in gens:
                    h = act(f, g)
                    if h in parent:
                        parent[find(h)] = find(q)
                    if h.l1() <= 4 * D:
                        nxt.append(h)
            frontier = list(set(nxt))[:4000]
    return len({find(q) for q in base})


class TestBasics:
    def test_disc(self):
        assert discriminant(BinaryQF(1, 1, -1)) == 5
        assert discriminant(BinaryQF(1, 0, 1)) == -4

    def test_act_examples(self):
        q = BinaryQF(1, 0, -1)
        assert act(q, IDENTITY) == q
        assert act(q, S) == BinaryQF(-1, 0, 1)

    @given(forms(positive_disc=False), group_elements(), group_elements())
    def test_action_law(self, q, s, t):
        assert act(q, s).disc == q.disc
        assert act(act(q, s), t) == act(q, compose(s, t))

    def test_gamma_form_examples(self):
        g = GroupElement(2, 1, 1, 1)
        q = gamma_to_form(g)
        assert q == BinaryQF(1, -1, -1) and q.disc == 5
        assert form_to_gamma(q, 3) == g
        with pytest.raises(DomainError):
            form_to_gamma(BinaryQF(1, 0, -1), 3)
        with pytest.raises(DomainError):
            form_to_gamma(BinaryQF(1, 0, -2), 3)

    @given(group_elements(), group_elements())
    def test_conjugation(self, g, tau):
        conj = compose(compose(tau.inverse(), g), tau)
        assert gamma_to_form(conj) == act(gamma_to_form(g), tau)

    @given(group_elements())
    def test_roots_are_fixed_points(self, g):
        # c z^2 + (d - a) z - b = 0 is exactly g z = z after clearing denominators
        q = gamma_to_form(g)
        assert (q.A, q.B, q.C) == (g.c, g.d - g.a, -g.b)
        assert q.disc == g.trace ** 2 - 4

    def test_roundtrip_trace_classes(self):
        z = HPoint(0, 1)
        for t in range(3, 13):
            for g in enumerate_trace_class(z, t, 10 + (t * t - 4) // 4):
                assert form_to_gamma(gamma_to_form(g), t) == g


class TestReduction:
    def test_disc5(self):
        assert anchor(BinaryQF(1, 1, -1)) == anchor(BinaryQF(-1, 1, 1))
        assert len(class_list(5)) == 1
        assert len(reduce_cycle(BinaryQF(1, 1, -1))) == 2

    @pytest.mark.parametrize("D,h", [(5, 1), (8, 1), (12, 2), (13, 1), (21, 2), (60, 4), (85, 2), (229, 3)])
    def test_class_counts(self, D, h):
        assert len(class_list(D)) == h

    @pytest.mark.parametrize("D", [5, 8, 12, 13, 21, 28, 32, 45])
    def test_against_bfs(self, D):
        assert _bfs_classes(D) == len(class_list(D))

    def test_errors(self):
        with pytest.raises(DomainError):
            reduce_cycle(BinaryQF(1, 0, -4))
        with pytest.raises(DomainError):
            reduce_cycle(BinaryQF(1, 0, 1))
        with pytest.raises(DomainError):
            class_list(7)

    @given(forms(), group_elements(max_len=12), group_elements(max_len=12))
    def test_anchor_invariant(self, q, s, t):
        a, b = act(q, s), act(q, t)
        assert anchor(a) == anchor(q) == anchor(b)
        assert equivalent(a, b) and equivalent(b, a)

    @given(forms())
    def test_reduce_form_matrix(self, q):
        R, M = reduce_form(q)
        assert act(q, M) == R and is_reduced(R)
        cyc = reduce_cycle(q)
        assert cyc.anchor in cyc.forms and R in cyc.forms
        assert all(f.disc == q.disc for f in cyc.forms)

    def test_every_form_hits_one_anchor(self):
        rng = random.Random(1)
        D = 60
        anchors = set(class_list(D))
        for _ in range(200):
            while True:
                B = rng.randrange(-40, 41, 2)
                N = (B * B - D) // 4
                divs = [a for a in range(1, abs(N) + 1) if N % a == 0] if N else []
                if divs:
                    break
            A = rng.choice(divs) * rng.choice((1, -1))
            q = BinaryQF(A, B, N // A)
            assert q.disc == D and anchor(q) in anchors

    def test_conjugacy_classes_match(self):
        # classes of Gamma_t under conjugation <-> classes of disc t^2 - 4
        z = HPoint(0, 1)
        for t in range(3, 11):
            D = t * t - 4
            seen = {anchor(gamma_to_form(g)) for g in enumerate_trace_class(z, t, 40 * D)}
            assert seen == set(class_list(D))


class TestPell:
    @pytest.mark.parametrize("D,sol", [(5, (3, 1)), (12, (4, 1)), (8, (6, 2))])
    def test_examples(self, D, sol):
        assert pell_fundamental(D) == sol

    @pytest.mark.parametrize("D", range(5, 400))
    def test_cycle_fallback_matches_brute(self, D):
        if math.isqrt(D) ** 2 == D or D % 4 in (2, 3):
            return
        got = pell_fundamental(D, brute_limit=0)
        want = _pell_naive(D)
        if want is None:
            t, u = got
            assert t * t - D * u * u == 4 and u > NAIVE_CAP
        else:
            assert got == want

    def test_automorph_example(self):
        aut = automorph(BinaryQF(1, 1, -1))
        assert aut.generator == GroupElement(1, 1, 1, 2)
        assert aut.generator.trace == 3
        assert aut.norm_log == pytest.approx(2 * math.log((3 + math.sqrt(5)) / 2), rel=1e-15)
        for n in (1, 2, 3):
            assert act(BinaryQF(1, 1, -1), aut.generator ** n) == BinaryQF(1, 1, -1)

    @given(forms(), group_elements())
    def test_automorph_properties(self, q, tau):
        aut = automorph(q)
        assert act(q, aut.generator) == q
        assert aut.pell_t ** 2 - q.primitive().disc * aut.pell_u ** 2 == 4
        assert aut.norm_log > 0
        assert norm_log(act(q, tau)) == pytest.approx(aut.norm_log, rel=1e-12)

    def test_imprimitive(self):
        q = BinaryQF(2, 2, -2)
        aut = automorph(q)
        assert act(q, aut.generator) == q
        assert aut.norm_log == pytest.approx(norm_log(BinaryQF(1, 1, -1)))

    @pytest.mark.parametrize("D", [5, 12, 21, 32, 45, 60, 77])
    def test_minimality(self, D):
        # no smaller u gives a solution, so no proper root of the generator exists
        t, u = pell_fundamental(D)
        for v in range(1, u):
            s = D * v * v + 4
            assert math.isqrt(s) ** 2 != s
        for Q in class_list(D):
            assert act(Q, automorph(Q).generator) == Q
