import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hypercircle.exceptions import DomainError, ResourceCapError
from hypercircle.moebius import (
    IDENTITY, GroupElement, HPoint, S, T, apply, ball_stats, brute_force_ball,
    compose, cosh_distance, count_many, count_N, count_nonhyperbolic,
    count_trace_class, enumerate_ball, enumerate_ball_array, enumerate_trace_class,
    point_pair_u, predicted_size,
)

from strategies import group_elements, hpoints

I = HPoint(Fraction(0), Fraction(1))


def _naive_count(z, X):
    """Independent float-free check: loop over a box and test 4u + 2 <= X."""
    X = Fraction(X)
    R = int(4 * X / z.y + 4 * abs(z.x) + 8)
    seen = set()
    for c in range(0, R + 1):
        for d in range(-R, R + 1):
            for a in range(-R, R + 1):
                if c == 0:
                    if a * d != 1:
                        continue
                    b_range = range(-R, R + 1)
                else:
                    if (a * d - 1) % c:
                        continue
                    b_range = [(a * d - 1) // c]
                for b in b_range:
                    g = GroupElement(a, b, c, d)
                    if 4 * point_pair_u(apply(g, z), z) + 2 <= X:
                        seen.add(g.normalized().as_tuple())
    return len(seen)


class TestGroup:
    def test_compose_examples(self):
        g = GroupElement(2, 1, 1, 1)
        assert compose(IDENTITY, g) == g
        assert compose(S, S) == GroupElement(-1, 0, 0, -1)
        assert compose(S, S).psl_equal(IDENTITY)
        assert compose(T, T) == GroupElement(1, 2, 0, 1)

    def test_bad_determinant(self):
        with pytest.raises(DomainError):
            GroupElement(1, 1, 1, 1)

    def test_large_entries_do_not_overflow(self):
        g = GroupElement(1, 0, 0, 1)
        for _ in range(200):
            g = compose(g, compose(T, S))
            g = compose(g, T)
        assert g.a * g.d - g.b * g.c == 1

    @given(group_elements(), group_elements())
    def test_det_preserved(self, g, h):
        p = compose(g, h)
        assert p.a * p.d - p.b * p.c == 1

    @given(group_elements(), group_elements(), hpoints())
    def test_action_law(self, g, h, z):
        assert apply(compose(g, h), z) == apply(g, apply(h, z))

    def test_normalized(self):
        g = GroupElement(-1, -1, 0, -1).normalized()
        assert (g.c, g.d) == (0, 1)


class TestPointPair:
    def test_apply_examples(self):
        assert apply(S, I) == I
        assert apply(T, I) == HPoint(Fraction(1), Fraction(1))
        assert apply(GroupElement(2, 1, 1, 1), I) == HPoint(Fraction(3, 2), Fraction(1, 2))

    def test_u_examples(self):
        assert point_pair_u(I, I) == 0
        assert point_pair_u(I, HPoint(0, 2)) == Fraction(1, 8)

    def test_cosh_against_axis_distance(self):
        # along the imaginary axis the distance is |log(y1 / y2)|
        z, w = HPoint(0, 1), HPoint(0, 5)
        assert cosh_distance(z, w) == pytest.approx(math.cosh(math.log(5)), rel=1e-14)
        assert 1 + 2 * point_pair_u(z, w) == Fraction(13, 5)

    @given(hpoints(), hpoints(), group_elements())
    def test_u_symmetric_invariant(self, z, w, g):
        assert point_pair_u(z, w) == point_pair_u(w, z)
        assert point_pair_u(apply(g, z), apply(g, w)) == point_pair_u(z, w)


class TestBall:
    def test_small_examples(self):
        ball = enumerate_ball(I, 2)
        assert len(ball) == 2
        assert {e.element.normalized().as_tuple() for e in ball} == {(1, 0, 0, 1), (0, -1, 1, 0)}
        assert count_N(I, 2) == 2
        assert count_nonhyperbolic(I, 2) == 2

    def test_translations_at_three(self):
        # T and T^-1 have 4u + 2 = 3 exactly
        ball = {e.element.as_tuple() for e in enumerate_ball(I, 3)}
        assert (1, 1, 0, 1) in ball and (1, -1, 0, 1) in ball
        assert count_N(I, 3) == _naive_count(I, 3) == 10

    def test_below_two_empty(self):
        assert enumerate_ball(I, Fraction(19, 10)) == []
        assert count_N(I, 1) == 0

    @pytest.mark.parametrize("X", [2, 3, Fraction(7, 2), 6, Fraction(21, 2)])
    def test_against_naive(self, points, X):
        for z in points[:3]:
            assert count_N(z, X) == _naive_count(z, X)

    @pytest.mark.parametrize("X", [2, 3, 7, Fraction(29, 2), 30, 50])
    def test_against_box_oracle(self, points, X):
        for z in points:
            fast = [e.element.as_tuple() for e in enumerate_ball(z, X)]
            assert fast == brute_force_ball(z, X)

    def test_entries_exact(self, points):
        for z in points:
            for e in enumerate_ball(z, 40):
                assert e.u_value == point_pair_u(apply(e.element, z), z)
                assert 4 * e.u_value + 2 <= 40
                assert e.trace == abs(e.element.a + e.element.d)

    def test_sort_order_and_normalization(self, points):
        ents = enumerate_ball(points[1], 60)
        keys = [(e.element.c, e.element.d, e.element.a, e.element.b) for e in ents]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)
        for e in ents:
            g = e.element
            assert g.c > 0 or (g.c == 0 and g.d > 0)

    def test_python_path_agrees(self, points):
        for z in points:
            a = enumerate_ball(z, 80)
            b = enumerate_ball(z, 80, force_python=True)
            assert a == b
            assert count_many(z, [10, 80], force_python=True) == count_many(z, [10, 80])

    def test_workers_identical(self):
        z = HPoint(Fraction(1, 4), Fraction(3, 2))
        a = enumerate_ball_array(z, 20000, workers=1)
        b = enumerate_ball_array(z, 20000, workers=4)
        assert (a == b).all()
        assert count_many(z, [5000, 20000], workers=3) == count_many(z, [5000, 20000])

    def test_main_term(self):
        for X in (10**5,):
            assert abs(count_N(I, X) / (3 * X) - 1) < 0.03

    @given(group_elements(max_len=6))
    def test_conjugate_point_same_count(self, g):
        z = HPoint(Fraction(1, 5), Fraction(4, 3))
        assert count_N(apply(g, z), 200) == count_N(z, 200)

    def test_cap(self):
        with pytest.raises(ResourceCapError) as exc:
            count_N(I, 10**6, cap=1000)
        assert exc.value.predicted == predicted_size(10**6)
        assert count_N(I, 100, cap=0) == count_N(I, 100)

    def test_count_many_order(self):
        Xs = [1000, 10, 100, 1]
        assert count_many(I, Xs) == [count_N(I, X) for X in Xs]


class TestTraceClasses:
    def test_lower_bound(self):
        assert enumerate_trace_class(I, 3, 1) == []
        els = enumerate_trace_class(I, 3, 3)
        assert els
        for g in els:
            assert g.trace == 3
            assert point_pair_u(apply(g, I), I) >= Fraction(5, 4)

    def test_domain(self):
        with pytest.raises(DomainError):
            enumerate_trace_class(I, 2, 10)

    def test_matches_filtered_ball(self, points):
        for z in points[:3]:
            U = Fraction(30)
            ball = [e for e in enumerate_ball(z, 4 * U + 2) if e.trace == 5]
            got = sorted(g.as_tuple() for g in enumerate_trace_class(z, 5, U))
            want = []
            for e in ball:
                g = e.element
                if g.a + g.d < 0:
                    g = g.neg()
                want.append(g.as_tuple())
            assert got == sorted(want)
            assert count_trace_class(z, 5, U) == len(got)

    @pytest.mark.parametrize("X", [10, 57, 400, Fraction(2001, 2)])
    def test_partition(self, points, X):
        for z in points[:3]:
            U = (Fraction(X) - 2) / 4
            tmax = math.isqrt(int(4 * U + 4)) + 2
            hyp = sum(count_trace_class(z, t, U) for t in range(3, tmax + 1))
            assert count_nonhyperbolic(z, X) + hyp == count_N(z, X)

    def test_stats_hist_consistent(self):
        z = HPoint(Fraction(1, 4), Fraction(3, 2))
        st_ = ball_stats(z, [300, 50], tmax=40)
        assert list(st_["total"]) == count_many(z, [300, 50])
        for k, X in enumerate([300, 50]):
            assert st_["hist"][k].sum() + st_["nonhyp"][k] == st_["total"][k]
