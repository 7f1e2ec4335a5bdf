import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypercircle.exceptions import DomainError, QuadratureError
from hypercircle.kernels import (
    KernelParams, V, V_quad, bigF, bigF_quad, char_params, eps_sign, f_support_bound,
    half_line_constant_quad, i_char, j_char, j_char_quad, j_fn, j_gt1, j_gt1_quad, j_lt1,
    j_lt1_quad, k_fn, quad, sqrt_product_gap, thresholds, thresholds_AB, thresholds_CD,
    y_pair, z_closed, z_montecarlo, z_quadrature,
)

pos = st.floats(0.05, 12.0)

# single positive constant for the lower gap, fitted on t <= 200 (observed min 0.596)
C0 = 0.5


class TestThresholds:
    def test_examples(self):
        A, B = thresholds_AB(1, 1)
        assert A == pytest.approx(1) and B == pytest.approx(3)
        with pytest.raises(DomainError):
            thresholds_CD(0.5, 1)
        assert thresholds((1, 1, 0.5))[2:] == (None, None)

    @given(pos)
    def test_A_diagonal(self, s):
        assert thresholds_AB(s, s)[0] == pytest.approx(1, rel=1e-12, abs=1e-10)

    @given(pos, pos, st.floats(1.0001, 20))
    def test_claims(self, s0, t0, F):
        # the three sign claims, away from measure-zero ties
        A, B = thresholds_AB(s0, t0)
        w = math.sqrt(F * F - 1) * math.sqrt(1 + s0 * s0) / s0
        c1 = w - abs(t0 / s0 - F)
        c2 = w - (t0 / s0 + F)
        if abs(F - A) > 1e-9 and abs(c1) > 1e-9:
            assert (c1 > 0) == (F > A)
        if abs(F - B) > 1e-9 and abs(c2) > 1e-9:
            assert (c2 > 0) == (F > B)
        if abs(t0 / s0 - 1) > 1e-9:
            assert (t0 / s0 > 1) == (t0 / s0 > A)


class TestPrimitives:
    def test_bigF(self):
        assert bigF(1, 0) == 0
        assert bigF(1, 0.5) == pytest.approx(bigF_quad(1, 0.5), abs=1e-10)
        with pytest.raises(DomainError):
            bigF(1, 1.0)

    @given(pos, st.floats(0.0, 0.999))
    def test_bigF_quad(self, s0, y):
        assert bigF(s0, y) == pytest.approx(bigF_quad(s0, y), abs=1e-10, rel=1e-10)

    @given(pos, st.floats(-0.999, 0.999))
    def test_V_quad(self, s0, s):
        assert V(s0, s) == pytest.approx(V_quad(s0, s), abs=1e-10, rel=1e-10)

    def test_V_zero(self):
        assert V(2.0, 0.0) == 0

    @pytest.mark.parametrize("F", [0.0, 0.5, 0.9])
    def test_half_line_constant(self, F):
        assert half_line_constant_quad(F) == pytest.approx(math.pi / 2, abs=1e-10)

    def test_growth_cap_logged(self):
        # S0 F(S0, y) against S0^3 y^3 for y <= 1 / (2 S0)
        ratios = []
        for s0 in (1, 2, 5, 10, 50):
            for y in np.linspace(1e-3, 1 / (2 * s0), 40):
                ratios.append(s0 * bigF(s0, y) / (s0 ** 3 * y ** 3))
        assert max(ratios) < 2.0


class TestJ:
    def test_gt1_example(self):
        p = KernelParams(2, 3, 1.5)
        assert j_gt1(p) == pytest.approx(j_gt1_quad(p), abs=1e-8)

    def test_gt1_empty(self):
        _, B = thresholds_AB(1, 2)
        assert j_gt1((1, 2, B + 0.01)) == 0.0
        assert j_gt1_quad((1, 2, B + 0.01)) == 0.0

    def test_gt1_continuity(self):
        _, B = thresholds_AB(2, 3)
        vals = [j_gt1((2, 3, B - h)) for h in (1e-2, 1e-4, 1e-6, 1e-8)]
        assert all(abs(v) < 1.0 for v in vals)
        assert abs(vals[-1]) < 1e-3 and abs(vals[-1]) <= abs(vals[0])

    @given(pos, pos, st.floats(1.001, 8))
    def test_gt1_against_quad(self, s0, t0, F):
        p = KernelParams(s0, t0, F)
        y1, y2 = y_pair(p)
        assert 0 <= y1 <= 1 and 0 <= y2 <= 1
        assert j_gt1(p) == pytest.approx(j_gt1_quad(p), abs=1e-7, rel=1e-7)

    def test_lt1_example(self):
        p = KernelParams(1, 1, 0.5)
        assert j_lt1(p) == pytest.approx(j_lt1_quad(p), abs=1e-8)

    @given(pos, pos, st.floats(0.0, 0.99))
    def test_lt1_against_quad(self, s0, t0, F):
        p = KernelParams(s0, t0, F)
        assert j_lt1(p) == pytest.approx(j_lt1_quad(p), abs=1e-8, rel=1e-8)

    def test_eps_boundary_uses_zero_branch(self):
        A, _ = thresholds_AB(1, 3)
        assert eps_sign((1, 3, A)) == 0
        assert eps_sign((1, 3, (1 + A) / 2)) == 1
        assert eps_sign((3, 1, (1 + A) / 2)) == -1

    def test_domain(self):
        with pytest.raises(DomainError):
            j_gt1((1, 1, 0.5))
        with pytest.raises(DomainError):
            j_lt1((1, 1, 1.5))
        with pytest.raises(DomainError):
            z_closed((1, 1, 1.0))
        with pytest.raises(DomainError):
            KernelParams(0, 1, 0.5)


class TestZ:
    def test_grid(self):
        vals = [0.3, 1, 3, 6, 10]
        worst = 0.0
        for s0 in vals:
            for t0 in vals:
                for F in (0.3, 0.8, 1.2, 2, 5):
                    a, b = z_closed((s0, t0, F)), z_quadrature((s0, t0, F))
                    worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
        assert worst <= 1e-6

    @given(pos, pos, st.floats(0.01, 6).filter(lambda f: abs(f - 1) > 1e-3))
    def test_symmetric(self, s0, t0, F):
        assert z_closed((s0, t0, F)) == pytest.approx(z_closed((t0, s0, F)), rel=1e-12, abs=1e-12)

    def test_empty_region(self):
        _, B = thresholds_AB(0.3, 0.3)
        assert z_closed((0.3, 0.3, B + 1)) == 0.0
        assert z_quadrature((0.3, 0.3, B + 1)) == 0.0

    def test_montecarlo(self):
        est, se = z_montecarlo((1, 1, 0.5), n=400_000, seed=3)
        assert abs(est - z_quadrature((1, 1, 0.5))) <= 3 * se

    def test_symmetrized_lt1_matches_k(self):
        rng = random.Random(5)
        for _ in range(30):
            s0, t0, F = rng.uniform(0.1, 8), rng.uniform(0.1, 8), rng.uniform(0.01, 0.99)
            lhs = j_lt1((s0, t0, F)) + j_lt1((t0, s0, F))
            rhs = k_fn((s0, t0, F)) + k_fn((t0, s0, F))
            assert lhs == pytest.approx(rhs, abs=1e-8, rel=1e-8)

    def test_K_bound_and_limit(self):
        ratios = [abs(k_fn((s, t, F))) * math.sqrt(1 - F * F) / (s * t)
                  for s in (0.5, 2, 8) for t in (0.5, 2, 8) for F in (0.1, 0.5, 0.95)]
        assert max(ratios) < 10
        assert abs(k_fn((2, 1e-9, 0.5))) < 1e-8


class TestCharacteristic:
    def test_j_char_examples(self):
        # m = 1/2 and m = 4/5
        assert j_char(3, 3, 10, 10) == pytest.approx(2)
        assert j_char(3, 3, 6.25, 6.25) == pytest.approx(1)
        assert j_char(3, 3, 4, 10) == 0
        assert j_char(3, 3, 40, 40) == pytest.approx(j_char_quad(3, 3, 40, 40), abs=1e-8)
        assert j_char(3, 5, 40, 90) == pytest.approx(j_char_quad(3, 5, 40, 90), abs=1e-8)

    def test_i_char(self):
        assert i_char(3, 4, 7, 5, 200) == 0.0
        for f in (1, 7, 30):
            assert i_char(3, 3, f, 100, 100) == i_char(3, 3, -f, 100, 100)
        with pytest.raises(DomainError):
            i_char(3, 3, 5, 100, 100)

    def test_support_cut(self):
        bound = f_support_bound(3, 4, 200, 200)
        f = math.floor(bound) + 1
        assert i_char(3, 4, f, 200, 200) == 0.0
        assert i_char(3, 4, f + 5, 200, 200) == 0.0
        assert i_char(3, 4, math.floor(bound) - 3, 200, 200) > 0

    def test_quad_failure_raises(self):
        with pytest.raises(QuadratureError):
            quad(lambda x: 1 / math.sqrt(abs(x - 0.3)) * math.sin(1 / abs(x - 0.3)), 0, 1,
                 epsabs=1e-14, epsrel=1e-14, limit=5)


class TestGapInequality:
    def test_two_sided(self):
        worst = math.inf
        for t1 in range(3, 201):
            lo = max(3, math.ceil(2 * t1 / 3))
            hi = math.floor(3 * t1 / 2)
            for t2 in range(lo, hi + 1):
                g_low, g_high = sqrt_product_gap(t1, t2)
                assert g_high >= 0
                worst = min(worst, g_low)
        assert worst >= C0 > 0
