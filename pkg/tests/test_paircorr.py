from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissonian import paircorr as pc
from poissonian import setcore as sc0


def brute_count(values, alpha: Fraction, s):
    N = len(values)
    return sum(
        1 for a in values for b in values if a != b and pc.norm_dist(alpha * (a - b)) * N <= s
    )


rationals = st.builds(Fraction, st.integers(0, 10**6), st.integers(1, 10**6))
scales = st.builds(Fraction, st.integers(1, 40), st.integers(1, 8))
sets = st.builds(
    lambda X, vals: sc0.make_set([v for v in vals if v <= X], X),
    st.integers(2, 300),
    st.lists(st.integers(1, 300), min_size=2, max_size=60),
).filter(lambda A: A.N >= 2)


class TestAlpha:
    @pytest.mark.parametrize("x,d", [(0.75, 0.25), (Fraction(7, 3), Fraction(1, 3)), (Fraction(1, 2), Fraction(1, 2))])
    def test_norm_dist(self, x, d):
        assert pc.norm_dist(x) == d

    def test_parse(self):
        assert pc.AlphaValue.parse("7/3").value == Fraction(1, 3)
        assert not pc.AlphaValue.parse("0.25").is_rational
        assert pc.AlphaValue.parse("2").value == 0

    def test_window_width_exact_boundary(self):
        # ||n p/q|| <= s/N  <=>  dist(p n mod q) <= W
        assert pc.window_width(8, 1, 4) == 2
        assert pc.window_width(9, 1, 4) == 2


class TestPairCorr:
    def test_four_half(self):
        cv = pc.pair_corr_direct(sc0.make_set([1, 2, 3, 4], 4), Fraction(1, 2), 1)
        assert cv.count == 4 and cv.F == 1

    def test_alpha_zero(self):
        assert pc.pair_corr_direct(sc0.make_set([1, 2, 3, 4], 4), Fraction(0), 1).F == 3

    def test_ten_half(self):
        cv = pc.pair_corr_direct(sc0.gallery("interval", 10), Fraction(1, 2), 1)
        assert cv.count == 40 and cv.F == 4

    def test_via_r_examples(self):
        rep = sc0.diff_rep(sc0.make_set([1, 2, 3, 4], 4))
        assert pc.pair_corr_via_r(rep, Fraction(1, 2), 1).F == 1
        rep3 = sc0.diff_rep(sc0.make_set([1, 2, 3], 3))
        assert pc.pair_corr_via_r(rep3, Fraction(1, 3), 1).F == 2

    def test_degenerate_window(self):
        A = sc0.gallery("squares", 400)
        for s in (Fraction(A.N, 2), A.N, 3 * A.N):
            assert pc.pair_corr_direct(A, Fraction(3, 7), s).F == A.N - 1
            assert pc.pair_corr_via_r(sc0.diff_rep(A), Fraction(3, 7), s).F == A.N - 1

    def test_interval_half_closed_form(self):
        for X in range(4, 40):
            A = sc0.gallery("interval", X)
            expected = Fraction(2 * sum(X - n for n in range(2, X, 2)), X)
            assert pc.pair_corr_direct(A, Fraction(1, 2), 1).F == expected

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            pc.pair_corr_direct(sc0.make_set([3], 3), Fraction(1, 2), 1)

    def test_huge_denominator(self):
        A = sc0.gallery("squares", 2000)
        al = Fraction(2**70 + 1, 2**71)
        assert pc.pair_corr_direct(A, al, 1).count == brute_count(list(A), al, 1)
        assert pc.pair_corr_via_r(sc0.diff_rep(A), al, 1).count == brute_count(list(A), al, 1)

    @settings(max_examples=150, deadline=None)
    @given(sets, rationals, scales)
    def test_direct_equals_via_r_and_brute(self, A, al, s):
        d = pc.pair_corr_direct(A, al, s).count
        assert d == pc.pair_corr_via_r(sc0.diff_rep(A), al, s).count
        if A.N <= 25:
            assert d == brute_count(list(A), al % 1, s)

    @settings(max_examples=60, deadline=None)
    @given(sets, rationals)
    def test_monotone_in_s(self, A, al):
        counts = [pc.pair_corr_direct(A, al, Fraction(k, 3)).count for k in range(1, 30)]
        assert counts == sorted(counts)

    def test_float_path_close_to_exact(self):
        A = sc0.gallery("squares", 10**4)
        al = Fraction(123456789, 2**31)
        assert pc.pair_corr_direct(A, float(al), 1).count == pc.pair_corr_direct(A, al, 1).count

    def test_mean_exact(self):
        assert pc.mean_F_exact(10, 1) == Fraction(9, 5)


class TestScan:
    def test_rational_rows(self):
        rows = pc.corr_scan("squares", Fraction(239, 169), 1, [100, 1000, 10000])
        assert [r.N for r in rows] == [10, 31, 100]
        assert all(isinstance(r.F, Fraction) for r in rows)
        assert rows[-1].csv() == "10000,100,180,9/5,1/5"

    def test_float_rows(self):
        rows = pc.corr_scan("squares", 2**0.5 - 1, 1, [2**k for k in range(10, 13)])
        assert all(isinstance(r.F, float) for r in rows)

    def test_grid_must_increase(self):
        with pytest.raises(ValueError):
            pc.corr_scan("squares", Fraction(1, 3), 1, [100, 100])


class TestSandwich:
    def test_subsequence_values(self):
        # floor(2^(j^0.9)) for j = 1..5
        assert [pc.sandwich_N(j, 0.1) for j in range(1, 6)] == [2, 3, 6, 11, 19]

    def test_ratio_tends_to_one_slowly(self):
        r = pc.sandwich_N(101, 0.1) / pc.sandwich_N(100, 0.1)
        assert 1.4 < r < 1.6

    def test_interval_half(self):
        big = sc0.gallery("interval", 3000)
        sched = pc.sandwich_schedule("interval", 0.1, 12)
        rng = np.random.default_rng(5)
        hi = sched.rows[-1][2]
        for X in rng.integers(2, hi, 100).tolist():
            assert pc.check_sandwich(big, sched, Fraction(1, 2), 1, X).ok

    def test_schedule_from_set_matches_gallery(self):
        big = sc0.gallery("squares", 10**6)
        a = pc.sandwich_schedule(big, 0.1, 10)
        b = pc.sandwich_schedule("squares", 0.1, 10)
        assert a == b
