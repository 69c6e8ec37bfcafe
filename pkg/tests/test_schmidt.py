import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissonian import paircorr as pc
from poissonian import schmidt as sc
from poissonian import setcore as sc0
from poissonian.errors import PreconditionError, ResourceGuardError


def cfg(T=2, s=1, N=4, X=10):
    return sc.SchmidtConfig(T=T, s=Fraction(s), N=N, X=X)


def brute_in_En(alpha: Fraction, n, s, N, T):
    """Open-arc membership over every allowed u <= n, with circular distance."""
    for u in range(1, n + 1):
        if math.gcd(u, n) > T:
            continue
        d = abs((alpha - Fraction(u, n)) % 1)
        d = min(d, 1 - d)
        if d < Fraction(s) / (N * n):
            return True
    return False


class TestPhi:
    @pytest.mark.parametrize("n,T,val", [(6, 2, 4), (12, 100, 12), (13, 1, 12), (7, 1, 6)])
    def test_examples(self, n, T, val):
        assert sc.phi_T_brute(n, T) == sc.phi_T_divisor(n, T) == sc.phi_T(n, T) == val

    def test_all_forms_agree(self):
        for T in (2, 5, 50):
            table = sc.phi_T_table(2000, T)
            for n in range(1, 2001):
                assert table[n] == sc.phi_T_divisor(n, T)
            for n in range(1, 301):
                assert table[n] == sc.phi_T_brute(n, T)

    def test_real_threshold(self):
        assert sc.phi_T(12, 2.9) == sc.phi_T(12, 2)

    def test_moment_x1(self):
        assert sc.phi_moment(1, 5, 1, exact=True) == 0

    def test_moment_exact_and_float_agree(self):
        for order in (1, 2):
            ex = sc.phi_moment(3000, 8, order, exact=True)
            assert abs(float(ex) - sc.phi_moment(3000, 8, order)) < 1e-9 * float(ex)

    def test_moment_audit_ratios(self):
        assert sc.phi_moment_audit(1000, 8, 1, exact=True).ratio <= 2
        assert sc.phi_moment_audit(10**4, 2, 2, exact=True).ratio <= 4

    def test_exact_sum(self):
        assert sc.exact_sum([1, 1, 1], [2, 3, 6]) == 1
        assert sc.exact_sum([], []) == 0


class TestArcs:
    def test_n2(self):
        E = sc.en_arcs(2, cfg())
        assert E.measure == Fraction(1, 2)
        assert E.arcs == [(0, Fraction(1, 8)), (Fraction(3, 8), Fraction(1, 4)), (Fraction(7, 8), Fraction(1, 8))]

    def test_n1(self):
        assert sc.en_arcs(1, cfg(T=5)).measure == Fraction(1, 2)

    def test_full_cover(self):
        assert sc.en_arcs(5, cfg(T=5, s=3, N=4)).measure == 1

    def test_formula_examples(self):
        assert sc.en_measure_formula(2, cfg()) == Fraction(1, 2)
        assert sc.en_measure_formula(6, cfg(T=2, N=100)) == Fraction(1, 75)

    def test_formula_matches_measure_when_N_ge_2s(self):
        for s in (Fraction(1, 2), 1, 3):
            c = cfg(T=3, s=s, N=7)
            for n in range(1, 80):
                assert sc.en_arcs(n, c).measure == sc.en_measure_formula(n, c)

    def test_endpoints_not_members(self):
        E = sc.en_arcs(2, cfg())
        assert not E.contains(Fraction(3, 8)) and E.contains(Fraction(1, 2))


class TestOverlap:
    def test_examples(self):
        assert sc.overlap_count(6, 6, 6) == sc.phi_T(6, 6) == 6
        assert sc.overlap_count(4, 2, 4) == 2
        assert sc.overlap_count(7, 5, 2) == 0

    def test_implementations_agree(self):
        for T in (2, 10, 100):
            for n in range(1, 121):
                for m in range(1, 121):
                    assert sc.overlap_count(n, m, T) == sc.overlap_count_brute(n, m, T)

    @settings(max_examples=300, deadline=None)
    @given(st.integers(1, 500), st.integers(1, 500), st.integers(2, 60))
    def test_gcd_bounds(self, n, m, T):
        a = sc.overlap_count(n, m, T)
        g = math.gcd(n, m)
        assert a == sc.overlap_count(m, n, T)
        assert a <= g
        if a:
            assert max(m, n) // g <= T

    def test_measure_example(self):
        a = sc.overlap_measure_audit(3, 2, cfg(T=3, N=8))
        assert a.lhs == Fraction(1, 12) and a.rhs_shape == Fraction(7, 48)

    def test_diagonal(self):
        c = cfg(T=3, N=9)
        for n in range(1, 30):
            a = sc.overlap_measure_audit(n, n, c)
            assert a.lhs == sc.en_arcs(n, c).measure <= a.rhs_shape

    def test_sweep_small(self):
        rows = sc.overlap_sweep(40, [Fraction(1, 2), 1, 3], 1000, [2, 10])
        assert len(rows) == 6 * 40 * 41 // 2
        assert all(lhs <= rhs for _, lhs, rhs in rows)

    def test_sweep_matches_single_audit(self):
        c = cfg(T=2, s=1, N=1000)
        rows = {p[:2]: (l, r) for p, l, r in sc.overlap_sweep(12, [1], 1000, [2])}
        for n, m in [(12, 8), (9, 6), (7, 1)]:
            a = sc.overlap_measure_audit(n, m, c)
            assert rows[(n, m)] == (a.lhs, a.rhs_shape)


class TestAvgOverlap:
    def test_X2(self):
        hand = sc.overlap_count(1, 1, 2) + Fraction(sc.overlap_count(1, 2, 2), 2) + Fraction(sc.overlap_count(2, 2, 2), 2)
        assert sc.avg_overlap_sum(2, 2) == hand

    def test_ratio(self):
        assert sc.avg_overlap_audit(1000, 8).ratio <= 2

    def test_guard(self):
        with pytest.raises(ResourceGuardError):
            sc.avg_overlap_sum(10**4 + 1, 2)


class TestFStar:
    def test_example(self):
        A = sc0.make_set([1, 2, 3, 4], 4)
        c = sc.SchmidtConfig.for_set(A, 2)
        assert sc.f_star(A, Fraction(1, 2), c).F == 1

    def test_T_large_equals_F_at_generic_alpha(self):
        A = sc0.gallery("squares", 2000)
        c = sc.SchmidtConfig.for_set(A, 2000)
        al = Fraction(1234567, 2**31)
        assert sc.f_star(A, al, c).count == pc.pair_corr_direct(A, al, 1).count

    def test_tiny_s(self):
        A = sc0.gallery("interval", 50)
        # alpha = k/2^31 with k odd is no u/n for n <= 50, and is >= 1/(n 2^31) away from each
        c = sc.SchmidtConfig(T=2, s=Fraction(1, 10**12), N=A.N, X=A.X)
        assert sc.f_star(A, Fraction(123456789, 2**31), c).count == 0

    def test_membership_matches_brute(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            q = int(rng.integers(2, 400))
            al = Fraction(int(rng.integers(0, q)), q)
            s = Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 4)))
            N, T = int(rng.integers(2, 30)), int(rng.integers(2, 8))
            n = np.arange(1, 61, dtype=np.int64)
            _, hit = sc._masks_for_alpha(n, al, s, N, T)
            assert hit.tolist() == [brute_in_En(al, k, s, N, T) for k in range(1, 61)]

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.integers(1, 400), min_size=2, max_size=50),
        st.builds(Fraction, st.integers(0, 10**5), st.integers(1, 10**5)),
        st.integers(2, 30),
    )
    def test_between_zero_and_F(self, vals, al, T):
        A = sc0.make_set(vals, 400)
        if A.N < 2:
            return
        c = sc.SchmidtConfig.for_set(A, T)
        assert 0 <= sc.f_star(A, al, c).count <= pc.pair_corr_direct(A, al, 1).count


class TestL1:
    def test_T_ge_X(self):
        A = sc0.gallery("interval", 20)
        assert sc.l1_distance_exact(A, sc.SchmidtConfig.for_set(A, 20)) == 0

    def test_interval_20(self):
        A = sc0.gallery("interval", 20)
        a = sc.l1_audit(A, sc.SchmidtConfig.for_set(A, 2))
        assert isinstance(a.lhs, Fraction) and a.lhs > 0 and math.isfinite(a.ratio)

    def test_needs_N_ge_2s(self):
        A = sc0.make_set([1, 2], 2)
        with pytest.raises(PreconditionError):
            sc.l1_distance_exact(A, sc.SchmidtConfig(T=2, s=3, N=2, X=2))

    def test_means_add_up(self):
        A = sc0.gallery("primes", 800)
        c = sc.SchmidtConfig.for_set(A, 5)
        assert sc.fstar_mean_exact(A, c) + sc.l1_distance_exact(A, c) == pc.mean_F_exact(A.N, 1)


class TestVariance:
    def test_T_ge_X_kills_S1(self):
        A = sc0.gallery("interval", 30)
        assert sc.variance_components(A, sc.SchmidtConfig.for_set(A, 30)).S1 == 0

    def test_small_ordering(self):
        A = sc0.make_set([1, 2, 3, 4], 4)
        v = sc.variance_components(A, sc.SchmidtConfig.for_set(A, 2))
        assert float(v.S3) <= v.S2

    def test_chain(self):
        for kind in ("squares", "primes"):
            A = sc0.gallery(kind, 3000)
            v = sc.variance_components(A, sc.SchmidtConfig.for_set(A, 8))
            s1, s2, s3 = v.chain
            assert v.S2 <= s1 * (1 + 1e-12) <= s2 * (1 + 1e-9) <= s3 * (1 + 1e-9)
            assert float(v.S3) <= v.S2 * (1 + 1e-12)

    def test_mc_means(self):
        A = sc0.gallery("squares", 10**4)
        e_tilde = sc0.energy(A).E_tilde
        T = float(e_tilde * A.delta) ** -0.25 + 1
        rep = sc.variance_mc(A, sc.SchmidtConfig.for_set(A, T), 10**4, seed=1)
        assert abs(rep.mean_F - float(rep.expected_mean_F)) <= 3 * rep.se_F
        assert abs(rep.mean_Fstar - float(rep.expected_mean_Fstar)) <= 3 * rep.se_Fstar
        assert abs(rep.mean_gap - float(rep.l1_exact)) <= 3 * rep.se_gap

    def test_T_ge_X_variances_equal(self):
        A = sc0.gallery("squares", 900)
        rep = sc.variance_mc(A, sc.SchmidtConfig.for_set(A, 900), 2000, seed=2)
        assert rep.var_F == rep.var_Fstar

    def test_seeded_reproducible(self):
        A = sc0.gallery("squares", 900)
        c = sc.SchmidtConfig.for_set(A, 4)
        assert sc.variance_mc(A, c, 1000, 9) == sc.variance_mc(A, c, 1000, 9)

    def test_sample_floor(self):
        A = sc0.gallery("squares", 900)
        with pytest.raises(PreconditionError):
            sc.variance_mc(A, sc.SchmidtConfig.for_set(A, 4), 999, 0)
