from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissonian import setcore as sc0
from poissonian.ntt import MOD, exact_autocorrelation, ntt_forward, ntt_inverse


def brute_energy(values):
    return sum(1 for a, b, c, d in product(values, repeat=4) if a + b == c + d)


def brute_r(values, X):
    r = [0] * (X + 1)
    for a in values:
        for b in values:
            if a > b:
                r[a - b] += 1
    return r


sets = st.builds(
    lambda X, vals: sc0.make_set([v for v in vals if v <= X], X),
    st.integers(1, 120),
    st.lists(st.integers(1, 120), max_size=40),
)


class TestMakeSet:
    def test_dedupe_and_truncate(self):
        A = sc0.make_set([3, 1, 3, 9], 5)
        assert list(A) == [1, 3] and A.N == 2

    def test_full_interval(self):
        A = sc0.make_set(range(1, 11), 10)
        assert A.N == 10 and A.delta == 1

    def test_unsorted_squares(self):
        assert list(sc0.make_set([4, 1, 9, 16], 16)) == [1, 4, 9, 16]

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            sc0.make_set([0, 1], 5)

    def test_elements_read_only(self):
        A = sc0.make_set([1, 2], 3)
        with pytest.raises(ValueError):
            A.elements[0] = 5

    def test_prefix_is_minimal_truncation(self):
        A = sc0.gallery("squares", 100)
        P = A.prefix(4)
        assert P.X == 16 and list(P) == [1, 4, 9, 16]


class TestGallery:
    def test_squares(self):
        A = sc0.gallery("squares", 100)
        assert A.N == 10 and list(A)[-1] == 100

    def test_primes(self):
        assert list(sc0.gallery("primes", 10)) == [2, 3, 5, 7]

    def test_lacunary_starts_at_first_power(self):
        assert list(sc0.gallery("lacunary", 20, base=2)) == [2, 4, 8, 16]

    def test_kth_powers(self):
        assert list(sc0.gallery("kth-powers", 100, k=3)) == [1, 8, 27, 64]

    @pytest.mark.parametrize("kind", sc0.GALLERY_KINDS)
    def test_nth_matches_gallery(self, kind):
        A = sc0.gallery(kind, 5000)
        for n in (1, 2, A.N // 2 or 1, A.N):
            assert sc0.gallery_nth(kind, n) == A.elements[n - 1]

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            sc0.gallery("cubes", 10)


class TestDiffRep:
    def test_three(self):
        rep = sc0.diff_rep(sc0.make_set([1, 2, 3], 3))
        assert (rep(1), rep(2), rep(3)) == (2, 1, 0)

    def test_singleton(self):
        rep = sc0.diff_rep(sc0.make_set([1], 5))
        assert rep.total() == 0

    def test_powers_of_two(self):
        rep = sc0.diff_rep(sc0.make_set([1, 2, 4, 8], 8))
        n, r = rep.nonzero()
        assert n.tolist() == [1, 2, 3, 4, 6, 7] and r.tolist() == [1] * 6

    def test_dense_and_sparse_agree(self):
        A = sc0.gallery("squares", 10**4)
        d, s = sc0.diff_rep(A, dense=True), sc0.diff_rep(A, dense=False)
        assert np.array_equal(d.as_dense(), s.as_dense())

    @settings(max_examples=60, deadline=None)
    @given(sets)
    def test_matches_brute(self, A):
        assert sc0.diff_rep(A).as_dense().tolist() == brute_r(list(A), A.X)

    @settings(max_examples=60, deadline=None)
    @given(sets)
    def test_total(self, A):
        assert sc0.diff_rep(A).total() == A.N * (A.N - 1) // 2


class TestEnergy:
    @pytest.mark.parametrize("values,E", [([1, 2], 6), ([1, 2, 3], 19), ([1], 1)])
    def test_small(self, values, E):
        A = sc0.make_set(values, max(values))
        for m in sc0.ENERGY_METHODS:
            assert sc0.energy(A, m).E == E

    def test_interval_closed_form(self):
        assert sc0.energy(sc0.gallery("interval", 100), "fft").E == 666700
        for X in range(1, 61):
            A = sc0.gallery("interval", X)
            assert sc0.energy(A, "quadruple-brute").E == (2 * X**3 + X) // 3

    @settings(max_examples=40, deadline=None)
    @given(sets.filter(lambda A: 1 <= A.N <= 25))
    def test_methods_agree_with_brute(self, A):
        E = brute_energy(list(A))
        for m in sc0.ENERGY_METHODS:
            assert sc0.energy(A, m).E == E
        assert sc0.energy(A, "fft", exact_transform=True).E == E

    @settings(max_examples=40, deadline=None)
    @given(sets.filter(lambda A: A.N >= 1))
    def test_normalised_at_most_one(self, A):
        assert sc0.energy(A).E_tilde <= 1

    def test_brute_refuses_large(self):
        with pytest.raises(ValueError):
            sc0.energy(sc0.gallery("interval", 100), "quadruple-brute")

    def test_json_keeps_big_E_exact(self):
        rep = sc0.energy(sc0.gallery("interval", 10**5), "fft")
        assert f'"E": "{rep.E}"' in rep.to_json()


class TestNTT:
    def test_roundtrip(self):
        rng = np.random.default_rng(1)
        a = rng.integers(0, MOD, 64).astype(np.int64)
        assert np.array_equal(ntt_inverse(ntt_forward(a.copy())), a)

    def test_autocorrelation_matches_float_path(self):
        A = sc0.gallery("primes", 5000)
        assert np.array_equal(exact_autocorrelation(A.elements, A.X), sc0.autocorrelation(A))


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        A = sc0.gallery("primes", 500)
        path = tmp_path / "s.txt"
        sc0.write_set(A, path)
        assert sc0.read_set(path) == A
        assert b"\r" not in path.read_bytes()

    def test_leading_comments_skipped(self):
        text = "# tool=x\n# flags --X=9\n# X=9 N=2\n1\n4\n"
        assert list(sc0.loads_set(text)) == [1, 4]

    def test_count_mismatch(self):
        with pytest.raises(ValueError):
            sc0.loads_set("# X=9 N=3\n1\n4\n")

    def test_delta_is_fraction(self):
        assert sc0.gallery("squares", 100).delta == Fraction(1, 10)
