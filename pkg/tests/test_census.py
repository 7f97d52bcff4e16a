import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecsmooth import arith, census, cmcount, curve, ecm
from ecsmooth.errors import CapacityError, DomainError, UsageError

E7 = ecm.catalog_curve("e7")
E11 = ecm.catalog_curve("e11")


def largest_prime_factor(n):
    lpf, p = 0, 2
    while p * p <= n:
        while n % p == 0:
            lpf, n = p, n // p
        p += 1
    return max(lpf, n) if n > 1 else lpf


def naive_order_fn(cat):
    return lambda p: curve.naive_count(cat.curve, p)


class TestFriabilityTester:
    def test_strictness(self):
        t = census.FriabilityTester(7)
        assert t(1) and t(12) and t(30)
        assert not t(7) and not t(14)

    def test_bad_args(self):
        with pytest.raises(UsageError):
            census.FriabilityTester(1)
        with pytest.raises(UsageError):
            census.FriabilityTester(7)(0)

    @given(st.integers(1, 10**4), st.integers(2, 100))
    @settings(max_examples=200)
    def test_matches_lpf(self, n, y):
        expected = n == 1 or largest_prime_factor(n) < y
        assert census.FriabilityTester(y)(n) == expected


class TestPsiExact:
    def test_example(self):
        assert census.psi_exact(10, 3) == 4  # {1, 2, 4, 8}

    def test_y_above_x(self):
        assert census.psi_exact(100, 101) == 100

    def test_brute_force_cross_product(self):
        for x in (30, 100, 300):
            for y in (2, 3, 7, 10, 50):
                brute = sum(
                    1 for n in range(1, x + 1) if n == 1 or largest_prime_factor(n) < y
                )
                assert census.psi_exact(x, y) == brute, (x, y)

    def test_budget(self):
        with pytest.raises(CapacityError):
            census.psi_exact(census.PSI_BUDGET + 1, 100)


class TestPsiE:
    def test_all_friable_bound(self):
        x = 500
        _, hi = curve.hasse_interval(x)
        fn = naive_order_fn(E7)
        assert census.psi_E(x, hi + 1, E7, fn) == len(census.good_primes(E7, x))

    def test_y2_zero_beyond_tiny(self):
        fn = naive_order_fn(E7)
        assert census.psi_E(500, 2, E7, fn) == 0

    def test_brute_recount(self):
        fn = naive_order_fn(E7)
        y = 1 << 7
        got = census.psi_E(10**4, y, E7, fn)
        brute = sum(
            1
            for p in census.good_primes(E7, 10**4)
            if largest_prime_factor(curve.naive_count(E7.curve, p)) < y
        )
        assert got == brute

    def test_monotone(self):
        fn = naive_order_fn(E7)
        vals_y = [census.psi_E(2000, y, E7, fn) for y in (4, 16, 64, 256)]
        assert vals_y == sorted(vals_y)
        vals_x = [census.psi_E(x, 64, E7, fn) for x in (500, 1000, 2000)]
        assert vals_x == sorted(vals_x)


class TestPsiEZ:
    def test_brute_recount(self):
        fn = naive_order_fn(E7)
        x, y, z = 300, 20, 10
        hitting = {
            p
            for p in census.good_primes(E7, x)
            if largest_prime_factor(curve.naive_count(E7.curve, p)) < z
        }
        brute = 0
        for n in range(2, x + 1):
            if largest_prime_factor(n) >= y:
                continue
            m, hit = n, False
            for p in range(2, n + 1):
                if m % p == 0:
                    if p in hitting:
                        hit = True
                    while m % p == 0:
                        m //= p
            if hit:
                brute += 1
        assert census.psi_E_z(x, y, z, E7, fn) == brute

    def test_subset_of_psi(self):
        fn = naive_order_fn(E7)
        assert census.psi_E_z(500, 20, 10, E7, fn) <= census.psi_exact(500, 20)

    def test_one_never_counts(self):
        fn = naive_order_fn(E7)
        assert census.psi_E_z(1, 10, 10, E7, fn) == 0


class TestPiED:
    def test_d1(self):
        fn = naive_order_fn(E7)
        assert census.pi_E_d(500, 1, E7, fn) == len(census.good_primes(E7, 500))

    def test_huge_d(self):
        fn = naive_order_fn(E7)
        _, hi = curve.hasse_interval(500)
        assert census.pi_E_d(500, hi + 1, E7, fn) == 0

    def test_noncm_density(self):
        cat = ecm.catalog_curve("e37")
        fn = cmcount.order_fn_for(cat)
        x = 10**4
        got = census.pi_E_d(x, 2, cat, fn)
        from ecsmooth import lfunc

        predicted = lfunc.w_noncm(2) / 2 * x / math.log(x)
        assert got * 2 / (lfunc.w_noncm(2) * x / math.log(x)) == pytest.approx(1.0, abs=0.25)
        assert got > 0 and predicted > 0


class TestRace:
    def test_self_race_zero(self):
        fn = naive_order_fn(E7)
        s = census.race(E7, E7, 128, [100, 500, 1000], fn, fn)
        assert all(v == 0 for _, v in s.rows)

    def test_antisymmetry(self):
        f1, f2 = naive_order_fn(E7), naive_order_fn(E11)
        a = census.race(E7, E11, 128, [200, 800, 2000], f1, f2)
        b = census.race(E11, E7, 128, [200, 800, 2000], f2, f1)
        assert [(x, -v) for x, v in a.rows] == b.rows

    def test_empty_checkpoints(self):
        assert census.race(E7, E11, 128, []).rows == []

    def test_matches_pointwise_psi(self):
        f1, f2 = naive_order_fn(E7), naive_order_fn(E11)
        s = census.race(E7, E11, 64, [300, 1500], f1, f2)
        for x, v in s.rows:
            assert v == census.psi_E(x, 64, E7, f1) - census.psi_E(x, 64, E11, f2)


class TestCensusSeries:
    def test_strictly_increasing_invariant(self):
        with pytest.raises(UsageError):
            census.CensusSeries(census.SeriesKind.PSI, {}, [(2, 1.0), (2, 2.0)])

    def test_header_convention(self):
        s = census.CensusSeries(census.SeriesKind.PSI, {"y": 128}, [(10, 4.0)])
        assert "convention=Pplus_strict" in s.header()
        assert s.to_csv().startswith("# psi,y=128,convention=Pplus_strict")

    def test_json_roundtrip(self):
        s = census.CensusSeries(census.SeriesKind.RACE, {"e1": "e7", "e2": "e11", "y": 128},
                                [(16, 1.0), (32, 3.0)])
        t = census.CensusSeries.from_json(s.to_json())
        assert t.kind == s.kind and t.params == s.params and t.rows == s.rows

    def test_unknown_convention_rejected(self):
        with pytest.raises(UsageError):
            census.CensusSeries.from_json('{"kind":"psi","params":{},"convention":"other","rows":[]}')


class TestPsiK:
    @staticmethod
    def ideal_count_brute(x, K):
        # number of ideals of norm n = sum_{d | n} chi(d); summed directly
        total = 0
        for n in range(1, x + 1):
            total += sum(K.chi(d) for d in range(1, n + 1) if n % d == 0)
        return total

    def test_small_counts(self):
        for d in (1, 7, 163):
            K = arith.field_for(d)
            assert census.psi_K(60, K) == self.ideal_count_brute(60, K), d

    def test_friable_brute(self):
        for d in (1, 2, 3, 7, 11):
            K = arith.field_for(d)
            x, y = 200, 8
            brute = 0
            for n in range(1, x + 1):
                # ideals counted iff their norm n is y-friable as an integer
                if n > 1 and largest_prime_factor(n) >= y:
                    continue
                brute += sum(K.chi(dd) for dd in range(1, n + 1) if n % dd == 0)
            assert census.psi_K_friable(x, y, K) == brute, d

    def test_friable_caps_at_total(self):
        K = arith.field_for(7)
        assert census.psi_K_friable(500, 1000, K) == census.psi_K(500, K)


class TestGammaTilde:
    def test_u_near_one_small(self):
        K = arith.field_for(7)
        # u slightly above 1: ratio near 1, gamma-tilde near 0
        val = census.gamma_tilde_field(K, 10**4, 9000)
        assert abs(val) < 1.0

    def test_field_mode_stability(self):
        K = arith.field_for(7)
        a = census.gamma_tilde_field(K, 10**5, round(10**5 ** (1 / 1.5)))
        b = census.gamma_tilde_field(K, 10**6, round(10**6 ** (1 / 1.5)))
        assert b == pytest.approx(a, rel=0.2)

    def test_dispatcher(self):
        K = arith.field_for(7)
        direct = census.gamma_tilde_field(K, 10**4, 100)
        via = census.gamma_tilde(census.GammaTildeMode.FIELD_IDEALS, K, 10**4, 100)
        assert direct == via

    def test_curve_mode(self):
        fn = naive_order_fn(E7)
        val = census.gamma_tilde_curve(E7, 2000, 100, fn)
        assert math.isfinite(val)

    def test_underflow(self):
        with pytest.raises(DomainError):
            census._gamma_tilde(1, 100, 2**60, 2)


class TestOrderCache:
    def test_matches_direct(self, tmp_path):
        cache = census.OrderCache(tmp_path, seed=0)
        table = cache.orders(E7, 3000)
        fn = cmcount.order_fn_for(E7, 0)
        for p in census.good_primes(E7, 3000):
            assert table[p] == fn(p)

    def test_resume_byte_identical(self, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        ca, cb = census.OrderCache(a_dir, seed=0), census.OrderCache(b_dir, seed=0)
        x = census.CACHE_SEGMENT + 100  # one full persisted segment + a partial
        ca.orders(E7, x)
        cb.orders(E7, x)
        files_a = sorted(f.name for f in a_dir.iterdir())
        files_b = sorted(f.name for f in b_dir.iterdir())
        assert files_a == files_b and files_a  # only the full segment persisted
        for name in files_a:
            assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()
        # second call must reuse the files and agree exactly
        again = census.OrderCache(a_dir, seed=0).orders(E7, x)
        assert again == cb.orders(E7, x)

    def test_order_fn_closure(self, tmp_path):
        cache = census.OrderCache(tmp_path, seed=0)
        fn = cache.order_fn(E7, 1000)
        assert fn(11) == curve.naive_count(E7.curve, 11)
