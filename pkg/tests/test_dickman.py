import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecsmooth import dickman
from ecsmooth.errors import DomainError

# High-precision reference values for rho (frozen literature constants).
RHO_REFERENCE = {
    2.0: 0.30685281944005469,
    3.0: 0.048608388294652280,
    4.0: 0.0049109256775463328,
    5.0: 0.00035472470045487723,
    10.0: 2.7701718381738851e-11,
}


class TestRho:
    def test_one_below_one(self):
        for u in (0.0, 0.3, 0.7, 1.0):
            assert dickman.rho(u) == 1.0

    def test_closed_form_on_1_2(self):
        # rho(u) = 1 - log u on [1, 2]
        for u in (1.1, 1.5, 1.9, 2.0):
            assert dickman.rho(u) == pytest.approx(1.0 - math.log(u), abs=1e-9)

    def test_reference_values(self):
        for u, ref in RHO_REFERENCE.items():
            assert dickman.rho(u) == pytest.approx(ref, rel=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            dickman.rho(-0.1)
        with pytest.raises(DomainError):
            dickman.rho(51.0)

    def test_monotone_grid(self):
        t = dickman.default_table()
        vals = t.values
        assert all(vals[i] >= vals[i + 1] - 1e-15 for i in range(len(vals) - 1))

    def test_step_halving_convergence(self):
        fine = dickman.RhoTable(step=1.0 / 2048)
        for k in range(1, 81):
            u = k * 0.25
            assert abs(dickman.rho(u) - fine.rho(u)) <= 1e-9, u

    @given(st.floats(0.0, 20.0))
    @settings(max_examples=100)
    def test_positive_and_bounded(self, u):
        r = dickman.rho(u)
        assert 0.0 < r <= 1.0

    def test_clipped_underflow(self):
        v, flag = dickman.rho_clipped(60.0)
        assert v == 0.0 and flag
        v, flag = dickman.rho_clipped(2.0)
        assert not flag and v == pytest.approx(1 - math.log(2), abs=1e-9)


class TestDeBruijn:
    def test_ratio_band(self):
        for k in range(10, 41):
            u = float(k)
            ratio = math.log(dickman.rho(u)) / math.log(dickman.rho_debruijn(u))
            assert 0.8 <= ratio <= 1.2, (u, ratio)

    def test_u1_formula(self):
        assert dickman.rho_debruijn(1.0) == pytest.approx(
            math.exp(-(math.log(math.log(3.0)) - 1.0))
        )

    def test_domain(self):
        with pytest.raises(DomainError):
            dickman.rho_debruijn(0.5)


class TestXi:
    def test_residual(self):
        for u in (2.0, 10.0, 100.0):
            x = dickman.xi(u)
            assert abs(math.exp(x) - 1.0 - u * x) <= 1e-12 * (1.0 + u * x)
            assert x > 0

    def test_asymptotic(self):
        u = 1e4
        assert dickman.xi(u) / math.log(u * math.log(u)) == pytest.approx(1.0, abs=0.05)

    def test_domain(self):
        with pytest.raises(DomainError):
            dickman.xi(1.0)


class TestLSubexp:
    def test_alpha_one(self):
        assert dickman.l_subexp(1000, 1.0, 2.0) == pytest.approx(1000.0**2)

    def test_alpha_zero(self):
        assert dickman.l_subexp(1000, 0.0, 3.0) == pytest.approx(math.log(1000) ** 3)

    def test_domain(self):
        with pytest.raises(DomainError):
            dickman.l_subexp(8, 0.5, 1.0)
        with pytest.raises(DomainError):
            dickman.l_subexp(1000, 1.5, 1.0)
        with pytest.raises(DomainError):
            dickman.l_subexp(1000, 0.5, -1.0)
