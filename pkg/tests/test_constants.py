import math

import numpy as np
import pytest

from qdlab.constants import (
    TABLE_ALPHAS,
    TABLE_DELTAS,
    TABLE_REFERENCE,
    bound_chain_check,
    c_delta_alt,
    c_delta_hn,
    c_delta_table,
    c_delta_table_grid,
    n_min,
    sigma_w,
    stirling_max_ratio,
    w_lower_example,
)
from qdlab.core import LogValue

scipy_special = pytest.importorskip("scipy.special")


class TestSigmaW:
    def test_matches_hurwitz_zeta(self):
        # 6 * sum_{j>w} j^-a == 6 * zeta(a, w+1)
        for alpha in (1.5, 2.0, 3.0, 4.0):
            for w in (0, 1, 5, 130, 10**4, 10**7):
                want = 6.0 * float(scipy_special.zeta(alpha, w + 1))
                assert sigma_w(alpha, w) == pytest.approx(want, rel=1e-10)

    def test_integral_sandwich(self):
        # integral bounds: 6/( (a-1)(w+1)^(a-1) ) <= sigma <= 6/( (a-1) w^(a-1) )
        for alpha in (1.5, 2.0, 3.0):
            for w in (1, 10, 1000):
                lo = 6.0 / ((alpha - 1.0) * (w + 1) ** (alpha - 1.0))
                hi = 6.0 / ((alpha - 1.0) * w ** (alpha - 1.0))
                assert lo <= sigma_w(alpha, w) <= hi

    def test_decreasing_in_w(self):
        vals = [sigma_w(2.0, w) for w in (0, 1, 2, 10, 100, 10**6)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_alpha_guard(self):
        with pytest.raises(ValueError):
            sigma_w(1.0, 5)
        with pytest.raises(ValueError):
            sigma_w(2.0, -1)


class TestCDeltaHn:
    def test_known_small_case(self):
        rep = c_delta_hn(3.0, 0.9)
        assert rep.w == 5
        assert rep.sigma_w == pytest.approx(0.09836919673534347, rel=1e-12)
        assert rep.c_delta.to_float() == pytest.approx(1.7355858425556568e5, rel=1e-6)

    def test_alpha2_delta_half(self):
        assert c_delta_hn(2.0, 0.5).w == 130

    def test_w_is_minimal(self):
        for alpha, delta in ((3.0, 0.9), (2.0, 0.5), (4.0, 0.1)):
            rep = c_delta_hn(alpha, delta)
            w = rep.w
            target = delta / (1.0 + sigma_w(alpha, 0))
            assert sigma_w(alpha, w) <= target
            if w > 0:
                assert sigma_w(alpha, w - 1) > target

    def test_route_token(self):
        assert c_delta_hn(2.0, 0.9).route == "hn"


class TestCDeltaTable:
    def test_closed_form_w(self):
        # w = -1 + ((6/((a-1) delta)) * (1 + 6/(a-1)))^(1/(a-1))
        for alpha, delta in ((2.0, 0.5), (3.0, 0.1), (1.5, 0.9)):
            rep = c_delta_table(alpha, delta)
            want = -1.0 + ((6.0 / ((alpha - 1.0) * delta)) * (1.0 + 6.0 / (alpha - 1.0))) ** (
                1.0 / (alpha - 1.0)
            )
            assert rep.w == pytest.approx(want, rel=1e-12)

    def test_twelve_cells_match_reference(self):
        cells = c_delta_table_grid()
        assert len(cells) == 12
        assert [(c.delta, c.alpha) for c in cells] == [
            (d, a) for d in TABLE_DELTAS for a in TABLE_ALPHAS
        ]
        for cell in cells:
            ref, kind = TABLE_REFERENCE[(cell.delta, cell.alpha)]
            if kind == "mantissa":
                assert abs(cell.log10_diff) <= 1.0, (cell.delta, cell.alpha)
            elif kind == "power":
                assert abs(cell.log10_diff) <= 5.0, (cell.delta, cell.alpha)
            else:
                rel = abs(cell.computed.to_float() - ref.to_float()) / ref.to_float()
                assert rel <= 0.05, (cell.delta, cell.alpha)

    def test_spot_values(self):
        assert c_delta_table(3.0, 0.9).c_delta.to_float() == pytest.approx(24.5, rel=0.05)
        assert c_delta_table(4.0, 0.5).c_delta.to_float() == pytest.approx(2.5, rel=0.05)
        big = c_delta_table(1.5, 0.1).c_delta
        assert big.log10 == pytest.approx(5152589, abs=5.0)

    def test_matches_flag_agrees_with_tolerances(self):
        assert all(cell.matches for cell in c_delta_table_grid())

    def test_grid_runtime(self):
        import time

        t0 = time.perf_counter()
        c_delta_table_grid()
        assert time.perf_counter() - t0 < 1.0


class TestWorkedExample:
    def test_w_lower_value(self):
        lv = w_lower_example()
        assert lv.log10 == pytest.approx(45.63481085394411, abs=2e-3)
        m, e = lv.mantissa_exponent()
        assert e == 45
        assert m == pytest.approx(4.31331, abs=5e-4)

    def test_matches_table_route_w(self):
        # -1 + (600*61)^10 is exactly the closed-form w at (alpha, delta) = (1.1, 0.1)
        rep = c_delta_table(1.1, 0.1)
        want = (600 * 61) ** 10 - 1
        assert rep.w == pytest.approx(float(want), rel=1e-12)
        assert w_lower_example().log10 == pytest.approx(math.log10(want), abs=1e-12)


class TestStirling:
    def brute_argmax(self, x, d_cap=None):
        # exact factorial scan; the ratio x^k / k!
        best_k, best = 1, math.log10(x)
        top = (d_cap or 0) or max(10, int(3 * x) + 10)
        for k in range(1, top + 1):
            v = k * math.log10(x) - math.log10(math.factorial(k))
            if v > best:
                best_k, best = k, v
        return best_k, best

    def test_spot_x10(self):
        res = stirling_max_ratio(10.0)
        assert res.k_star == 9
        assert res.value.to_float() == pytest.approx(2755.731922398589, rel=1e-10)
        assert res.bound.to_float() == pytest.approx(5557.569219204141, rel=1e-10)

    def test_small_x(self):
        assert stirling_max_ratio(1.0).k_star == 1
        assert stirling_max_ratio(2.0).k_star in (1, 2)  # 2^1/1! == 2^2/2!

    def test_exact_below_bound_sweep(self):
        for x in np.logspace(-3, 3, 40):
            res = stirling_max_ratio(float(x))
            assert res.value.log10 <= res.bound.log10 + 1e-12

    def test_matches_brute_argmax(self):
        rng = np.random.default_rng(83)
        for _ in range(12):
            x = float(rng.uniform(0.2, 60.0))
            res = stirling_max_ratio(x)
            k, best = self.brute_argmax(x)
            assert res.value.log10 == pytest.approx(best, abs=1e-9)
            # argmax can tie at two adjacent integers when x is integral
            assert abs(res.k_star - k) <= 1
            assert res.value.log10 >= k * math.log10(x) - math.log10(math.factorial(k)) - 1e-9

    def test_dimension_cap(self):
        res = stirling_max_ratio(10.0, d_cap=4)
        assert res.k_star == 4
        assert res.value.to_float() == pytest.approx(10.0**4 / 24.0, rel=1e-12)

    def test_guard(self):
        with pytest.raises(ValueError):
            stirling_max_ratio(0.0)


class TestCDeltaAlt:
    def test_alpha2_closed_form(self):
        # x0 = 24, exponent (a-1)(6 x0)^(1/a) = 12, prefactor (2e^2/pi)^(a/2) / sqrt 6
        rep = c_delta_alt(2.0, 0.5)
        assert rep.w == pytest.approx(24.0, rel=1e-12)
        want = (2.0 * math.e**2 / math.pi) / math.sqrt(6.0) * math.exp(12.0)
        assert rep.c_delta.to_float() == pytest.approx(want, rel=1e-10)
        assert rep.c_delta.to_float() == pytest.approx(312555.5711710626, rel=1e-9)

    def test_near_one_alpha_is_finite(self):
        rep = c_delta_alt(1.05, 0.5)
        assert math.isfinite(rep.c_delta.log10)
        assert rep.c_delta.log10 > 0

    def test_x0_maximizes_slope_change(self):
        # the derivative factor 6(6x)^((1-a)/a) - delta changes sign at x0
        for alpha, delta in ((2.0, 0.5), (3.0, 0.1), (1.5, 0.9)):
            rep = c_delta_alt(alpha, delta)
            x0 = rep.w
            slope = lambda x: 6.0 * (6.0 * x) ** ((1.0 - alpha) / alpha) - delta
            assert slope(0.9 * x0) > 0.0 > slope(1.1 * x0)

    def test_route_token(self):
        assert c_delta_alt(2.0, 0.5).route == "alt"


class TestBoundChain:
    def test_spot_grid(self):
        for alpha in (1.5, 2.0, 3.0):
            for delta in (0.1, 0.5, 0.9):
                for N in (3.0, 10.0, 1e4, 1e12):
                    assert bound_chain_check(alpha, delta, N)

    def test_guard(self):
        with pytest.raises(ValueError):
            bound_chain_check(2.0, 0.5, 2.0)


class TestNMin:
    def test_plain_integers(self):
        # c/eps = 4, exponent 1/(1-delta) = 2 -> 16
        assert n_min(0.25, 1.0, 0.5) == 16
        assert n_min(0.5, 1.0, 0.5) == 4

    def test_exact_integer_boundary(self):
        # (1/0.1)^(1/(1-0.9)) = 10^10 exactly; ceil must not jump to the next integer
        assert n_min(0.1, 1.0, 0.9) == 10**10

    def test_large_result_is_log_valued(self):
        got = n_min(0.1, 24.5, 0.9)
        assert isinstance(got, LogValue)
        assert got.log10 == pytest.approx(23.89166084364533, rel=1e-12)

    def test_log_valued_c_delta_input(self):
        c = LogValue.from_float(10.0) ** 40  # 10^40
        got = n_min(0.5, c, 0.5)
        assert isinstance(got, LogValue)
        assert got.log10 == pytest.approx(80.0 + 2 * math.log10(2.0), abs=1e-9)

    def test_monotone_in_epsilon(self):
        vals = [n_min(e, 2.0, 0.5) for e in (0.5, 0.1, 0.01)]
        as_floats = [float(v) if not isinstance(v, LogValue) else v.to_float() for v in vals]
        assert as_floats[0] < as_floats[1] < as_floats[2]

    def test_guards(self):
        with pytest.raises(ValueError):
            n_min(0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            n_min(0.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            n_min(0.1, 0.0, 0.5)
