import cmath
import math
import random

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tritronquee.asymptotics import (MinusInfinityFormula, decaying_minus_branch,
                                     decaying_plus_branch, oscillatory_amplitude, oscillatory_branch,
                                     q_asym_sector, series_coefficients, series_residual, theta,
                                     u_minus_asym, u_plus_series, v_asym_minus, v_asym_plus)
from tritronquee.errors import DegenerateParameterError, DomainError, UnsupportedRegimeError
from tritronquee.numerics import gamma, lngamma
from tritronquee.params import Regime, TritronqueeSpec, q_tau

from conftest import FROZEN, frozen_complex

LN2 = math.log(2.0)
LN2_2PI = LN2 / (2.0 * math.pi)


class TestSeries:
    def test_order_one(self):
        assert series_coefficients(0.7, "minus", 1) == [-1j / math.sqrt(2)]

    def test_order_two(self):
        c = series_coefficients(0.7 + 0.1j, "minus", 2)
        assert abs(c[1] + (0.7 + 0.1j) / 2) < 1e-15

    @pytest.mark.parametrize("alpha", ["0", "1", "0.3"])
    def test_order_three_against_symbolic(self, alpha):
        c = series_coefficients(float(alpha), "minus", 3)
        assert abs(c[1] - frozen_complex("series_a1_at_alpha", alpha)) < 1e-15
        assert abs(c[2] - frozen_complex("series_a2_at_alpha", alpha)) < 1e-15

    def test_order_limit(self):
        with pytest.raises(DomainError):
            series_coefficients(0, "minus", 9)

    def test_values(self):
        assert abs(u_plus_series(8, 0, "minus", 2) + 2j) < 1e-15
        assert abs(u_plus_series(8, 1, "minus", 2) - (-2j - 1 / 16)) < 1e-15
        assert abs(u_plus_series(2, 0.4, "minus", 1) + 1j) < 1e-15

    def test_sector(self):
        with pytest.raises(DomainError):
            u_plus_series(-5, 0)
        with pytest.raises(DomainError):
            u_plus_series(0.5, 0)

    @settings(max_examples=60)
    @given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
           st.integers(1, 8), st.floats(2.0, 100.0))
    def test_plus_minus_symmetry(self, alpha, order, x):
        cp = series_coefficients(alpha, "plus", order)
        cm = series_coefficients(-alpha, "minus", order)
        assert cp == [-c for c in cm]
        assert u_plus_series(x, alpha, "plus", order) == -u_plus_series(x, -alpha, "minus", order)

    @staticmethod
    def _exact_coeffs(order):
        with mp.workdps(40):
            return [mp.mpc(mp.mpf(re), mp.mpf(im)) for re, im in FROZEN["series_exact_alpha_0.3+0.2i"][:order]]

    @staticmethod
    def _mp_series(x, coeffs, derivs=0):
        # truncated series and its term-wise derivatives
        x = mp.mpf(x)
        out = mp.mpc(0)
        for k, c in enumerate(coeffs):
            e = mp.mpf(1) / 2 - mp.mpf(3) * k / 2
            f = mp.mpf(1)
            for j in range(derivs):
                f *= e - j
            out += c * f * x ** (e - derivs)
        return out

    def test_coefficients_against_exact(self):
        c = series_coefficients(0.3 + 0.2j, "minus", 8)
        ref = self._exact_coeffs(8)
        for ck, rk in zip(c, ref):
            assert abs(ck - complex(rk)) <= 1e-14 * abs(complex(rk))

    @pytest.mark.parametrize("order", [2, 3, 4, 5])
    def test_residual_slope(self, order):
        # dropping the x^{1/2 - 3N/2} term leaves x * x^{1/2 - 3N/2} in the residual;
        # evaluated with exact coefficients, since rounding them to double leaves
        # an eps * x^{3/2} floor that swamps the higher orders
        xs = np.logspace(2, 4, 9)
        with mp.workdps(40):
            c = self._exact_coeffs(order)
            alpha = mp.mpf(3) / 10 + mp.mpf(1) / 5 * 1j
            r = []
            for x in xs:
                u = self._mp_series(x, c)
                d2 = self._mp_series(x, c, 2)
                r.append(float(abs(d2 - x * u - 2 * u ** 3 + alpha)))
        slope = np.polyfit(np.log(xs), np.log(r), 1)[0]
        assert abs(slope + (3 * order - 3) / 2) < 0.05

    @pytest.mark.parametrize("order", [2, 3, 4, 5])
    def test_truncation_error_slope(self, order):
        xs = np.logspace(2, 4, 9)
        with mp.workdps(40):
            c = self._exact_coeffs(order)
            ref = self._exact_coeffs(8)
            err = [float(abs(self._mp_series(x, ref) - self._mp_series(x, c))) for x in xs]
        slope = np.polyfit(np.log(xs), np.log(err), 1)[0]
        assert slope <= -(3 * order - 1) / 2 + 0.1

    def test_double_residual_slope_low_order(self):
        # in plain double precision the package residual shows the same law at order 2
        xs = np.logspace(2, 4, 9)
        r = [abs(series_residual(x, 0.3 + 0.2j, "minus", 2)) for x in xs]
        assert abs(np.polyfit(np.log(xs), np.log(r), 1)[0] + 1.5) < 0.05


class TestMinusInfinity:
    def test_alpha0_prefactor(self):
        _, q, tau = q_tau(0)
        assert abs(oscillatory_amplitude(q.real, tau) - 1j * math.sqrt(LN2 / math.pi)) < 1e-14

    def test_alpha0_envelope(self, frozen):
        spec = TritronqueeSpec.from_alpha(0)
        env = abs(oscillatory_amplitude(spec.q.real, spec.tau)) * 40 ** -0.25
        assert abs(env - frozen["envelope_alpha0_x_minus40"]) < 1e-14
        assert abs(u_minus_asym(-40, spec)) <= env + 1e-15

    def test_branch_product(self):
        rng = random.Random(7)
        for _ in range(20):
            q = complex(rng.uniform(-1, 1), rng.uniform(-0.45, 0.45))
            tau = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            x = rng.uniform(-80, -5)
            prod = decaying_minus_branch(x, q, tau) * decaying_plus_branch(x, q, tau)
            assert abs(prod - q / 2 * (-x) ** -0.5) < 1e-12

    def test_oscillatory_is_sum_of_branches(self):
        for alpha in (0, 1j * 0.4, 2 - 0.7j, 0.5 + 0.2j):
            spec = TritronqueeSpec.from_alpha(alpha)
            assert spec.regime is Regime.OSCILLATORY_REAL
            q = spec.q.real
            for x in (-6.0, -25.0, -70.0):
                s = decaying_minus_branch(x, q, spec.tau) + decaying_plus_branch(x, q, spec.tau)
                assert abs(s - oscillatory_branch(x, q, spec.tau)) < 1e-10

    def test_theta_at_minus_one(self):
        q = 0.23
        ref = -2 / 3 - math.pi / 4 + 3 * q * LN2 - lngamma(1j * q).imag
        assert abs(theta(-1, q) - ref) < 1e-15

    def test_theta_alpha0_constant(self):
        q = -LN2_2PI
        assert abs(3 * q * LN2 + 3 * LN2 ** 2 / (2 * math.pi)) < 1e-15
        # arg Gamma(iq) = -arg Gamma(i ln2/2pi), so the phase carries + arg Gamma(i ln2/2pi)
        x = -30.0
        ref = (-2 / 3 * 30 ** 1.5 - 1.5 * LN2_2PI * math.log(30) - math.pi / 4
               - 3 * LN2 ** 2 / (2 * math.pi) + cmath.phase(gamma(1j * LN2_2PI)))
        assert abs(theta(x, q) - ref) < 1e-12

    def test_theta_derivative(self):
        q, x, h = 0.17, -10.0, 1e-4
        fd = (theta(x + h, q) - theta(x - h, q)) / (2 * h)
        # d/dx with X = -x: (-x)^{1/2} + (3/2) q / x
        assert abs(fd - ((-x) ** 0.5 + 1.5 * q / x)) < 1e-8

    def test_theta_degenerate(self):
        with pytest.raises(DegenerateParameterError):
            theta(-3, 0.0)

    def test_excluded_line(self):
        spec = TritronqueeSpec.from_alpha(0.5 - 0.3j)
        with pytest.raises(UnsupportedRegimeError):
            MinusInfinityFormula.from_spec(spec)

    def test_branch_matches_regime(self):
        for alpha, r in ((0.15, Regime.DECAYING_PLUS), (-0.15, Regime.DECAYING_MINUS), (0, Regime.OSCILLATORY_REAL)):
            assert MinusInfinityFormula.from_spec(TritronqueeSpec.from_alpha(alpha)).branch is r

    def test_domain(self):
        with pytest.raises(DomainError):
            u_minus_asym(-1, TritronqueeSpec.from_alpha(0))


class TestUV:
    def test_v_minus_modulus(self):
        p = 0.37
        tau = math.sqrt(math.expm1(2 * math.pi * p))
        assert abs(abs(gamma(1j * p)) - math.sqrt(math.pi / (p * math.sinh(math.pi * p)))) < 1e-13
        y = -11.0
        mod = (tau * p * math.sqrt(math.pi / (p * math.sinh(math.pi * p))) / (2 * math.sqrt(math.pi))
               * math.exp(-math.pi * p / 2) * (-3 * y) ** -0.25)
        assert abs(abs(v_asym_minus(y, p, tau)) - mod) < 1e-13

    def test_v_minus_phase_derivative(self):
        p, tau, y, h = LN2_2PI, 1.0, -20.0, 1e-5
        ph = lambda yy: cmath.phase(v_asym_minus(yy, p, tau) / v_asym_minus(y, p, tau))
        fd = (ph(y + h) - ph(y - h)) / (2 * h)
        # -d/dy[2(-y/3)^{3/2}] plus -p/(2y) from the power (-3y)^{-ip/2}
        ref = (-y / 3) ** 0.5 - p / (2 * y)
        assert abs(fd - ref) < 1e-8

    def test_v_minus_rogue_value(self):
        v = v_asym_minus(-30, LN2_2PI, 1.0)
        assert abs(v - frozen_complex("v_asym_minus_rogue_y_minus30")) < 1e-14
        p = LN2_2PI
        mag = abs(p * gamma(1j * p)) / (2 * math.sqrt(math.pi)) * math.exp(-math.pi * p / 2) * 90 ** -0.25
        assert abs(abs(v) - mag) < 1e-14

    def test_v_plus(self):
        assert abs(v_asym_plus(6, 0.3) + 1) < 1e-15
        assert abs(v_asym_plus(24, 0) + 2) < 1e-15
        p = LN2_2PI
        assert abs(v_asym_plus(24, p) + 2 * cmath.exp(1j * p * math.log(4))) < 1e-14
        with pytest.raises(DomainError):
            v_asym_plus(1, p)

    def test_q_sector(self):
        assert abs(q_asym_sector(-12, 0) - (2j + 1 / 48)) < 1e-15
        with pytest.raises(DomainError):
            q_asym_sector(-3, 0)
        with pytest.raises(DomainError):
            q_asym_sector(12, 0)

    def test_q_small_y_arithmetic(self):
        # the two-term formula itself at y = -3, bypassing the |y| >= 5 guard
        y, p = -3.0, 0.0
        val = 1j * (-y / 3) ** 0.5 - (0.25 + 0.5j * p) / y
        assert abs(val - (1j + 1 / 12)) < 1e-15

    def test_q_to_u_relation(self):
        p = 0.21
        x = 100.0
        c = 1.5 ** (1 / 3)
        lhs = -c * q_asym_sector(-c * x, p)
        rhs = u_plus_series(x, 0.5 + 1j * p, "minus", 2)
        assert abs(lhs - rhs) < 5 * x ** -2.5
