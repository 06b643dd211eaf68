import cmath
import math

import numpy as np
import pytest

from tritronquee.asymptotics import u_plus_series_jet
from tritronquee.errors import HalfIntegerAlphaError, SeedQualityError
from tritronquee.ode import (EXCISION_RADIUS, fit_laurent, integrate, integrate_uv,
                             laurent_coefficients, pass_pole, seed_from_series, trace_tritronquee,
                             w_second_derivative)

from conftest import FROZEN

TOL = 1e-10


@pytest.fixture(scope="module")
def trace0():
    return trace_tritronquee(0.0, "minus", -60.0, 60.0, TOL)


@pytest.fixture(scope="module")
def pole_trace():
    return integrate(0.0, (0.0, 3.0, 0.0), 1.2, 1e-12)


def residual_ok(tr, x):
    u = tr.u(x)
    return tr.residual(x) <= tr.tolerance * max(1.0, abs(u) ** 3)


class TestSeed:
    def test_residual_at_30(self):
        x0 = 30.0
        u, du = seed_from_series(0.0, "minus", x0)
        h = 1e-3
        up = u_plus_series_jet(x0 + h, 0.0, "minus", 6)[1]
        um = u_plus_series_jet(x0 - h, 0.0, "minus", 6)[1]
        d2 = (up - um) / (2 * h)
        assert abs(d2 - x0 * u - 2 * u ** 3) <= 1e-8

    def test_alpha0_imaginary(self):
        u, du = seed_from_series(0.0, "minus", 30.0)
        assert abs(u.real) <= 1e-14 and abs(du.real) <= 1e-14

    def test_order_one(self):
        u, _ = u_plus_series_jet(30.0, 0.4, "minus", 1)
        assert abs(u + 1j * math.sqrt(15.0)) < 1e-14

    def test_seed_point_too_small(self):
        with pytest.raises(SeedQualityError):
            seed_from_series(0.0, "minus", 19.0)


class TestIntegrate:
    def test_zero_solution(self):
        tr = integrate(0.0, (0.0, 0.0, 0.0), -5.0, TOL)
        assert np.abs(tr.u_values).max() == 0.0

    def test_first_pole_against_taylor_oracle(self, pole_trace):
        assert len(pole_trace.poles) >= 1
        assert abs(pole_trace.poles[0].location - FROZEN["first_pole_alpha0_seed_0_3_0"]) < 1e-8

    def test_round_trip(self):
        seed = (0.0, 0.2 + 0.1j, -0.3)
        fwd = integrate(0.3, seed, 8.0, TOL)
        u, du = fwd.evaluate(8.0)
        back = integrate(0.3, (8.0, u, du), 0.0, TOL)
        ub, dub = back.evaluate(0.0)
        assert abs(ub - seed[1]) <= 10 * TOL and abs(dub - seed[2]) <= 10 * TOL

    def test_round_trip_through_pole(self):
        seed = (0.0, 3.0, 0.0)
        fwd = integrate(0.0, seed, 1.2, 1e-12)
        u, du = fwd.evaluate(1.2)
        back = integrate(0.0, (1.2, u, du), 0.0, 1e-12)
        assert abs(back.evaluate(0.0)[0] - 3.0) < 1e-8
        assert abs(back.poles[0].location - fwd.poles[0].location) < 1e-10

    def test_tol_range(self):
        with pytest.raises(ValueError):
            integrate(0.0, (0.0, 1.0, 0.0), 1.0, 1e-3)


class TestPoles:
    def test_residue_and_fit(self, pole_trace):
        for rec in pole_trace.poles:
            assert rec.residue in (-1, 1)
            for s in (1e-3, -1e-3, 2e-3):
                x = rec.location + s
                assert abs(s * pole_trace.u(x) - rec.residue) < 1e-5
            # (x - x0) u -> sigma: the deviation is O(s^2), so shrink s
            s = 1e-4
            assert abs(s * rec.laurent(s) - rec.residue) < 1e-6

    def test_w_derivative_at_zero(self, pole_trace):
        rec = pole_trace.poles[0]
        x = rec.location - 0.05
        u, du = pole_trace.evaluate(x)
        patch = fit_laurent(x, u, du, 0.0)
        assert abs(abs(1.0 / patch.g[0]) - 1.0) <= 1e-6
        again = pass_pole({"x": x, "w": 1 / u, "dw": -du / u ** 2, "alpha": 0.0})
        assert abs(again.location - rec.location) < 1e-10

    def test_w_equation_regular(self, frozen):
        # the oracle's symbolic w'' = (2 w'^2 + (alpha w - x) w^2 - 2) / w
        assert frozen["w_equation"] == "(2*s**2 + (alpha*w(x) - x)*w(x)**2 - 2)/w(x)"
        for sigma in (1, -1):
            for w in (1e-4, 1e-7, 1e-10):
                d2 = w_second_derivative(0.7, w, sigma, 0.3)
                assert math.isfinite(abs(d2)) and abs(d2) < 10

    def test_laurent_coefficients(self):
        # u = sigma/s + c1 s + c2 s^2 + ...: c1 = -sigma x0/6, c2 = (alpha - sigma)/4
        x0, alpha = 1.3, 0.4
        for sigma in (1, -1):
            c1, c2, c3 = laurent_coefficients(x0, sigma, alpha, c3=0.7)
            assert abs(c1 + sigma * x0 / 6) < 1e-15
            assert abs(c2 - (alpha - sigma) / 4) < 1e-15
            assert c3 == 0.7

    def test_laurent_solves_ode(self):
        from tritronquee.ode import LaurentPatch, _laurent_g
        x0, alpha, sigma = 0.9, 0.2 + 0.1j, -1
        patch = LaurentPatch(x0, sigma, alpha, _laurent_g(x0, sigma, alpha, 0.3 - 0.2j, 40))
        for s in (0.05, -0.08, 0.1j):
            u, du, d2u = patch.jet(x0 + s, derivs=2)
            assert abs(d2u - (x0 + s) * u - 2 * u ** 3 + alpha) < 1e-10 * max(1, abs(u) ** 3)


class TestTritronquee:
    def test_alpha0_imaginary(self, trace0):
        assert np.abs(trace0.u_values.real).max() <= 100 * TOL

    def test_alpha0_pole_free(self, trace0):
        assert trace0.poles == []

    def test_grid(self, trace0):
        assert len(trace0.x_grid) >= 1200
        assert np.all(np.diff(trace0.x_grid) > 0)

    def test_residual_invariant(self, trace0):
        for x in trace0.x_grid[::7]:
            assert residual_ok(trace0, x)

    def test_no_poles_or_zeros_on_line(self):
        tr = trace_tritronquee(0.5 + 0.2j, "minus", -40.0, 40.0, TOL)
        assert tr.poles == []
        assert np.abs(tr.u_values).min() > 0

    def test_poles_separated_and_inside(self):
        # on the excluded line the solution carries a train of real poles
        tr = trace_tritronquee(0.5 - 1.2j, "minus", -15.0, 40.0, TOL)
        locs = [r.location for r in tr.poles]
        assert len(locs) >= 5
        assert all(tr.x_min < x < tr.x_max for x in locs)
        assert all(b - a > 2 * EXCISION_RADIUS for a, b in zip(sorted(locs)[:-1], sorted(locs)[1:]))
        for x in tr.x_grid[::5]:
            if not tr.near_pole(x):
                assert residual_ok(tr, x)
        for rec in tr.poles:
            s = 1e-4
            assert rec.residue in (-1, 1)
            assert abs(s * rec.laurent(s) - rec.residue) < 1e-6

    def test_seed_point_independence(self):
        a = trace_tritronquee(0.3, "minus", -20.0, 40.0, TOL)
        b = trace_tritronquee(0.3, "minus", -20.0, 40.0, TOL, x0=50.0)
        assert np.abs(a.u_values - b.u_values).max() <= 50 * TOL

    def test_tolerance_halving(self):
        a = trace_tritronquee(0.3, "minus", -20.0, 40.0, 2e-10)
        b = trace_tritronquee(0.3, "minus", -20.0, 40.0, 1e-10)
        assert np.abs(a.u_values - b.u_values).max() <= 10 * 1e-10

    def test_sign_symmetry(self):
        alpha = 0.2 + 0.1j
        plus = trace_tritronquee(alpha, "plus", -20.0, 40.0, TOL)
        minus = trace_tritronquee(-alpha, "minus", -20.0, 40.0, TOL)
        assert np.abs(plus.u_values + minus.u_values).max() <= 100 * TOL

    def test_half_integer(self):
        with pytest.raises(HalfIntegerAlphaError):
            trace_tritronquee(0.5)

    def test_xmax_too_small(self):
        with pytest.raises(SeedQualityError):
            trace_tritronquee(0.0, xmax=10.0)


class TestUV:
    def test_zero(self):
        tr = integrate_uv(0.0, (0.0, 0, 0, 0, 0), (-3.0, 3.0))
        assert np.abs(tr.U).max() == 0 and np.abs(tr.V).max() == 0

    @pytest.fixture(scope="class")
    @classmethod
    def uv(cls):
        from tritronquee.rhsolver import solve_w, uv_jet
        p = math.log(2) / (2 * math.pi)
        sol = solve_w(p, 1.0, 0.0)
        U, dU, V, dV = uv_jet(sol)
        return p, integrate_uv(p, (0.0, U, dU, V, dV), (-6.0, 6.0), tol=1e-10)

    def test_constant_of_motion(self, uv):
        p, tr = uv
        assert np.abs(tr.constant_of_motion() - 1j * p / 3).max() <= 100 * 1e-10

    def test_q_equation(self, uv):
        p, tr = uv
        # Q'' from the system itself: Q = V'/V, V'' = yV/3 + 2V^2 U
        for y in np.linspace(-5, 5, 11):
            U, dU, V, dV = tr.evaluate(y)
            q0 = dV / V
            d2V = y * V / 3 + 2 * V * V * U
            d3V = V / 3 + y * dV / 3 + 4 * V * dV * U + 2 * V * V * dU
            dq = d2V / V - q0 ** 2
            d2 = d3V / V - d2V * dV / V ** 2 - 2 * q0 * dq
            res = d2 + 2 / 3 * y * q0 - 2 * q0 ** 3 - 2j / 3 * p - 1 / 3
            assert abs(res) <= 1e-6
