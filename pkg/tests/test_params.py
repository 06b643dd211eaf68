import cmath
import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tritronquee.errors import DegenerateParameterError, HalfIntegerAlphaError
from tritronquee.params import (Regime, Sign, TritronqueeSpec, classify_regime, ell_map,
                                is_half_integer, nearest_int_half_down, p_from_alpha, q_tau)

LN2_2PI = math.log(2.0) / (2.0 * math.pi)

alphas = st.complex_numbers(max_magnitude=4.0, allow_nan=False, allow_infinity=False).filter(
    lambda a: abs(a.real - 0.5 - round(a.real - 0.5)) > 1e-3 or abs(a.imag) > 1e-3)


@pytest.mark.parametrize("x, n", [(0.5, 0), (1.49, 1), (-0.5, -1), (2.5, 2), (-1.51, -2), (0.0, 0)])
def test_nearest_int_half_down(x, n):
    assert nearest_int_half_down(x) == n


def test_nearest_int_rejects_nan():
    with pytest.raises(ValueError):
        nearest_int_half_down(float("nan"))


def test_alpha_zero():
    _, q, tau = q_tau(0)
    assert abs(q + LN2_2PI) < 1e-12
    assert abs(tau - 1j * math.sqrt(2)) < 1e-12


def test_rogue_wave_parameter():
    _, q, tau = q_tau(0.5 + 1j * LN2_2PI)
    assert abs(q - LN2_2PI) < 1e-12
    assert abs(tau - 1) < 1e-12


def test_strip_maps_into_right_half():
    _, q, _ = q_tau(0.1)
    assert 0 < (1j * q).real < 0.5
    assert classify_regime(0.1) is Regime.DECAYING_PLUS
    assert classify_regime(-0.1) is Regime.DECAYING_MINUS


@pytest.mark.parametrize("alpha, regime", [
    (0.5 - 0.3j, Regime.EXCLUDED_LINE),
    (2 + 0.7j, Regime.OSCILLATORY_REAL),
    (0.5 + 0.2j, Regime.OSCILLATORY_REAL),
    (0.5, Regime.HALF_INTEGER_ALPHA),
    (-3.5, Regime.HALF_INTEGER_ALPHA),
    (0, Regime.OSCILLATORY_REAL),
])
def test_classification(alpha, regime):
    assert classify_regime(alpha) is regime


@pytest.mark.parametrize("alpha", [0.5, -1.5, 7.5])
def test_half_integer_raises(alpha):
    assert is_half_integer(alpha)
    with pytest.raises(HalfIntegerAlphaError):
        q_tau(alpha)


def test_plus_family_uses_negated_alpha():
    s = TritronqueeSpec.from_alpha(0.3 + 0.2j, "plus")
    assert s.sign is Sign.PLUS
    assert s.alpha_minus == -(0.3 + 0.2j)
    assert s.q == q_tau(-(0.3 + 0.2j))[1]


@settings(max_examples=150)
@given(alphas)
def test_imag_q_window(alpha):
    _, q, _ = q_tau(alpha)
    r = (1j * q).real
    if classify_regime(alpha) is Regime.EXCLUDED_LINE:
        assert abs(abs(r) - 0.5) < 1e-12
    else:
        assert -0.5 < r <= 0.5


def test_half_down_rounding_on_excluded_line():
    # Im q0 = -3/2 exactly; [-3/2] = -2 puts Re(iq) at -1/2, the excluded line
    _, q, _ = q_tau(1.5 - 1j)
    assert abs((1j * q).real + 0.5) < 1e-12
    assert classify_regime(1.5 - 1j) is Regime.EXCLUDED_LINE


@settings(max_examples=150)
@given(alphas)
def test_tau_squared_identity(alpha):
    _, _, tau = q_tau(alpha)
    assert abs(tau * tau + 1 + cmath.exp(-2j * math.pi * alpha)) <= 1e-12 * max(1.0, abs(tau) ** 2)


@settings(max_examples=150)
@given(alphas)
def test_q_shift_is_integer(alpha):
    q0, q, _ = q_tau(alpha)
    n = (q0 - q) / 1j
    assert abs(n.imag) < 1e-12
    assert abs(n.real - round(n.real)) < 1e-12


@settings(max_examples=100)
@given(alphas)
def test_p_link(alpha):
    _, q, tau = q_tau(alpha)
    p = p_from_alpha(alpha)
    lhs = cmath.exp(2 * math.pi * (p - q))
    assert abs(lhs - tau * tau) <= 1e-11 * max(1.0, abs(tau) ** 2)


@settings(max_examples=100)
@given(alphas)
def test_regime_periodic(alpha):
    assume(abs(abs((1j * q_tau(alpha)[1]).real) - 0.5) > 1e-9)
    assert classify_regime(alpha) is classify_regime(alpha + 1)


class TestEllMap:
    def test_rogue(self):
        m = ell_map(LN2_2PI)
        assert abs(m.ell) < 1e-14
        assert abs(m.q_prime - LN2_2PI) < 1e-14
        assert abs(m.mu - 1) < 1e-14

    def test_p02(self):
        m = ell_map(0.2)
        assert abs(m.ell - 0.5 * math.log(math.exp(0.4 * math.pi) - 1)) < 1e-14
        band = (2j * 0.2 + 2 * m.ell / (1j * math.pi)).real
        assert abs(band) < 1e-14

    @pytest.mark.parametrize("p", [0, 1j, -2j])
    def test_degenerate(self, p):
        with pytest.raises(DegenerateParameterError):
            ell_map(p)

    @settings(max_examples=150)
    @given(st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False))
    def test_invariants(self, p):
        assume(abs(cmath.exp(2 * math.pi * p) - 1) > 1e-6)
        m = ell_map(p)
        assert abs(cmath.exp(2 * m.ell) - (cmath.exp(2 * math.pi * p) - 1)) < 1e-11 * max(1, abs(cmath.exp(2 * m.ell)))
        band = (2j * p + 2 * m.ell / (1j * math.pi)).real
        assert -1 < band <= 1 + 1e-12
        assert abs(m.mu ** 2 - (cmath.exp(2 * math.pi * m.q_prime) - 1)) <= 1e-12 * max(1.0, abs(m.mu) ** 2)
