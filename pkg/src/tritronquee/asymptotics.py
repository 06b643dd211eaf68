"""Closed-form asymptotic evaluators.

* the large-positive-x series u ~ sum_k a_k x^{1/2 - 3k/2},
* the three large-negative-x branches (two decaying, one oscillatory),
* the large-|y| formulas for V(y) and Q(y) of the (U, V) system.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DegenerateParameterError, DomainError, UnsupportedRegimeError
from .numerics import PI, gamma, lngamma, principal_log, principal_pow
from .params import Regime, Sign, TritronqueeSpec

MAX_SERIES_ORDER = 8
SQRT_PI = math.sqrt(PI)


# ---------------------------------------------------------------------------
# x -> +infinity
# ---------------------------------------------------------------------------


def series_exponent(k: int) -> float:
    return 0.5 - 1.5 * k


def series_coefficients(alpha: complex, sign=Sign.MINUS, order: int = 2) -> list[complex]:
    """First ``order`` coefficients a_k of u ~ sum a_k x^{1/2 - 3k/2}.

    Obtained by substituting the series into u'' = x u + 2 u^3 - alpha and
    matching the power x^{3/2 - 3n/2}:
        -2 a_n + 2 S'_n - alpha [n = 1] = e_{n-2} (e_{n-2} - 1) a_{n-2},
    where S'_n collects the cubic products whose indices are all below n.
    """
    sign = Sign.parse(sign)
    if not 1 <= order <= MAX_SERIES_ORDER:
        raise DomainError(f"series order must lie in [1, {MAX_SERIES_ORDER}], got {order}")
    alpha = complex(alpha)
    a0 = (1j if sign is Sign.PLUS else -1j) / math.sqrt(2.0)
    a = [a0]
    for n in range(1, order):
        s = 0j
        for i in range(n):
            for j in range(n):
                l = n - i - j
                if 0 <= l < n:
                    s += a[i] * a[j] * a[l]
        rhs = 0j
        if n >= 2:
            e = series_exponent(n - 2)
            rhs = e * (e - 1.0) * a[n - 2]
        a.append((2.0 * s - (alpha if n == 1 else 0.0) - rhs) / 2.0)
    return a


def _check_sector(x: complex) -> None:
    if x == 0 or abs(principal_log(x).imag) >= 2.0 * PI / 3.0:
        raise DomainError(f"x = {x} lies outside the sector |arg x| < 2pi/3")
    if abs(x) < 1.0:
        raise DomainError(f"|x| = {abs(x)} is below 1; the series is not meaningful there")


def u_plus_series_jet(x: complex, alpha: complex, sign=Sign.MINUS, order: int = 2):
    """(u, u') from the truncated series and its term-by-term derivative."""
    x = complex(x)
    _check_sector(x)
    coeffs = series_coefficients(alpha, sign, order)
    u = 0j
    du = 0j
    for k, c in enumerate(coeffs):
        e = series_exponent(k)
        xe = principal_pow(x, e)
        u += c * xe
        du += c * e * xe / x
    return u, du


def u_plus_series(x: complex, alpha: complex, sign=Sign.MINUS, order: int = 2) -> complex:
    return u_plus_series_jet(x, alpha, sign, order)[0]


def pii_residual(x: complex, u: complex, d2u: complex, alpha: complex) -> complex:
    return d2u - x * u - 2.0 * u ** 3 + alpha


def series_residual(x: complex, alpha: complex, sign=Sign.MINUS, order: int = 2) -> complex:
    """Residual of the truncated series in the ODE, using exact term-by-term
    second derivatives."""
    coeffs = series_coefficients(alpha, sign, order)
    u = 0j
    d2 = 0j
    for k, c in enumerate(coeffs):
        e = series_exponent(k)
        xe = principal_pow(x, e)
        u += c * xe
        d2 += c * e * (e - 1.0) * xe / (x * x)
    return pii_residual(x, u, d2, alpha)


# ---------------------------------------------------------------------------
# x -> -infinity
# ---------------------------------------------------------------------------


def decaying_minus_branch(x: float, q: complex, tau: complex) -> complex:
    """qGamma(iq)e^{-pi q/2}/(2 tau sqrt(pi)) e^{3pi i/4} 8^{-iq} e^{2i X^{3/2}/3} X^{-1/4-3iq/2}, X = -x."""
    X = -float(x)
    pref = q * gamma(1j * q) * cmath.exp(-PI * q / 2.0) / (2.0 * tau * SQRT_PI)
    return (pref * cmath.exp(0.75j * PI) * principal_pow(8.0, -1j * q)
            * cmath.exp(2j * X ** 1.5 / 3.0) * principal_pow(X, -0.25 - 1.5j * q))


def decaying_plus_branch(x: float, q: complex, tau: complex) -> complex:
    """tau sqrt(pi) e^{pi q/2}/Gamma(iq) e^{-3pi i/4} 8^{iq} e^{-2i X^{3/2}/3} X^{-1/4+3iq/2}, X = -x."""
    X = -float(x)
    pref = tau * SQRT_PI * cmath.exp(PI * q / 2.0) / gamma(1j * q)
    return (pref * cmath.exp(-0.75j * PI) * principal_pow(8.0, 1j * q)
            * cmath.exp(-2j * X ** 1.5 / 3.0) * principal_pow(X, -0.25 + 1.5j * q))


def theta(x: float, q: float) -> float:
    """-(2/3)X^{3/2} + (3/2) q ln X - pi/4 + 3 q ln 2 - arg Gamma(iq), X = -x."""
    q = float(q.real) if isinstance(q, complex) else float(q)
    if q == 0.0:
        raise DegenerateParameterError("theta needs q != 0 (arg Gamma(0) is undefined)")
    X = -float(x)
    if X <= 0:
        raise DomainError("theta is defined for x < 0")
    arg_g = lngamma(1j * q).imag
    return -2.0 / 3.0 * X ** 1.5 + 1.5 * q * math.log(X) - PI / 4.0 + 3.0 * q * math.log(2.0) - arg_g


def oscillatory_amplitude(q: float, tau: complex) -> complex:
    """tau sqrt(2 q (e^{2 pi q} - 1))."""
    return tau * math.sqrt(2.0 * q * math.expm1(2.0 * PI * q))


def oscillatory_branch(x: float, q: float, tau: complex) -> complex:
    q = float(q.real) if isinstance(q, complex) else float(q)
    X = -float(x)
    return oscillatory_amplitude(q, tau) * X ** -0.25 * math.sin(theta(x, q))


@dataclass(frozen=True)
class MinusInfinityFormula:
    q: complex
    tau: complex
    branch: Regime

    @classmethod
    def from_spec(cls, spec: TritronqueeSpec) -> "MinusInfinityFormula":
        if spec.regime in (Regime.EXCLUDED_LINE, Regime.HALF_INTEGER_ALPHA):
            raise UnsupportedRegimeError(f"no x -> -infinity formula in regime {spec.regime.value}")
        return cls(spec.q, spec.tau, spec.regime)

    def __call__(self, x: float) -> complex:
        if self.branch is Regime.DECAYING_MINUS:
            return decaying_minus_branch(x, self.q, self.tau)
        if self.branch is Regime.DECAYING_PLUS:
            return decaying_plus_branch(x, self.q, self.tau)
        return oscillatory_branch(x, self.q.real, self.tau)


def u_minus_asym(x: float, spec: TritronqueeSpec) -> complex:
    """Leading x -> -infinity term for u_TT^sign(x; alpha) (x <= -5)."""
    if x > -5.0:
        raise DomainError(f"u_minus_asym needs x <= -5, got {x}")
    v = MinusInfinityFormula.from_spec(spec)(x)
    return v if spec.sign is Sign.MINUS else -v


# ---------------------------------------------------------------------------
# V(y), Q(y)
# ---------------------------------------------------------------------------


def v_asym_minus(y: float, p: complex, tau: complex) -> complex:
    """Leading y -> -infinity term of V(y)."""
    y = float(y)
    if y > -5.0:
        raise DomainError(f"v_asym_minus needs y <= -5, got {y}")
    p = complex(p)
    if abs(cmath.exp(2.0 * PI * p) - 1.0) < 1e-14:
        raise DegenerateParameterError("p lies in iZ")
    pref = tau * p * gamma(1j * p) / (2.0 * SQRT_PI)
    return (pref * cmath.exp(-0.75j * PI) * cmath.exp(-PI * p / 2.0) * principal_pow(2.0, -1j * p)
            * cmath.exp(-2j * (-y / 3.0) ** 1.5) * principal_pow(-3.0 * y, -0.5j * p - 0.25))


def v_asym_plus(y: float, p: complex) -> complex:
    """-(y/6)^{ip + 1/2}."""
    y = float(y)
    if y < 5.0:
        raise DomainError(f"v_asym_plus needs y >= 5, got {y}")
    return -principal_pow(y / 6.0, 1j * complex(p) + 0.5)


def q_asym_sector(y: complex, p: complex) -> complex:
    """i(-y/3)^{1/2} - (1/4 + i p/2)/y, for |arg(-y)| < 2pi/3."""
    y = complex(y)
    if y == 0 or abs(principal_log(-y).imag) >= 2.0 * PI / 3.0:
        raise DomainError(f"y = {y} lies outside |arg(-y)| < 2pi/3")
    if abs(y) < 5.0:
        raise DomainError(f"q_asym_sector needs |y| >= 5, got {abs(y)}")
    return 1j * principal_pow(-y / 3.0, 0.5) - (0.25 + 0.5j * complex(p)) / y
