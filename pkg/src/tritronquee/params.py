"""Parameter maps alpha -> (q0, q, tau), regime classification, and the
(p, ell) -> (q', mu) map used to match the parabolic cylinder parametrix.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import DegenerateParameterError, HalfIntegerAlphaError
from .numerics import PI, principal_log

CLASSIFY_TOL = 1e-12


class Sign(str, Enum):
    PLUS = "plus"
    MINUS = "minus"

    @classmethod
    def parse(cls, value) -> "Sign":
        if isinstance(value, Sign):
            return value
        v = str(value).strip().lower()
        if v in ("+", "plus", "p", "+1", "1"):
            return cls.PLUS
        if v in ("-", "minus", "m", "-1"):
            return cls.MINUS
        raise ValueError(f"unknown sign {value!r}")


class Regime(str, Enum):
    OSCILLATORY_REAL = "OscillatoryReal"
    DECAYING_MINUS = "DecayingMinus"
    DECAYING_PLUS = "DecayingPlus"
    EXCLUDED_LINE = "ExcludedLine"
    HALF_INTEGER_ALPHA = "HalfIntegerAlpha"


def nearest_int_half_down(x: float) -> int:
    """Nearest integer to x, with n + 1/2 mapped to n."""
    if not math.isfinite(x):
        raise ValueError("nearest_int_half_down needs a finite argument")
    return int(math.ceil(x - 0.5))


def is_half_integer(alpha: complex, tol: float = 1e-14) -> bool:
    alpha = complex(alpha)
    if abs(alpha.imag) > tol:
        return False
    f = alpha.real - 0.5
    return abs(f - round(f)) <= tol


def _log1p_exp(w: complex) -> complex:
    """Principal Log(1 + e^w), safe for large Re w."""
    if w.real < 30.0:
        return principal_log(1.0 + cmath.exp(w))
    v = w + cmath.log(1.0 + cmath.exp(-w))
    im = math.remainder(v.imag, 2.0 * PI)
    if im <= -PI:
        im += 2.0 * PI
    return complex(v.real, im)


def q_tau(alpha: complex):
    """Return (q0, q, tau) for the minus family at parameter alpha.

    q0 = -i alpha - Log(1 + e^{-2 pi i alpha}) / (2 pi)
    q  = q0 - i [Im q0]
    tau = i (-1)^{[Im q0]} exp(Log(1 + e^{-2 pi i alpha}) / 2)
    """
    alpha = complex(alpha)
    if is_half_integer(alpha):
        raise HalfIntegerAlphaError(
            f"alpha = {alpha} lies in Z + 1/2, where the Riemann-Hilbert representation is indeterminate")
    L = _log1p_exp(-2j * PI * alpha)
    q0 = -1j * alpha - L / (2.0 * PI)
    n = nearest_int_half_down(q0.imag)
    q = q0 - 1j * n
    tau = 1j * (-1) ** (n % 2) * cmath.exp(L / 2.0)
    return q0, q, tau


def regime_from_q(q: complex, tol: float = CLASSIFY_TOL) -> Regime:
    r = (1j * q).real
    if abs(abs(r) - 0.5) <= tol:
        # the half-down rounding can land on Re(iq) = -1/2 as well as +1/2
        return Regime.EXCLUDED_LINE
    if abs(r) <= tol:
        return Regime.OSCILLATORY_REAL
    if r < 0:
        return Regime.DECAYING_MINUS
    return Regime.DECAYING_PLUS


def classify_regime(alpha: complex, tol: float = CLASSIFY_TOL) -> Regime:
    alpha = complex(alpha)
    if is_half_integer(alpha):
        return Regime.HALF_INTEGER_ALPHA
    return regime_from_q(q_tau(alpha)[1], tol)


@dataclass(frozen=True)
class TritronqueeSpec:
    """Parameters of u_TT^sign(x; alpha).

    q, tau and regime always describe the minus-family solution
    u_TT^-(x; alpha_minus), where alpha_minus = alpha for sign minus and
    -alpha for sign plus (u_TT^+(x; alpha) = -u_TT^-(x; -alpha)).
    """

    alpha: complex
    sign: Sign
    q: complex
    tau: complex
    q0: complex
    regime: Regime

    @property
    def alpha_minus(self) -> complex:
        return self.alpha if self.sign is Sign.MINUS else -self.alpha

    @classmethod
    def from_alpha(cls, alpha: complex, sign=Sign.MINUS) -> "TritronqueeSpec":
        alpha = complex(alpha)
        sign = Sign.parse(sign)
        am = alpha if sign is Sign.MINUS else -alpha
        q0, q, tau = q_tau(am)
        return cls(alpha, sign, q, tau, q0, regime_from_q(q))


@dataclass(frozen=True)
class EllMap:
    p: complex
    ell: complex
    q_prime: complex
    mu: complex


def ell_map(p: complex) -> EllMap:
    """The unique ell with e^{2 ell} = e^{2 pi p} - 1 and
    -1 < Re(2 i p + 2 ell / (i pi)) <= 1, with q' = p - ell/pi, mu = e^{-ell}."""
    p = complex(p)
    w = cmath.exp(2.0 * PI * p) - 1.0
    if abs(w) < 1e-14:
        raise DegenerateParameterError(f"p = {p} lies in iZ: no solution of the parameter map")
    ell0 = 0.5 * principal_log(w)
    c0 = (2j * p + 2.0 * ell0 / (1j * PI)).real
    k = math.floor((1.0 - c0) / 2.0)
    ell = ell0 + 1j * PI * k
    return EllMap(p=p, ell=ell, q_prime=p - ell / PI, mu=cmath.exp(-ell))


def p_from_alpha(alpha: complex) -> complex:
    """alpha = 1/2 + i p."""
    return -1j * (complex(alpha) - 0.5)


def alpha_from_p(p: complex) -> complex:
    return 0.5 + 1j * complex(p)
