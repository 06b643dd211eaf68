"""Complex scalar utilities: 2x2 matrices, log-gamma, principal powers and
the parabolic cylinder function U(a, t).

Everything here runs in plain double precision with ``cmath``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

PI = math.pi
SQRT_2PI = math.sqrt(2.0 * PI)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * PI)


# ---------------------------------------------------------------------------
# 2x2 complex matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Complex2x2:
    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @classmethod
    def identity(cls) -> "Complex2x2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diag(cls, d1: complex, d2: complex) -> "Complex2x2":
        return cls(d1, 0.0, 0.0, d2)

    @classmethod
    def lower(cls, x: complex) -> "Complex2x2":
        return cls(1.0, 0.0, x, 1.0)

    @classmethod
    def upper(cls, x: complex) -> "Complex2x2":
        return cls(1.0, x, 0.0, 1.0)

    @classmethod
    def from_array(cls, a) -> "Complex2x2":
        a = np.asarray(a, dtype=complex)
        return cls(complex(a[0, 0]), complex(a[0, 1]), complex(a[1, 0]), complex(a[1, 1]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def inverse(self) -> "Complex2x2":
        d = self.det()
        if d == 0:
            raise DomainError("singular 2x2 matrix")
        return Complex2x2(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)

    def __matmul__(self, other: "Complex2x2") -> "Complex2x2":
        return Complex2x2(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def __add__(self, other: "Complex2x2") -> "Complex2x2":
        return Complex2x2(self.m11 + other.m11, self.m12 + other.m12,
                          self.m21 + other.m21, self.m22 + other.m22)

    def __sub__(self, other: "Complex2x2") -> "Complex2x2":
        return Complex2x2(self.m11 - other.m11, self.m12 - other.m12,
                          self.m21 - other.m21, self.m22 - other.m22)

    def scale(self, c: complex) -> "Complex2x2":
        return Complex2x2(c * self.m11, c * self.m12, c * self.m21, c * self.m22)

    def conjugate_by(self, g: "Complex2x2") -> "Complex2x2":
        """Return g @ self @ g^{-1}."""
        return g @ self @ g.inverse()

    def norm(self) -> float:
        """Max-abs entry norm."""
        return max(abs(self.m11), abs(self.m12), abs(self.m21), abs(self.m22))

    def assert_unit_det(self, tol: float) -> None:
        err = abs(self.det() - 1.0)
        if err > tol:
            raise DomainError(f"determinant deviates from 1 by {err:.3e} (tol {tol:.1e})")


SIGMA1 = Complex2x2(0.0, 1.0, 1.0, 0.0)
SIGMA3 = Complex2x2(1.0, 0.0, 0.0, -1.0)


# ---------------------------------------------------------------------------
# Principal powers
# ---------------------------------------------------------------------------


def principal_log(z: complex) -> complex:
    """Log with imaginary part in (-pi, pi]."""
    z = complex(z)
    if z == 0:
        raise DomainError("log of zero")
    # cmath.log puts -0.0 imaginary parts on the -pi side; normalise that.
    if z.imag == 0.0 and z.real < 0:
        return complex(math.log(-z.real), PI)
    return cmath.log(z)


def principal_pow(base: complex, exponent: complex) -> complex:
    """exp(exponent * Log(base)) with the principal branch of Log."""
    base = complex(base)
    exponent = complex(exponent)
    if base == 0:
        if exponent.real > 0:
            return 0j
        raise DomainError("principal_pow: zero base with Re(exponent) <= 0")
    if exponent.imag == 0.0 and exponent.real == int(exponent.real) and abs(exponent.real) <= 64:
        # integer powers by repeated multiplication (exact for small m)
        m = int(exponent.real)
        r = 1.0 + 0j
        b = base if m >= 0 else 1.0 / base
        for _ in range(abs(m)):
            r *= b
        return r
    return cmath.exp(exponent * principal_log(base))


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 7, n = 9.  Coefficients as tabulated by
# P. Godfrey (also reproduced in Numerical Recipes, 3rd ed., sec. 6.1
# discussion and in the Wikipedia article "Lanczos approximation").
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _is_gamma_pole(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0 and z.real == math.floor(z.real)


def _reduce_imag(w: complex) -> complex:
    im = math.remainder(w.imag, 2.0 * PI)
    if im <= -PI:
        im += 2.0 * PI
    return complex(w.real, im)


def _lngamma_right(z: complex) -> complex:
    # valid for Re z >= 1/2
    z = z - 1.0
    x = _LANCZOS_COEF[0]
    for i in range(1, 9):
        x += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return LOG_SQRT_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def _log_sin_pi(z: complex) -> complex:
    """log(sin(pi z)) modulo 2 pi i, without overflow for large |Im z|."""
    if abs(z.imag) < 20.0:
        return cmath.log(cmath.sin(PI * z))
    if z.imag > 0:
        return -1j * PI * z + cmath.log(1.0 - cmath.exp(2j * PI * z)) - cmath.log(-2j)
    return 1j * PI * z + cmath.log(1.0 - cmath.exp(-2j * PI * z)) - cmath.log(2j)


def lngamma(z: complex) -> complex:
    """Principal logarithm of Gamma(z): log|Gamma(z)| + i arg Gamma(z), arg in (-pi, pi].

    Raises DomainError at the poles z = 0, -1, -2, ...
    """
    z = complex(z)
    if _is_gamma_pole(z):
        raise DomainError(f"lngamma: z = {int(z.real)} is a pole of the gamma function")
    if z.real >= 0.5:
        w = _lngamma_right(z)
    else:
        w = math.log(PI) - _log_sin_pi(z) - _lngamma_right(1.0 - z)
    return _reduce_imag(w)


def gamma(z: complex) -> complex:
    return cmath.exp(lngamma(z))


def rgamma(z: complex) -> complex:
    """1/Gamma(z), entire; zero at the poles of Gamma."""
    z = complex(z)
    if _is_gamma_pole(z):
        return 0j
    return cmath.exp(-lngamma(z))


# ---------------------------------------------------------------------------
# Parabolic cylinder function U(a, t)
# ---------------------------------------------------------------------------

_ASYM_RADIUS = 12.0   # |t| beyond which the asymptotic series is used
_TAYLOR_RADIUS = 2.0  # |t| up to which the Maclaurin series is used
_ASYM_MAX_TERMS = 20


def _weber_taylor(a: complex, t0: complex, u0: complex, du0: complex, h: complex):
    """Advance (U, U') of U'' = (t^2/4 + a) U from t0 to t0 + h by a Taylor series."""
    k0 = t0 * t0 / 4.0 + a
    k1 = t0 / 2.0
    c = [complex(u0), complex(du0)]
    val = c[0] + c[1] * h
    der = c[1]
    hp = h
    small = 0
    for n in range(200):
        # (n+2)(n+1) c_{n+2} = k0 c_n + k1 c_{n-1} + c_{n-2}/4
        cm1 = c[n - 1] if n >= 1 else 0j
        cm2 = c[n - 2] if n >= 2 else 0j
        cnew = (k0 * c[n] + k1 * cm1 + 0.25 * cm2) / ((n + 2) * (n + 1))
        c.append(cnew)
        der_term = (n + 2) * cnew * hp
        hp = hp * h
        val_term = cnew * hp
        val += val_term
        der += der_term
        scale = max(abs(val), abs(der), 1e-300)
        if abs(val_term) < 1e-17 * scale and abs(der_term) < 1e-17 * scale:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    return val, der


def _u_at_zero(a: complex):
    u0 = math.sqrt(PI) * rgamma(0.75 + a / 2.0) / principal_pow(2.0, a / 2.0 + 0.25)
    du0 = -math.sqrt(PI) * rgamma(0.25 + a / 2.0) / principal_pow(2.0, a / 2.0 - 0.25)
    return u0, du0


def _u_asym_value(a: complex, t: complex) -> complex:
    z2 = 2.0 * t * t
    term = 1.0 + 0j
    total = 1.0 + 0j
    last = abs(term)
    for j in range(_ASYM_MAX_TERMS):
        term = -term * (0.5 + a + 2 * j) * (1.5 + a + 2 * j) / ((j + 1) * z2)
        if abs(term) > last:
            break  # passed the smallest term
        total += term
        last = abs(term)
        if last < 1e-17 * abs(total):
            break
    return cmath.exp(-t * t / 4.0) * principal_pow(t, -a - 0.5) * total


def _u_asym(a: complex, t: complex):
    u = _u_asym_value(a, t)
    # U'(a,t) = -(t/2) U(a,t) - (a + 1/2) U(a+1,t)
    du = -0.5 * t * u - (a + 0.5) * _u_asym_value(a + 1.0, t)
    return u, du


def _march(a: complex, t_from: complex, u: complex, du: complex, t_to: complex, hmax: float = 1.0):
    dist = abs(t_to - t_from)
    nsteps = max(1, int(math.ceil(dist / hmax)))
    h = (t_to - t_from) / nsteps
    t = t_from
    for _ in range(nsteps):
        u, du = _weber_taylor(a, t, u, du, h)
        t = t + h
    return u, du


def _u_far(a: complex, t: complex):
    """(U, U') for |t| >= _ASYM_RADIUS."""
    arg = principal_log(t).imag
    if abs(arg) <= 0.625 * PI:
        return _u_asym(a, t)
    # beyond 5pi/4 / 8 the Stokes contribution matters: DLMF 12.2.18
    z = -t
    phi = PI * (a / 2.0 - 0.25)
    rg = rgamma(0.5 + a)
    if arg > 0:
        v, dv = _u_asym(-a, 1j * z)
        w, dw = _u_asym(a, z)
        e = cmath.exp(-1j * phi)
        # d/dt of U(-a, i z) with z = -t is -i U'(-a, i z); of U(a, z) is -U'(a, z)
        u = e * (SQRT_2PI * v * rg - e * w)
        du = e * (SQRT_2PI * (-1j) * dv * rg + e * dw)
        return u, du
    v, dv = _u_asym(-a, -1j * z)
    w, dw = _u_asym(a, z)
    e = cmath.exp(1j * phi)
    u = e * (SQRT_2PI * v * rg - e * w)
    du = e * (SQRT_2PI * 1j * dv * rg + e * dw)
    return u, du


def _outward_recessive(a: complex, direction: complex) -> bool:
    """Whether U decays relative to the companion solution along the ray
    from |t| = _TAYLOR_RADIUS to |t| = _ASYM_RADIUS."""

    if abs(cmath.phase(direction)) > 0.75 * PI:
        # past the Stokes line U picks up the dominant solution
        return False

    def rel(r):
        t = direction * r
        return (-t * t / 2.0 - 2.0 * a * cmath.log(t)).real

    return rel(_ASYM_RADIUS) < rel(_TAYLOR_RADIUS)


def _pcf_u_jet(a: complex, t: complex):
    """(U(a,t), U'(a,t)) for any t."""
    r = abs(t)
    if r <= _TAYLOR_RADIUS:
        u0, du0 = _u_at_zero(a)
        if r == 0:
            return u0, du0
        return _weber_taylor(a, 0j, u0, du0, t)
    if r >= _ASYM_RADIUS:
        return _u_far(a, t)
    ph = t / r
    if _outward_recessive(a, ph):
        ts = ph * _ASYM_RADIUS
        u, du = _u_far(a, ts)
        return _march(a, ts, u, du, t)
    ts = ph * _TAYLOR_RADIUS
    u0, du0 = _u_at_zero(a)
    u, du = _weber_taylor(a, 0j, u0, du0, ts)
    return _march(a, ts, u, du, t)


def pcf_u_and_derivative(a: complex, t: complex):
    """Return (U(a,t), dU/dt)."""
    return _pcf_u_jet(complex(a), complex(t))


def pcf_u(a: complex, t: complex) -> complex:
    """Parabolic cylinder function U(a, t), the solution of Weber's equation
    U'' = (t^2/4 + a) U that is recessive as t -> +infinity.

    Regimes: Maclaurin series for |t| <= 2; the asymptotic series
    U ~ e^{-t^2/4} t^{-a-1/2} sum_j (-1)^j (1/2+a)_{2j} / (j! (2t^2)^j)
    for |t| >= 12 (with the connection formula DLMF 12.2.18 once
    |arg t| > 5pi/8); in between, Taylor marching of Weber's equation along
    the ray, started from whichever end makes the march stable.
    """
    return _pcf_u_jet(complex(a), complex(t))[0]
