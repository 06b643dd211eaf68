"""The parabolic cylinder parametrix P(lambda; p, tau).

P is built sector by sector from U(a, t), t = sqrt(2) e^{-i pi/4} lambda,
a = 1/2 - ip.  The five sectors are
    S_0: |arg| < pi/4,  S_{+-1}: pi/4 < +-arg < 3pi/4,  S_{+-2}: 3pi/4 < +-arg < pi,
and P = Q e^{i lambda^2 sigma3 / 2} with Q given by fixed combinations of
U(+-a, .) and U(+-a - 1, .) in each sector.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameterError, DomainError
from .numerics import PI, Complex2x2, gamma, pcf_u, principal_pow

SQRT2 = math.sqrt(2.0)
SQRT_PI = math.sqrt(PI)
LN2 = math.log(2.0)
SECTORS = (0, 1, -1, 2, -2)


@dataclass(frozen=True)
class PCCoefficients:
    """Sector coefficients; B-type values are stored multiplied by r."""

    p: complex
    tau: complex
    a: complex
    r: complex
    s: complex
    A2_0: complex
    A2_m1: complex
    B1_0: complex
    B1_1: complex

    @property
    def trivial(self) -> bool:
        return self.p == 0


def pc_coefficients(p: complex, tau: complex, tol: float = 1e-12) -> PCCoefficients:
    p = complex(p)
    tau = complex(tau)
    if p == 0:
        return PCCoefficients(p, tau, 0.5, 0j, 0j, 0j, 0j, 0j, 0j)
    if abs(cmath.exp(2.0 * PI * p) - 1.0) < 1e-14:
        raise DegenerateParameterError(f"p = {p} lies in iZ: the parametrix problem has no solution")
    if abs(tau * tau - (cmath.exp(2.0 * PI * p) - 1.0)) > tol * max(1.0, abs(tau) ** 2):
        raise DomainError(f"tau^2 must equal e^(2 pi p) - 1 (p = {p}, tau = {tau})")
    eln = cmath.exp(1j * p * LN2)
    r = 2.0 * cmath.exp(0.25j * PI) * SQRT_PI * cmath.exp(PI * p / 2.0) * eln / (tau * gamma(1j * p))
    s = -2.0 * p / r
    half = cmath.exp(0.5j * p * LN2)
    return PCCoefficients(
        p=p, tau=tau, a=0.5 - 1j * p, r=r, s=s,
        A2_0=cmath.exp(-0.75j * PI) / SQRT2 * cmath.exp(-PI * p / 4.0) / half,
        A2_m1=cmath.exp(0.25j * PI) / SQRT2 * cmath.exp(0.75 * PI * p) / half,
        B1_0=cmath.exp(-PI * p / 4.0) * half,
        B1_1=cmath.exp(0.75 * PI * p) * half,
    )


def sector_of(lam: complex) -> int:
    ang = cmath.phase(lam)
    if abs(ang) < PI / 4:
        return 0
    if PI / 4 <= ang < 3 * PI / 4:
        return 1
    if -3 * PI / 4 < ang <= -PI / 4:
        return -1
    return 2 if ang > 0 else -2


def eval_q(lam: complex, c: PCCoefficients, sector: int | None = None) -> Complex2x2:
    """Q(lambda) from the formulas of the given sector (by default the sector
    containing lambda; forcing it gives boundary values on a ray)."""
    lam = complex(lam)
    if c.trivial:
        e = cmath.exp(-0.5j * lam * lam)
        return Complex2x2.diag(e, 1.0 / e)
    k = sector_of(lam) if sector is None else sector
    a = c.a
    t = SQRT2 * cmath.exp(-0.25j * PI) * lam
    beta = cmath.exp(-2.0 * PI * c.p)
    s2 = SQRT2
    # first column
    if k in (0, -1):
        rb = c.B1_0
        q11 = rb * pcf_u(-a, 1j * t)
        q21 = s2 * cmath.exp(0.25j * PI) * (a - 0.5) * rb / c.r * pcf_u(1 - a, 1j * t)
    else:
        rb = c.B1_1 * (beta if k == -2 else 1.0)
        q11 = rb * pcf_u(-a, -1j * t)
        q21 = s2 * cmath.exp(-0.75j * PI) * (a - 0.5) * rb / c.r * pcf_u(1 - a, -1j * t)
    # second column
    if k in (0, 1):
        A = c.A2_0
        q12 = c.r * A * pcf_u(a, t)
        q22 = s2 * cmath.exp(0.75j * PI) * A * pcf_u(a - 1, t)
    else:
        A = c.A2_m1 * (beta if k == 2 else 1.0)
        q12 = c.r * A * pcf_u(a, -t)
        q22 = s2 * cmath.exp(-0.25j * PI) * A * pcf_u(a - 1, -t)
    return Complex2x2(q11, q12, q21, q22)


def eval_p(lam: complex, coeffs: PCCoefficients, sector: int | None = None) -> Complex2x2:
    """P(lambda) = Q(lambda) e^{i lambda^2 sigma3 / 2}."""
    lam = complex(lam)
    if coeffs.trivial:
        return Complex2x2.identity()
    e = cmath.exp(0.5j * lam * lam)
    q = eval_q(lam, coeffs, sector)
    return Complex2x2(q.m11 * e, q.m12 / e, q.m21 * e, q.m22 / e)


def normalized(lam: complex, coeffs: PCCoefficients, sector: int | None = None) -> Complex2x2:
    """P(lambda) lambda^{ip sigma3}."""
    P = eval_p(lam, coeffs, sector)
    d = principal_pow(complex(lam), 1j * coeffs.p)
    return Complex2x2(P.m11 * d, P.m12 / d, P.m21 * d, P.m22 / d)


# ---------------------------------------------------------------------------
# Jumps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PCRay:
    """Ray of the lambda-plane contour.  Orientation is toward increasing
    real part, so the + side (left) is the sector ``plus`` and the - side the
    sector ``minus``."""

    angle: float
    kind: str
    coefficient: complex
    exponent_sign: int
    plus: int
    minus: int

    def matrix(self, lam: complex) -> Complex2x2:
        if self.kind == "diag":
            return Complex2x2.diag(self.coefficient, 1.0 / self.coefficient)
        e = self.coefficient * cmath.exp(self.exponent_sign * 1j * lam * lam)
        return Complex2x2.lower(e) if self.kind == "lower" else Complex2x2.upper(e)


def pc_rays(p: complex, tau: complex) -> tuple[PCRay, ...]:
    beta = cmath.exp(-2.0 * PI * complex(p))
    return (
        PCRay(PI / 4, "lower", tau, +1, plus=1, minus=0),
        PCRay(-PI / 4, "upper", tau, -1, plus=0, minus=-1),
        PCRay(3 * PI / 4, "upper", -tau * beta, -1, plus=2, minus=1),
        PCRay(-3 * PI / 4, "lower", -tau * beta, +1, plus=-1, minus=-2),
        PCRay(PI, "diag", cmath.exp(2.0 * PI * complex(p)), 0, plus=2, minus=-2),
    )


def cyclic_product(p: complex, tau: complex) -> Complex2x2:
    """Jumps met on a counterclockwise loop around 0 starting in S_0: a ray
    crossed from its - side to its + side contributes V, otherwise V^{-1}.
    Equals I."""
    out = Complex2x2.identity()
    sector = 0
    for _ in range(5):
        forward = next((r for r in pc_rays(p, tau) if r.minus == sector and r.kind != "diag"), None)
        if forward is not None and forward.plus == _ccw_next(sector):
            out = out @ forward.matrix(0j)
        else:
            back = next(r for r in pc_rays(p, tau) if r.plus == sector and r.minus == _ccw_next(sector))
            out = out @ back.matrix(0j).inverse()
        sector = _ccw_next(sector)
    return out


def _ccw_next(sector: int) -> int:
    return {0: 1, 1: 2, 2: -2, -2: -1, -1: 0}[sector]


def pc_jump_residuals(coeffs: PCCoefficients, radii=(0.5, 1.0, 1.5)) -> dict:
    """max over radii of ||P_+ - P_- V|| on each ray, keyed by angle."""
    out = {}
    for ray in pc_rays(coeffs.p, coeffs.tau):
        worst = 0.0
        for rad in radii:
            lam = rad * cmath.exp(1j * ray.angle)
            if ray.kind == "diag":
                lam = complex(-rad, 0.0)
            Pp = eval_p(lam, coeffs, ray.plus)
            Pm = eval_p(lam, coeffs, ray.minus)
            worst = max(worst, (Pp - Pm @ ray.matrix(lam)).norm())
        out[ray.angle] = worst
    return out


def pc_connection_residual(coeffs: PCCoefficients, t: float) -> float:
    """|e^{i pi (a+1/2)/2} U(-a,-it) + e^{-i pi (a+1/2)/2} U(-a,it)
        - tau r e^{-i pi/4}/sqrt(2) e^{-pi p/2} e^{-ip ln 2} U(a,t)| at real t."""
    t = float(t)
    if not 0.5 <= t <= 6.0:
        raise DomainError("t must lie in [0.5, 6]")
    a, p = coeffs.a, coeffs.p
    ph = cmath.exp(0.5j * PI * (a + 0.5))
    lhs = ph * pcf_u(-a, -1j * t) + pcf_u(-a, 1j * t) / ph
    rhs = (coeffs.tau * coeffs.r * cmath.exp(-0.25j * PI) / SQRT2 * cmath.exp(-PI * p / 2.0)
           * cmath.exp(-1j * p * LN2) * pcf_u(a, t))
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Expansion checks
# ---------------------------------------------------------------------------


def leading_term(lam: complex, coeffs: PCCoefficients) -> Complex2x2:
    """I + (2i lambda)^{-1} [[0, r], [-s, 0]]."""
    f = 1.0 / (2j * complex(lam))
    return Complex2x2(1.0, f * coeffs.r, -f * coeffs.s, 1.0)


def expansion_error(lam: complex, coeffs: PCCoefficients) -> float:
    return (normalized(lam, coeffs) - leading_term(lam, coeffs)).norm()


def first_coefficient(coeffs: PCCoefficients, angle: float,
                      radii=(16.0, 20.0, 24.0, 28.0, 32.0, 36.0)) -> np.ndarray:
    """Estimate of P1 = lim lambda (P lambda^{ip sigma3} - I) along a ray,
    by Richardson extrapolation: a polynomial fit in 1/lambda."""
    direction = cmath.exp(1j * angle)
    lams = [R * direction for R in radii]
    vals = np.array([lam * (normalized(lam, coeffs).to_array() - np.eye(2)) for lam in lams])
    h = np.array([1.0 / lam for lam in lams])
    A = np.vander(h, len(radii), increasing=True)
    sol = np.linalg.solve(A, vals.reshape(len(radii), 4))
    return sol[0].reshape(2, 2)


def sign_flip_deviation(lam: complex, coeffs: PCCoefficients) -> float:
    """|| P(lambda; p, -tau) - (i sigma3) P(lambda; p, tau) (i sigma3)^{-1} ||."""
    other = pc_coefficients(coeffs.p, -coeffs.tau)
    g = Complex2x2.diag(1j, -1j)
    return (eval_p(lam, other) - eval_p(lam, coeffs).conjugate_by(g)).norm()
