"""Both sides of the total-integral identity for u_TT^-(x; alpha).

The left side is exp of three pieces: the regularized tail over (-inf, A),
the Hadamard principal value over (A, B), and the regularized tail over
(B, +inf).  The right side is a closed form in alpha, A, B and the pole
counts N+ and N-.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec

from .asymptotics import series_coefficients, series_exponent
from .errors import ConfigurationError, HalfIntegerAlphaError, UnsupportedRegimeError
from .numerics import PI, gamma, principal_pow, rgamma
from .ode import EXCISION_RADIUS, PoleRecord, trace_tritronquee
from .params import Regime, Sign, TritronqueeSpec, is_half_integer, q_tau

QUAD_EPSABS = 1e-9
PV_WINDOW = 0.25
TAIL_PLUS_ORDER = 6
POLE_MARGIN = 10.0


@dataclass(frozen=True)
class FunctionTrace:
    """Minimal stand-in for a SolutionTrace: a callable u and a pole list."""

    func: Callable[[float], complex]
    poles: Sequence[PoleRecord] = ()
    alpha: complex = 0j

    def u(self, x: float) -> complex:
        return complex(self.func(x))


@dataclass(frozen=True)
class TotalIntegralReport:
    alpha: complex
    A: float
    B: float
    n_plus: int
    n_minus: int
    lhs: complex
    rhs: complex
    rel_err: float
    tail_minus: complex = 0j
    pv: complex = 0j
    tail_plus: complex = 0j


def _quad(f, a: float, b: float) -> complex:
    """Adaptive Gauss-Kronrod of a complex function over [a, b]."""
    if a == b:
        return 0j

    def g(x):
        v = complex(f(x))
        return np.array([v.real, v.imag])

    # unit-length panels keep the oscillatory regions well resolved
    n = max(1, int(math.ceil(abs(b - a))))
    pts = np.linspace(a, b, n + 1)
    total = 0j
    for lo, hi in zip(pts[:-1], pts[1:]):
        val, _ = quad_vec(g, lo, hi, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=400)
        total += complex(val[0], val[1])
    return total


# ---------------------------------------------------------------------------
# principal value over (A, B)
# ---------------------------------------------------------------------------


def _window_inner(rec: PoleRecord, eps: float) -> complex:
    # integral of u - sigma/s over [-eps, eps] from the local expansion: only even powers survive
    total = 0j
    for k, c in enumerate(rec.local_coeffs):
        if k % 2 == 0:
            total += 2.0 * c * eps ** (k + 1) / (k + 1)
    return total


def pv_integral(trace, A: float, B: float) -> complex:
    """Hadamard principal value of the integral of u over (A, B).

    Around each pole x0 a symmetric window of half-width delta is split into
    the excised core |s| <= eps, integrated from the Laurent coefficients, and
    eps <= |s| <= delta, where u(x0 + t) + u(x0 - t) is integrated so that the
    odd singular part cancels pointwise.
    """
    A, B = float(A), float(B)
    if not A < B:
        raise ConfigurationError(f"need A < B, got A = {A}, B = {B}")
    poles = sorted(trace.poles, key=lambda r: r.location)
    for rec in poles:
        if not (A + EXCISION_RADIUS < rec.location < B - EXCISION_RADIUS):
            raise ConfigurationError(
                f"pole at {rec.location:.12g} is not strictly inside (A, B) = ({A}, {B})")
    locs = [r.location for r in poles]
    for a, b in zip(locs[:-1], locs[1:]):
        if b - a <= 2.0 * EXCISION_RADIUS:
            raise ConfigurationError(f"poles at {a:.12g} and {b:.12g} are not separated")

    total = 0j
    cursor = A
    for i, rec in enumerate(poles):
        x0 = rec.location
        room = [x0 - A, B - x0]
        if i > 0:
            room.append(0.5 * (x0 - locs[i - 1]))
        if i + 1 < len(poles):
            room.append(0.5 * (locs[i + 1] - x0))
        delta = min(PV_WINDOW, 0.9 * min(room))
        eps = min(EXCISION_RADIUS, 0.5 * delta)
        total += _quad(trace.u, cursor, x0 - delta)
        total += _window_inner(rec, eps)
        total += _quad(lambda t, x0=x0: trace.u(x0 + t) + trace.u(x0 - t), eps, delta)
        cursor = x0 + delta
    total += _quad(trace.u, cursor, B)
    return total


# ---------------------------------------------------------------------------
# tails
# ---------------------------------------------------------------------------


def _incomplete_oscillatory(nu: complex, lam: float, T: float) -> complex:
    """int_T^inf t^{nu-1} e^{i lam t} dt for lam != 0 and large lam T.

    Repeated integration by parts gives
        -e^{i lam T} T^{nu-1}/(i lam) sum_k (nu-1)(nu-2)...(nu-k) (-1/(i lam T))^k,
    summed until the terms stop decreasing.
    """
    z = -1.0 / (1j * lam * T)
    term = 1.0 + 0j
    total = term
    prev = abs(term)
    for k in range(1, 60):
        term *= (nu - k) * z
        if abs(term) > prev:
            break
        total += term
        prev = abs(term)
        if prev < 1e-18 * abs(total):
            break
    return -cmath.exp(1j * lam * T) * principal_pow(T, nu - 1.0) / (1j * lam) * total


def _power_phase_tail(c: complex, beta: complex, m: int, X0: float) -> complex:
    """int_{X0}^inf c X^beta e^{i m (2/3) X^{3/2}} dX."""
    if m == 0:
        if (beta + 1).real >= 0:
            raise ValueError("non-oscillatory tail term does not decay")
        return -c * principal_pow(X0, beta + 1.0) / (beta + 1.0)
    nu = (2.0 * beta + 2.0) / 3.0
    return c * (2.0 / 3.0) * _incomplete_oscillatory(nu, 2.0 * m / 3.0, X0 ** 1.5)


def _minus_tail_model(alpha: complex, q: complex, tau: complex) -> list:
    """u(-X) ~ sum of c X^beta e^{i m (2/3) X^{3/2}}, as (c, beta, m) triples.

    Both exponential branches of the large-negative-x behaviour, the algebraic
    term alpha/x, and the first non-oscillatory correction -6 alpha q X^{-5/2}
    that the cubic term forces from the product of the two branches.
    """
    sqrt_pi = math.sqrt(PI)
    # q Gamma(iq) = -i Gamma(1 + iq) stays finite at q = 0
    qg = -1j * gamma(1.0 + 1j * q)
    am = (qg * cmath.exp(-PI * q / 2.0) / (2.0 * tau * sqrt_pi) * cmath.exp(0.75j * PI)
          * principal_pow(8.0, -1j * q))
    ap = (tau * sqrt_pi * cmath.exp(PI * q / 2.0) * rgamma(1j * q) * cmath.exp(-0.75j * PI)
          * principal_pow(8.0, 1j * q))
    return [(am, -0.25 - 1.5j * q, 1), (ap, -0.25 + 1.5j * q, -1),
            (-alpha, -1.0 + 0j, 0), (-6.0 * alpha * q, -2.5 + 0j, 0)]


def _mul_terms(a: list, b: list) -> list:
    return [(ca * cb, ba + bb, ma + mb) for ca, ba, ma in a for cb, bb, mb in b]


def tail_minus(trace, A: float, xmin: float | None = None) -> complex:
    """Integral of u - alpha/x over (-inf, A).

    Quadrature of the trace on [xmin, A].  Below xmin the identity
    u - alpha/x = (u'' - 2u^3)/x, integrated by parts twice, leaves the exact
    boundary terms u'/x + u/x^2 at xmin and the remainder of 2u/x^3 - 2u^3/x,
    which is small and oscillatory; only that remainder uses the asymptotic
    model of u, integrated term by term in closed form.
    """
    alpha = complex(trace.alpha)
    am = alpha if getattr(trace, "sign", None) in (None, Sign.MINUS) else -alpha
    spec = TritronqueeSpec.from_alpha(am, Sign.MINUS)
    if spec.regime in (Regime.EXCLUDED_LINE, Regime.HALF_INTEGER_ALPHA):
        raise UnsupportedRegimeError(f"tail over (-inf, A) is not available in regime {spec.regime.value}")
    if xmin is None:
        xmin = trace.x_min
    xmin = float(xmin)
    if not xmin < A:
        raise ConfigurationError(f"xmin = {xmin} must lie below A = {A}")
    if any(r.location <= A for r in trace.poles):
        raise ConfigurationError("A must lie below all poles")
    body = _quad(lambda x: trace.u(x) - alpha / x, xmin, A)

    u0, du0 = trace.evaluate(xmin)
    sgn = 1.0 if am == alpha else -1.0
    boundary = du0 / xmin + u0 / xmin ** 2
    S = [(sgn * c, b, m) for c, b, m in _minus_tail_model(am, spec.q, spec.tau)]
    S3 = _mul_terms(_mul_terms(S, S), S)
    # 2u/x^3 - 2u^3/x at x = -X, and dx = -dX flips the limits
    terms = [(-2.0 * c, b - 3.0, m) for c, b, m in S] + [(2.0 * c, b - 1.0, m) for c, b, m in S3]
    X0 = -xmin
    remainder = sum(_power_phase_tail(c, b, m, X0) for c, b, m in terms)
    return body + boundary + remainder


def tail_plus(trace, B: float, xmax: float | None = None, order: int = TAIL_PLUS_ORDER) -> complex:
    """Integral of u + i sqrt(x/2) + alpha/(2x) over (B, +inf) (minus family;
    the plus family uses its own leading pair)."""
    alpha = complex(trace.alpha)
    sign = getattr(trace, "sign", None) or Sign.MINUS
    coeffs = series_coefficients(alpha, sign, order)
    if xmax is None:
        xmax = trace.x_max
    xmax = float(xmax)
    if not B < xmax:
        raise ConfigurationError(f"xmax = {xmax} must lie above B = {B}")
    if any(r.location >= B for r in trace.poles):
        raise ConfigurationError("B must lie above all poles")

    def integrand(x):
        return trace.u(x) - coeffs[0] * math.sqrt(x) - coeffs[1] / x

    body = _quad(integrand, B, xmax)
    tail = 0j
    for k in range(2, order):
        e = series_exponent(k)
        tail += -coeffs[k] * xmax ** (e + 1.0) / (e + 1.0)
    return body + tail


# ---------------------------------------------------------------------------
# right-hand side and the full identity
# ---------------------------------------------------------------------------


def total_integral_rhs(alpha: complex, A: float, B: float, n_plus: int, n_minus: int) -> complex:
    """(-1)^{N+ - N-} tau e^{i pi (alpha-1)/2} Gamma(alpha+1/2)/sqrt(2 pi)
    (-A sqrt(B/2))^{-alpha} e^{-i B^{3/2} sqrt(2)/3}."""
    alpha = complex(alpha)
    if is_half_integer(alpha):
        raise HalfIntegerAlphaError(f"alpha = {alpha} lies in Z + 1/2")
    if not (A < 0 < B):
        raise ConfigurationError(f"need A < 0 < B, got A = {A}, B = {B}")
    _, _, tau = q_tau(alpha)
    parity = -1.0 if (n_plus - n_minus) % 2 else 1.0
    return (parity * tau * cmath.exp(0.5j * PI * (alpha - 1.0)) * gamma(alpha + 0.5)
            / math.sqrt(2.0 * PI) * principal_pow(-A * math.sqrt(B / 2.0), -alpha)
            * cmath.exp(-1j * B ** 1.5 * math.sqrt(2.0) / 3.0))


def select_interval(poles, xmin: float, xmax: float, margin: float = POLE_MARGIN):
    """(A, B) enclosing all poles with the given margin, and A < 0 < B."""
    locs = [r.location for r in poles]
    A = min(locs + [0.0]) - margin
    B = max(locs + [0.0]) + margin
    if A - margin < xmin or B + margin > xmax:
        raise ConfigurationError(
            f"trace [{xmin}, {xmax}] does not leave a {margin}-unit pole-free margin around "
            f"(A, B) = ({A}, {B})")
    return A, B


def total_integral(alpha: complex, xmin: float = -80.0, xmax: float = 60.0, tol: float = 1e-10,
                   A: float | None = None, B: float | None = None, trace=None) -> TotalIntegralReport:
    alpha = complex(alpha)
    spec = TritronqueeSpec.from_alpha(alpha, Sign.MINUS)
    if spec.regime in (Regime.EXCLUDED_LINE, Regime.HALF_INTEGER_ALPHA):
        raise UnsupportedRegimeError(f"total integral is not available in regime {spec.regime.value}")
    if trace is None:
        trace = trace_tritronquee(alpha, Sign.MINUS, xmin, xmax, tol)
    if A is None or B is None:
        a0, b0 = select_interval(trace.poles, trace.x_min, trace.x_max)
        A = a0 if A is None else A
        B = b0 if B is None else B
    n_plus = sum(1 for r in trace.poles if r.residue == 1)
    n_minus = sum(1 for r in trace.poles if r.residue == -1)
    tm = tail_minus(trace, A)
    pv = pv_integral(trace, A, B)
    tp = tail_plus(trace, B)
    lhs = cmath.exp(tm + pv + tp)
    rhs = total_integral_rhs(alpha, A, B, n_plus, n_minus)
    return TotalIntegralReport(alpha=alpha, A=float(A), B=float(B), n_plus=n_plus, n_minus=n_minus,
                               lhs=lhs, rhs=rhs, rel_err=abs(lhs / rhs - 1.0),
                               tail_minus=tm, pv=pv, tail_plus=tp)
