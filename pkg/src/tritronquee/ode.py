"""Adaptive integration of u'' = x u + 2 u^3 - alpha along the real axis.

Near a pole the integrator switches to the reciprocal variable w = 1/u, which
obeys w'' = 2 (w'^2 - 1)/w - x w + alpha w^2 and is analytic through a simple
pole of u.  The last stretch |w| < W_JUMP is crossed with the local Laurent
series fitted to (w, w'): stepping w itself through zero loses the free
Laurent coefficient to cancellation in w'^2 - 1.  The state is stored as four
real components so that the DOP853 dense output can be differentiated by the
complex-step trick.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853

from .asymptotics import pii_residual, u_plus_series_jet
from .errors import (HalfIntegerAlphaError, InconsistentPoleError,
                     IntegrationFailure, SeedQualityError)
from .params import Regime, Sign, TritronqueeSpec

SWITCH_TO_W = 10.0     # |u| above which the reciprocal variable takes over
SWITCH_TO_U = 5.0      # |u| below which we go back
EXCISION_RADIUS = 1e-3
REAL_POLE_TOL = 1e-6   # |Im| of the complex zero of w accepted as a real pole
W_LIMITER = 1e-6       # |w| below which 2(w'^2-1)/w is replaced by its limit
SEED_ORDER = 6
DEFAULT_SPACING = 0.05


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PoleRecord:
    location: float
    residue: int
    local_coeffs: tuple  # c0, c1, ... of u - residue/(x - x0) = c0 + c1 s + c2 s^2 + ...

    def laurent(self, s):
        """u(x0 + s) from the local Laurent expansion."""
        return self.residue / s + sum(ck * s ** k for k, ck in enumerate(self.local_coeffs))


@dataclass
class _Segment:
    x_lo: float
    x_hi: float
    mode: str              # "u", "w" or "laurent"
    dense: object          # scipy DenseOutput on the real 4-state, or a LaurentPatch


@dataclass
class SolutionTrace:
    alpha: complex
    sign: Sign | None
    x_grid: np.ndarray
    u_values: np.ndarray
    du_values: np.ndarray
    poles: list
    tolerance: float
    seed: tuple = ()
    segments: list = field(default_factory=list, repr=False)

    @property
    def x_min(self) -> float:
        return min(s.x_lo for s in self.segments)

    @property
    def x_max(self) -> float:
        return max(s.x_hi for s in self.segments)

    def _segment(self, x: float) -> _Segment:
        los = self._los
        i = bisect.bisect_right(los, x) - 1
        i = min(max(i, 0), len(self._sorted) - 1)
        seg = self._sorted[i]
        if not (seg.x_lo - 1e-12 <= x <= seg.x_hi + 1e-12):
            raise ValueError(f"x = {x} outside the traced interval [{self.x_min}, {self.x_max}]")
        return seg

    def __post_init__(self):
        self._index()

    def _index(self):
        self._sorted = sorted(self.segments, key=lambda s: s.x_lo)
        self._los = [s.x_lo for s in self._sorted]

    def evaluate(self, x: float):
        """(u, u') at x from the dense output."""
        seg = self._segment(float(x))
        if seg.mode == "laurent":
            return seg.dense.jet(float(x))
        if seg.mode == "u":
            jet = _node_taylor_jet(seg, float(x), self.alpha)
            if jet is not None:
                return jet[:2]
        y = seg.dense(float(x))
        return _state_to_u(seg.mode, y)

    def u(self, x: float) -> complex:
        return self.evaluate(x)[0]

    def residual(self, x: float) -> float:
        """|u'' - x u - 2u^3 + alpha| with u'' the complex-step derivative of
        the dense interpolant of u'."""
        seg = self._segment(float(x))
        if seg.mode == "laurent":
            u, _, d2u = seg.dense.jet(float(x), derivs=2)
            return abs(pii_residual(x, u, d2u, self.alpha))
        if seg.mode == "u":
            jet = _node_taylor_jet(seg, float(x), self.alpha)
            if jet is not None:
                return abs(pii_residual(x, jet[0], jet[2], self.alpha))
        h = 1e-20
        y = seg.dense(float(x))
        yc = _dense_complex(seg.dense, float(x), h)
        dy = yc.imag / h
        if seg.mode == "u":
            u = complex(y[0], y[1])
            d2u = complex(dy[2], dy[3])
        else:
            w = complex(y[0], y[1])
            dw = complex(y[2], y[3])
            d2w = complex(dy[2], dy[3])
            u = 1.0 / w
            d2u = -d2w / w ** 2 + 2.0 * dw ** 2 / w ** 3
        return abs(pii_residual(x, u, d2u, self.alpha))

    def near_pole(self, x: float, radius: float = EXCISION_RADIUS) -> bool:
        return any(abs(x - p.location) <= radius for p in self.poles)


TAYLOR_TERMS = 40


def _node_taylor_jet(seg: _Segment, x: float, alpha: complex):
    """(u, u', u'') at x from the ODE's Taylor series about the nearer step node.

    The node values are the integrator's own step results; the series carries
    them to x far more accurately than the interpolant does.  Returns None if
    the series has not converged at the requested offset.
    """
    xn = seg.x_lo if x - seg.x_lo <= seg.x_hi - x else seg.x_hi
    y = seg.dense(xn)
    a = _taylor_coeffs(xn, complex(y[0], y[1]), complex(y[2], y[3]), alpha, TAYLOR_TERMS)
    s = x - xn
    k = np.arange(len(a))
    terms = a * s ** k
    if abs(terms[-1]) + abs(terms[-2]) > 1e-17 * max(1.0, abs(terms[0])):
        return None
    u = complex(np.sum(terms))
    if s == 0:
        return u, a[1], 2.0 * a[2]
    du = complex(np.sum(k * terms)) / s
    d2u = complex(np.sum(k * (k - 1) * terms)) / (s * s)
    return u, du, d2u


def _taylor_coeffs(xn: float, u: complex, du: complex, alpha: complex, n: int) -> np.ndarray:
    # (k+2)(k+1) a_{k+2} = xn a_k + a_{k-1} + 2 (u^3)_k - alpha [k = 0]
    a = np.zeros(n, dtype=complex)
    sq = np.zeros(n, dtype=complex)
    a[0], a[1] = u, du
    sq[0] = u * u
    for k in range(n - 2):
        if k >= 1:
            sq[k] = np.dot(a[:k + 1], a[k::-1])
        cube = np.dot(a[:k + 1], sq[k::-1])
        r = xn * a[k] + (a[k - 1] if k >= 1 else 0) + 2.0 * cube - (alpha if k == 0 else 0)
        a[k + 2] = r / ((k + 2) * (k + 1))
    return a


def _dense_complex(dense, x: float, h: float) -> np.ndarray:
    # scipy's DOP853 dense output is a polynomial in (x - t_old)/h_step
    xc = np.asarray(x + 1j * h)
    t_old = dense.t_old
    hs = dense.h
    xs = (xc - t_old) / hs
    F = dense.F
    y = np.zeros_like(dense.y_old, dtype=complex)
    for i, f in enumerate(reversed(F)):
        y = y + f
        if i % 2 == 0:
            y = y * xs
        else:
            y = y * (1 - xs)
    y = y + dense.y_old
    return y


def _state_to_u(mode: str, y) -> tuple:
    if mode == "u":
        return complex(y[0], y[1]), complex(y[2], y[3])
    w = complex(y[0], y[1])
    dw = complex(y[2], y[3])
    if w == 0:
        return complex("nan"), complex("nan")
    return 1.0 / w, -dw / (w * w)


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------


def _rhs_u(alpha: complex):
    def f(x, y):
        u = complex(y[0], y[1])
        r = x * u + 2.0 * u ** 3 - alpha
        return np.array([y[2], y[3], r.real, r.imag])
    return f


def w_second_derivative(x: float, w: complex, dw: complex, alpha: complex) -> complex:
    """w'' = 2(w'^2 - 1)/w - x w + alpha w^2, with the regular limit near w = 0."""
    if abs(w) < W_LIMITER:
        # along a solution w ~ s + x0 s^3/6 + ..., so 2(w'^2-1)/w -> 2 x w
        first = 2.0 * x * w
    else:
        first = 2.0 * (dw * dw - 1.0) / w
    return first - x * w + alpha * w * w


def _rhs_w(alpha: complex):
    def f(x, y):
        r = w_second_derivative(x, complex(y[0], y[1]), complex(y[2], y[3]), alpha)
        return np.array([y[2], y[3], r.real, r.imag])
    return f


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------


def seed_from_series(alpha: complex, sign=Sign.MINUS, x0: float = 30.0, order: int = SEED_ORDER):
    """(u, u') at x0 from the truncated x -> +infinity series."""
    if x0 < 20.0:
        raise SeedQualityError(f"seed point x0 = {x0} is below 20; the series is not accurate there")
    u, du = u_plus_series_jet(float(x0), alpha, sign, order)
    return u, du


# ---------------------------------------------------------------------------
# pole passage
# ---------------------------------------------------------------------------


def laurent_coefficients(x0: complex, sigma: int, alpha: complex, c3: complex = 0j,
                         order: int = 3) -> tuple:
    """c1..c_order of u = sigma/s + c1 s + c2 s^2 + ...,  s = x - x0.

    Writing u = g(s)/s, the ODE gives for n >= 1
        (n - 4)(n + 1) g_n = x0 g_{n-2} + g_{n-3} + 2 R_n - alpha [n = 3],
    R_n being the part of (g^3)_n free of g_n.  n = 4 is the resonance, where
    g_4 = c3 is the free parameter.
    """
    g = _laurent_g(complex(x0), sigma, complex(alpha), complex(c3), order + 1)
    return tuple(complex(v) for v in g[2:order + 2])


def _laurent_g(x0: complex, sigma: int, alpha: complex, c3: complex, n_max: int) -> np.ndarray:
    g = np.zeros(n_max + 1, dtype=complex)
    g[0] = sigma
    sq = np.zeros(n_max + 1, dtype=complex)  # (g^2)_m for m < n
    sq[0] = 1.0
    for n in range(1, n_max + 1):
        # g^2 and g^3 at index n with g_n provisionally zero
        sq_n = np.dot(g[1:n], g[n - 1:0:-1]) if n > 1 else 0j
        r = g[0] * sq_n + np.dot(g[1:n], sq[n - 1:0:-1]) if n > 1 else g[0] * sq_n
        if n == 4:
            g[n] = c3
        else:
            rhs = x0 * (g[n - 2] if n >= 2 else 0) + (g[n - 3] if n >= 3 else 0) + 2.0 * r
            if n == 3:
                rhs -= alpha
            g[n] = rhs / ((n - 4) * (n + 1))
        sq[n] = sq_n + 2.0 * g[0] * g[n]
    return g


@dataclass(frozen=True)
class LaurentPatch:
    """Truncated Laurent expansion of u about a (possibly complex) pole."""

    x0: complex
    sigma: int
    alpha: complex
    g: np.ndarray

    def jet(self, x: complex, derivs: int = 1):
        s = complex(x) - self.x0
        n = np.arange(len(self.g))
        pw = s ** (n - 1.0)
        u = complex(np.sum(self.g * pw))
        du = complex(np.sum(self.g * (n - 1.0) * pw)) / s
        if derivs == 1:
            return u, du
        d2u = complex(np.sum(self.g * (n - 1.0) * (n - 2.0) * pw)) / (s * s)
        return u, du, d2u

    def __call__(self, x: float) -> np.ndarray:
        u, du = self.jet(x)
        return _to_state(u, du)


LAURENT_TERMS = 48
W_JUMP = 0.05          # |w| below which a pole is crossed with the local Laurent series


def fit_laurent(x: float, u: complex, du: complex, alpha: complex,
                terms: int = LAURENT_TERMS) -> LaurentPatch:
    """Match sigma/s + ... to (u, u') at x by Newton in (x0, c3)."""
    w = 1.0 / u
    dw = -du / (u * u)
    sigma = 1 if dw.real > 0 else -1
    x0 = complex(x) - w / dw
    c3 = 0j

    def resid(x0_, c3_):
        p = LaurentPatch(x0_, sigma, alpha, _laurent_g(x0_, sigma, alpha, c3_, terms))
        us, dus = p.jet(x)
        return np.array([(us - u) / u, (dus - du) / du]), p

    F, patch = resid(x0, c3)
    for _ in range(40):
        h0 = 1e-7 * max(1.0, abs(x - x0))
        h3 = 1e-3 * max(1.0, abs(c3))
        J = np.empty((2, 2), dtype=complex)
        J[:, 0] = (resid(x0 + h0, c3)[0] - F) / h0
        J[:, 1] = (resid(x0, c3 + h3)[0] - F) / h3
        try:
            d = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        x0 += d[0]
        c3 += d[1]
        F, patch = resid(x0, c3)
        if np.max(np.abs(F)) < 1e-15 or abs(d[0]) < 1e-16 * max(1.0, abs(x0)):
            break
    if np.max(np.abs(F)) > 1e-11:
        raise InconsistentPoleError(
            f"Laurent fit near x = {x:.12g} did not converge (residual {np.max(np.abs(F)):.3e})")
    return patch


def pass_pole(state: dict) -> PoleRecord | None:
    """Locate the zero of w = 1/u ahead of a w-mode state and build its record.

    ``state`` holds ``x``, ``w``, ``dw`` and ``alpha``.  The zero is taken from
    the local Laurent series fitted to (w, w'), so w' = sigma holds there by
    construction; the check on |w'| at the zero catches a fit that landed on
    something other than a simple pole.  Returns None when the zero is off the
    real axis by more than REAL_POLE_TOL (the series still carries the
    integration past it).
    """
    patch = state.get("patch")
    if patch is None:
        w, dw = complex(state["w"]), complex(state["dw"])
        patch = fit_laurent(state["x"], 1.0 / w, -dw / (w * w), complex(state["alpha"]))
    if abs(patch.x0.imag) > REAL_POLE_TOL:
        return None
    x0 = patch.x0.real
    # w'(x0) from the series: w = s/g(s), so w'(x0) = 1/g_0
    dw0 = 1.0 / patch.g[0]
    if abs(abs(dw0) - 1.0) > 1e-4:
        raise InconsistentPoleError(f"|w'| = {abs(dw0):.8f} at the zero x0 = {x0:.12f}, expected 1")
    coeffs = tuple(complex(v) for v in patch.g[1:9])
    return PoleRecord(location=x0, residue=int(patch.sigma), local_coeffs=coeffs)


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------


def _to_state(u: complex, du: complex) -> np.ndarray:
    return np.array([u.real, u.imag, du.real, du.imag], dtype=float)


def integrate(alpha: complex, seed, target: float, tol: float = 1e-10,
              grid=None, spacing: float = DEFAULT_SPACING, sign: Sign | None = None,
              max_steps: int = 2_000_000) -> SolutionTrace:
    """Integrate from seed = (x0, u0, du0) to ``target`` (either direction)."""
    if not (1e-12 <= tol <= 1e-6):
        raise ValueError(f"tol must lie in [1e-12, 1e-6], got {tol}")
    alpha = complex(alpha)
    x0, u0, du0 = float(seed[0]), complex(seed[1]), complex(seed[2])
    target = float(target)
    if x0 == target:
        raise ValueError("target coincides with the seed point")
    direction = 1.0 if target > x0 else -1.0
    rtol = max(tol * 1e-4, 2.5e-14)
    atol = tol * 1e-6

    segments: list[_Segment] = []
    poles: list[PoleRecord] = []
    if abs(u0) > SWITCH_TO_W:
        mode = "w"
        y = _to_state(1.0 / u0, -du0 / u0 ** 2)
    else:
        mode = "u"
        y = _to_state(u0, du0)

    steps = 0
    last_pole = None

    def base_max_step(x_start):
        if last_pole is not None and abs(x_start - last_pole) < 5.0:
            return 0.1
        return np.inf

    def make_solver(x_start, y_start, mode_):
        fun = _rhs_u(alpha) if mode_ == "u" else _rhs_w(alpha)
        return DOP853(fun, x_start, y_start, target, rtol=rtol, atol=atol,
                      max_step=base_max_step(x_start))

    solver = make_solver(x0, y, mode)
    while solver.status == "running":
        if mode == "w":
            # keep each step well short of the zero of w so that the jump below
            # is triggered before the 1/w term is ever evaluated near 0
            solver.max_step = min(base_max_step(solver.t), max(0.5 * math.hypot(*solver.y[:2]), 1e-3))
        msg = solver.step()
        steps += 1
        if solver.status == "failed":
            raise IntegrationFailure(f"integration failed near x = {solver.t:.6g}: {msg}",
                                     state={"x": solver.t, "y": solver.y.tolist(), "mode": mode})
        if steps > max_steps:
            raise IntegrationFailure("too many steps", state={"x": solver.t, "mode": mode})
        t_old, t_new = solver.t_old, solver.t
        segments.append(_Segment(min(t_old, t_new), max(t_old, t_new), mode, solver.dense_output()))
        ynew = solver.y
        if solver.status != "running":
            break
        restart = False
        if mode == "w":
            w = complex(ynew[0], ynew[1])
            dw = complex(ynew[2], ynew[3])
            if abs(w) > 1.0 / SWITCH_TO_U:
                mode = "u"
                y = _to_state(1.0 / w, -dw / w ** 2)
                restart = True
            elif abs(w) < W_JUMP and (w.conjugate() * dw).real * direction < 0:
                patch = fit_laurent(t_new, 1.0 / w, -dw / (w * w), alpha)
                x_exit = 2.0 * patch.x0.real - t_new
                if direction * (x_exit - target) >= 0:
                    x_exit = target
                segments.append(_Segment(min(t_new, x_exit), max(t_new, x_exit), "laurent", patch))
                rec = pass_pole({"patch": patch})
                if rec is not None and min(t_new, x_exit) < rec.location < max(t_new, x_exit):
                    poles.append(rec)
                    last_pole = rec.location
                if x_exit == target:
                    break
                ue, due = patch.jet(x_exit)
                t_new = x_exit
                y = _to_state(1.0 / ue, -due / ue ** 2)
                restart = True
            else:
                y = ynew
        else:
            u = complex(ynew[0], ynew[1])
            if abs(u) > SWITCH_TO_W:
                mode = "w"
                du = complex(ynew[2], ynew[3])
                y = _to_state(1.0 / u, -du / u ** 2)
                restart = True
            else:
                y = ynew
        if last_pole is not None and abs(t_new - last_pole) >= 5.0 and solver.max_step != np.inf \
                and mode == "u":
            restart = True
        if restart:
            solver = make_solver(t_new, y, mode)

    trace = SolutionTrace(alpha=alpha, sign=sign, x_grid=np.array([]), u_values=np.array([]),
                          du_values=np.array([]), poles=sorted(poles, key=lambda r: r.location),
                          tolerance=tol, seed=(x0, u0, du0), segments=segments)
    lo, hi = min(x0, target), max(x0, target)
    if grid is None:
        n = int(round((hi - lo) / spacing))
        grid = lo + spacing * np.arange(n + 1)
        grid = grid[grid <= hi + 1e-12]
    grid = np.asarray([g for g in np.asarray(grid, dtype=float)
                       if lo - 1e-12 <= g <= hi + 1e-12 and not trace.near_pole(g)])
    us = np.empty(len(grid), dtype=complex)
    dus = np.empty(len(grid), dtype=complex)
    for i, g in enumerate(grid):
        us[i], dus[i] = trace.evaluate(min(max(g, lo), hi))
    trace.x_grid = grid
    trace.u_values = us
    trace.du_values = dus
    return trace


def trace_tritronquee(alpha: complex, sign=Sign.MINUS, xmin: float = -60.0, xmax: float = 60.0,
                      tol: float = 1e-10, x0: float | None = None, spacing: float = DEFAULT_SPACING,
                      grid=None) -> SolutionTrace:
    """u_TT^sign(x; alpha) on [xmin, xmax], seeded from the x -> +infinity series."""
    sign = Sign.parse(sign)
    spec = TritronqueeSpec.from_alpha(alpha, sign)
    if spec.regime is Regime.HALF_INTEGER_ALPHA:
        raise HalfIntegerAlphaError(f"alpha = {alpha} lies in Z + 1/2")
    if xmax < 30.0:
        raise SeedQualityError(f"xmax = {xmax} must be at least 30")
    if x0 is None:
        x0 = max(xmax, 30.0)
    u0, du0 = seed_from_series(alpha, sign, x0)
    if grid is None:
        n = int(round((xmax - xmin) / spacing))
        grid = xmin + spacing * np.arange(n + 1)
    trace = integrate(alpha, (x0, u0, du0), xmin, tol, grid=grid, sign=sign)
    return trace


# ---------------------------------------------------------------------------
# the (U, V) system
# ---------------------------------------------------------------------------


@dataclass
class UVTrace:
    p: complex
    y_grid: np.ndarray
    U: np.ndarray
    dU: np.ndarray
    V: np.ndarray
    dV: np.ndarray
    tolerance: float
    dense: object = field(default=None, repr=False)

    def constant_of_motion(self) -> np.ndarray:
        return self.dU * self.V - self.U * self.dV

    def evaluate(self, y: float):
        s = self.dense(float(y))
        U, dU, V, dV = (complex(s[0], s[1]), complex(s[2], s[3]),
                        complex(s[4], s[5]), complex(s[6], s[7]))
        return U, dU, V, dV


def _rhs_uv(y, s):
    U = complex(s[0], s[1])
    V = complex(s[4], s[5])
    ddU = y * U / 3.0 + 2.0 * U * U * V
    ddV = y * V / 3.0 + 2.0 * V * V * U
    return np.array([s[2], s[3], ddU.real, ddU.imag, s[6], s[7], ddV.real, ddV.imag])


def integrate_uv(p: complex, seed, y_range, tol: float = 1e-10, grid=None) -> UVTrace:
    """Integrate U'' = yU/3 + 2U^2 V, V'' = yV/3 + 2V^2 U from seed
    (y0, U, U', V, V') over y_range = (y_a, y_b) (which must contain y0)."""
    from scipy.integrate import solve_ivp

    y0 = float(seed[0])
    U, dU, V, dV = (complex(v) for v in seed[1:5])
    s0 = np.array([U.real, U.imag, dU.real, dU.imag, V.real, V.imag, dV.real, dV.imag])
    ya, yb = float(min(y_range)), float(max(y_range))
    if not (ya - 1e-12 <= y0 <= yb + 1e-12):
        raise ValueError("seed point must lie inside y_range")
    pieces = []
    for end in (ya, yb):
        if abs(end - y0) < 1e-15:
            continue
        sol = solve_ivp(_rhs_uv, (y0, end), s0, method="DOP853", rtol=tol, atol=tol * 1e-2,
                        dense_output=True)
        if sol.status != 0:
            raise IntegrationFailure(f"(U, V) integration failed: {sol.message}")
        pieces.append((min(y0, end), max(y0, end), sol.sol))

    def dense(y):
        for lo, hi, f in pieces:
            if lo - 1e-12 <= y <= hi + 1e-12:
                return f(y)
        raise ValueError(f"y = {y} outside the integrated range")

    if grid is None:
        grid = np.linspace(ya, yb, max(2, int(round((yb - ya) / 0.05)) + 1))
    grid = np.asarray(grid, dtype=float)
    vals = np.array([dense(g) for g in grid]) if len(grid) else np.zeros((0, 8))
    tr = UVTrace(p=complex(p), y_grid=grid,
                 U=vals[:, 0] + 1j * vals[:, 1], dU=vals[:, 2] + 1j * vals[:, 3],
                 V=vals[:, 4] + 1j * vals[:, 5], dV=vals[:, 6] + 1j * vals[:, 7],
                 tolerance=tol, dense=dense)
    return tr
