"""Numerical solution of the Riemann-Hilbert problem for W(zeta; y).

The contour consists of five rays leaving a junction point c, at angles
pi/2, 5pi/6, pi, -5pi/6, -pi/2, with jumps built from e^{+-i theta},
theta = zeta^3 + y zeta.  The jumps satisfy the cyclic identity for every
zeta, so the junction may sit anywhere on the real axis: for y < 0 we put
it at the saddle -sqrt(-y/3), where every off-diagonal entry decays away
from c.  For y >= 0 the junction stays at 0.

Inside a small polygon around c the unknown is W itself; outside it is
W (zeta - c)^{ip sigma3}, which tends to I and has no jump on the outer
negative axis.  The polygon edges carry the jump (zeta - c)^{-ip sigma3}.

The density mu = X_- on the contour solves
    mu - C_-[mu (J - I)] = I,
discretized on Gauss-Legendre panels.  Cauchy transforms of the Legendre
basis are evaluated in closed form through Legendre functions of the
second kind.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.linalg.lapack import zgecon

from .errors import ConfigurationError, DomainError, NearNonSolvabilityError, ZeroOfVError
from .numerics import PI, Complex2x2

NODES = 12
GRADING = 0.4
MAX_PANEL = 1.0
PHASE_PER_PANEL = 4.0
NEAR_RHO = 4.0
MAX_RADIUS = 50.0
COND_LIMIT = 1e12
TRUNC_TOL = 1e-10
DEFAULT_PANELS = 12

RAY_ANGLES = (PI / 2, 5 * PI / 6, PI, -5 * PI / 6, -PI / 2)

_X, _WQ = np.polynomial.legendre.leggauss(NODES)


def _legendre_table(x: np.ndarray, n: int) -> np.ndarray:
    """P_0..P_{n-1} at x, shape (n, len(x))."""
    P = np.empty((n, len(x)))
    P[0] = 1.0
    if n > 1:
        P[1] = x
    for k in range(1, n - 1):
        P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1)
    return P


_P = _legendre_table(_X, NODES)
# values at nodes -> Legendre coefficients
_T = (2 * np.arange(NODES) + 1)[:, None] / 2.0 * _P * _WQ[None, :]


# ---------------------------------------------------------------------------
# Jumps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RayJump:
    """Jump on one ray: lower/upper triangular with entry
    coefficient * e^{exponent_sign * i theta}, or diagonal diag(coefficient, 1/coefficient).

    ``outward`` is False only for the negative axis, which is oriented
    toward the junction.
    """

    angle: float
    kind: str
    coefficient: complex
    exponent_sign: int
    outward: bool = True

    def entry(self, zeta, y: float):
        zeta = np.asarray(zeta, dtype=complex)
        return self.coefficient * np.exp(self.exponent_sign * 1j * (zeta ** 3 + y * zeta))

    def matrices(self, zeta, y: float, d2=None) -> np.ndarray:
        """Jump matrices at the points zeta, shape (n, 2, 2).  When d2 =
        (zeta - c)^{2ip} is given, the jump is conjugated to
        D^{-1} J D with D = (zeta - c)^{ip sigma3}."""
        zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
        J = np.zeros((len(zeta), 2, 2), dtype=complex)
        if self.kind == "diag":
            J[:, 0, 0] = self.coefficient
            J[:, 1, 1] = 1.0 / self.coefficient
            return J
        J[:, 0, 0] = 1.0
        J[:, 1, 1] = 1.0
        e = self.entry(zeta, y)
        if self.kind == "lower":
            J[:, 1, 0] = e if d2 is None else e * d2
        else:
            J[:, 0, 1] = e if d2 is None else e / d2
        return J

    def at_origin(self) -> Complex2x2:
        if self.kind == "diag":
            return Complex2x2.diag(self.coefficient, 1.0 / self.coefficient)
        if self.kind == "lower":
            return Complex2x2.lower(self.coefficient)
        return Complex2x2.upper(self.coefficient)


def jump_templates(p: float, tau: complex) -> tuple[RayJump, ...]:
    """The five ray jumps, counterclockwise from arg = pi/2."""
    beta = math.exp(-2.0 * PI * p)
    return (
        RayJump(PI / 2, "lower", tau, -1),
        RayJump(5 * PI / 6, "upper", -tau * beta, +1),
        RayJump(PI, "diag", math.exp(2.0 * PI * p), 0, outward=False),
        RayJump(-5 * PI / 6, "lower", -tau * beta, -1),
        RayJump(-PI / 2, "upper", tau, +1),
    )


def cyclic_product(p: float, tau: complex) -> Complex2x2:
    """Product of the jumps met on a small counterclockwise loop around the
    junction (inverse jump where the ray points inward); equals I."""
    out = Complex2x2.identity()
    for r in jump_templates(p, tau):
        m = r.at_origin()
        out = out @ (m if r.outward else m.inverse())
    return out


def check_tau(p: float, tau: complex, tol: float = 1e-10) -> None:
    if abs(tau * tau - math.expm1(2.0 * PI * p)) > tol * max(1.0, abs(tau) ** 2):
        raise DomainError(f"tau^2 must equal e^(2 pi p) - 1 (p = {p}, tau = {tau})")


# ---------------------------------------------------------------------------
# Contour
# ---------------------------------------------------------------------------


@dataclass
class _Segment:
    a: complex
    b: complex
    kind: str  # "ray", "poly"
    ray: RayJump | None
    outer: bool
    grade_a: bool
    grade_b: bool


@dataclass
class Contour:
    p: float
    tau: complex
    y: float
    junction: float
    rho: float
    radii: dict
    segments: list
    levels: int
    # flattened panel data
    mid: np.ndarray = field(repr=False, default=None)
    half: np.ndarray = field(repr=False, default=None)
    nodes: np.ndarray = field(repr=False, default=None)
    weights: np.ndarray = field(repr=False, default=None)
    jumps: np.ndarray = field(repr=False, default=None)
    panel_segment: np.ndarray = field(repr=False, default=None)

    @property
    def n_panels(self) -> int:
        return len(self.mid)

    def jump_at(self, seg_index: int, zeta) -> np.ndarray:
        return _segment_jump(self.segments[seg_index], np.atleast_1d(zeta), self.y,
                             self.junction, self.p)


def _segment_jump(seg: _Segment, zeta, y, c, p) -> np.ndarray:
    zeta = np.asarray(zeta, dtype=complex)
    if seg.kind == "poly":
        d = np.exp(1j * p * np.log(zeta - c))
        J = np.zeros((len(zeta), 2, 2), dtype=complex)
        J[:, 0, 0] = 1.0 / d
        J[:, 1, 1] = d
        return J
    d2 = np.exp(2j * p * np.log(zeta - c)) if seg.outer else None
    return seg.ray.matrices(zeta, y, d2)


def _phase_speed(z: complex, y: float) -> float:
    """|theta'| + |theta''|^{1/2}: resolves both oscillation and the
    Gaussian width of the jump near a saddle."""
    return abs(3.0 * z * z + y) + math.sqrt(6.0 * abs(z))


def _junction(y: float) -> float:
    return -math.sqrt(-y / 3.0) if y < 0 else 0.0


def truncation_radius(ray: RayJump, y: float, c: float, trunc_tol: float) -> float:
    """Distance from c beyond which |coefficient e^{+-i theta}| < trunc_tol."""
    t = np.linspace(0.0, MAX_RADIUS + 1.0, 20001)
    z = c + t * cmath.exp(1j * ray.angle)
    # log-magnitude: the entry itself overflows where it grows
    log_mag = math.log(abs(ray.coefficient)) - ray.exponent_sign * np.imag(z ** 3 + y * z)
    big = np.nonzero(log_mag >= math.log(trunc_tol))[0]
    if len(big) == 0:
        return 0.0
    r = t[min(big[-1] + 1, len(t) - 1)]
    if r > MAX_RADIUS:
        raise ConfigurationError(
            f"jump on the ray at angle {ray.angle:.4f} does not decay below {trunc_tol:.1e} "
            f"within radius {MAX_RADIUS} (y = {y})")
    return float(r)


def _breaks(length: float, levels: int, grade_a: bool, grade_b: bool, speed=None) -> np.ndarray:
    """Panel breakpoints on [0, length], geometrically graded toward the
    flagged ends.  ``speed(t)`` bounds the local phase velocity of the jump;
    panels are split until each spans at most PHASE_PER_PANEL radians and
    MAX_PANEL in length."""
    if grade_a and grade_b:
        half = 0.5 * length
        left = _breaks(half, levels, True, False, speed)
        right = _breaks(half, levels, True, False,
                        None if speed is None else (lambda t: speed(length - t)))
        return np.concatenate([left, length - right[-2::-1]])
    if grade_b:
        flipped = None if speed is None else (lambda t: speed(length - t))
        return length - _breaks(length, levels, True, False, flipped)[::-1]
    if grade_a:
        pts = np.array([0.0] + [length * GRADING ** k for k in range(levels, 0, -1)] + [length])
    else:
        pts = np.array([0.0, length])
    out = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        m = (hi - lo) / MAX_PANEL
        if speed is not None:
            v = max(speed(t) for t in np.linspace(lo, hi, 9))
            m = max(m, (hi - lo) * v / PHASE_PER_PANEL)
        m = max(1, int(math.ceil(m)))
        out.extend(lo + (hi - lo) * np.arange(1, m + 1) / m)
    return np.array(out)


def build_contour(p: float, tau: complex, y: float, trunc_tol: float = TRUNC_TOL,
                  panels: int = DEFAULT_PANELS) -> Contour:
    p = float(p)
    y = float(y)
    if abs(y) > 40.0:
        raise DomainError(f"|y| must be at most 40, got {y}")
    if panels < 8:
        raise DomainError("need at least 8 panels")
    c = _junction(y)
    rays = jump_templates(p, tau)
    radii = {}
    for r in rays:
        if r.kind != "diag":
            radii[r.angle] = truncation_radius(r, y, c, trunc_tol)
    positive = [v for v in radii.values() if v > 0]
    rho = min(1.0, 0.5 * min(positive)) if positive else 1.0
    levels = max(2, panels // 6)

    segs: list[_Segment] = []
    for r in rays:
        e = cmath.exp(1j * r.angle)
        if r.kind == "diag":
            segs.append(_Segment(c - rho, c, "ray", r, False, True, True))
            continue
        segs.append(_Segment(c, c + rho * e, "ray", r, False, True, True))
        R = radii[r.angle]
        if R > rho:
            segs.append(_Segment(c + rho * e, c + R * e, "ray", r, True, True, False))
    verts = [c + rho * cmath.exp(1j * a) for a in (0.0, PI / 2, 5 * PI / 6, PI, 7 * PI / 6, 3 * PI / 2)]
    for k in range(6):
        segs.append(_Segment(verts[k], verts[(k + 1) % 6], "poly", None, False, True, True))

    mids, halves, seg_idx = [], [], []
    for i, s in enumerate(segs):
        L = abs(s.b - s.a)
        u = (s.b - s.a) / L
        speed = None
        if s.kind == "ray" and s.ray.kind != "diag":
            speed = (lambda t, a=s.a, u=u: _phase_speed(a + u * t, y))
        br = _breaks(L, levels, s.grade_a, s.grade_b, speed)
        for lo, hi in zip(br[:-1], br[1:]):
            mids.append(s.a + u * 0.5 * (lo + hi))
            halves.append(u * 0.5 * (hi - lo))
            seg_idx.append(i)
    mid = np.array(mids)
    half = np.array(halves)
    nodes = (mid[:, None] + half[:, None] * _X[None, :]).ravel()
    weights = (half[:, None] * _WQ[None, :]).ravel()
    seg_idx = np.array(seg_idx)
    jumps = np.empty((len(nodes), 2, 2), dtype=complex)
    for i, s in enumerate(segs):
        sel = np.repeat(seg_idx == i, NODES)
        jumps[sel] = _segment_jump(s, nodes[sel], y, c, p)
    return Contour(p, tau, y, c, rho, radii, segs, levels, mid, half, nodes, weights, jumps, seg_idx)


# ---------------------------------------------------------------------------
# Cauchy transforms of the Legendre basis
# ---------------------------------------------------------------------------


def _q0(w):
    # the principal log of the ratio has its cut exactly on [-1, 1]
    return 0.5 * np.log((w + 1.0) / (w - 1.0))


def _bernstein(w):
    r = w + np.sqrt(w - 1.0) * np.sqrt(w + 1.0)
    return np.maximum(np.abs(r), 1.0 / np.maximum(np.abs(r), 1e-300))


def _legendre_q(w: np.ndarray, n: int) -> np.ndarray:
    """Q_0..Q_{n-1}(w) off [-1, 1] by Miller's backward recurrence, shape (n, len(w))."""
    w = np.asarray(w, dtype=complex)
    rho = _bernstein(w)
    start = n + 10 + np.ceil(18.5 / np.log(np.maximum(rho, 1.0 + 1e-6))).astype(int)
    start = np.minimum(start, 200000)
    K = int(start.max()) if len(w) else 0
    out = np.zeros((n, len(w)), dtype=complex)
    q1 = np.zeros(len(w), dtype=complex)  # q_{k+1}
    q0 = np.zeros(len(w), dtype=complex)  # q_k
    for k in range(K, 0, -1):
        q0 = np.where(start == k, 1e-200, q0)
        qm = ((2 * k + 1) * w * q0 - (k + 1) * q1) / k
        q1, q0 = q0, qm
        if k - 1 < n:
            out[k - 1] = q0
        # keep the magnitudes in range
        s = np.abs(q0)
        big = s > 1e100
        if big.any():
            q0 = np.where(big, q0 / s, q0)
            q1 = np.where(big, q1 / s, q1)
            out[:, big] /= s[big]
    return out * (_q0(w) / out[0])[None, :]


def _ferrers_q(x: np.ndarray, n: int) -> np.ndarray:
    """Ferrers functions of the second kind on (-1, 1), shape (n, len(x))."""
    x = np.asarray(x, dtype=float)
    Q = np.empty((n, len(x)))
    Q[0] = 0.5 * np.log((1.0 + x) / (1.0 - x))
    if n > 1:
        Q[1] = x * Q[0] - 1.0
    for k in range(1, n - 1):
        Q[k + 1] = ((2 * k + 1) * x * Q[k] - k * Q[k - 1]) / (k + 1)
    return Q


def cauchy_matrix(contour: Contour, z: np.ndarray, on_panel=None, side: int = -1) -> np.ndarray:
    """Matrix C with (C f)_i = (1/2 pi i) int f(s)/(s - z_i) ds for f given
    by its values at the contour nodes.

    ``on_panel[i] = (panel, x)`` marks z_i as the point with reference
    coordinate x on that panel; the boundary value from the ``side``
    (+1 left, -1 right of the panel direction) is returned there.
    """
    z = np.asarray(z, dtype=complex)
    nodes, wts = contour.nodes, contour.weights
    with np.errstate(divide="ignore", invalid="ignore"):
        C = (wts[None, :] / (nodes[None, :] - z[:, None])) / (2j * PI)
    npan = contour.n_panels
    W = (z[:, None] - contour.mid[None, :]) / contour.half[None, :]
    near = _bernstein(W) < NEAR_RHO
    self_pan = np.full(len(z), -1)
    if on_panel is not None:
        for i, item in enumerate(on_panel):
            if item is not None:
                self_pan[i] = item[0]
                near[i, item[0]] = False
    ii, pp = np.nonzero(near)
    if len(ii):
        Q = _legendre_q(W[ii, pp], NODES)  # (NODES, m)
        blocks = (1j / PI) * (Q.T @ _T)  # (m, NODES)
        cols = pp[:, None] * NODES + np.arange(NODES)[None, :]
        C[ii[:, None], cols] = blocks
    for i in np.nonzero(self_pan >= 0)[0]:
        pnl, x = on_panel[i]
        x = float(np.real(x))
        QF = _ferrers_q(np.array([x]), NODES)[:, 0]
        Pk = _legendre_table(np.array([x]), NODES)[:, 0]
        row = (1j / PI) * (QF @ _T) + side * 0.5 * (Pk @ _T)
        C[i, pnl * NODES:(pnl + 1) * NODES] = row
    return C


def _self_cauchy_minus(contour: Contour) -> np.ndarray:
    """C_- evaluated at the contour nodes themselves."""
    npan = contour.n_panels
    on = [(k // NODES, _X[k % NODES]) for k in range(npan * NODES)]
    return cauchy_matrix(contour, contour.nodes, on, side=-1)


# ---------------------------------------------------------------------------
# Solve
# ---------------------------------------------------------------------------


@dataclass
class RHSolution:
    p: float
    tau: complex
    y: float
    panels: int
    W1: Complex2x2
    W2: Complex2x2
    jump_residual: float
    cond: float = float("nan")
    contour: Contour | None = field(default=None, repr=False)
    density: np.ndarray | None = field(default=None, repr=False)  # f = mu (J - I), shape (N, 2, 2)

    def X(self, z) -> np.ndarray:
        """The sectionally analytic unknown at points off the contour, shape (n, 2, 2)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.broadcast_to(np.eye(2, dtype=complex), (len(z), 2, 2)).copy()
        if self.contour is None:
            return out
        C = cauchy_matrix(self.contour, z)
        return out + np.einsum("ij,jab->iab", C, self.density)

    def W(self, z) -> np.ndarray:
        """W(z) itself, undoing the outer (z - c)^{ip sigma3} factor."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        X = self.X(z)
        if self.contour is None:
            return X
        c = self.contour.junction
        outside = ~_inside_polygon(self.contour, z)
        d = np.exp(1j * self.p * np.log(z - c))
        X[outside, :, 0] /= d[outside, None]
        X[outside, :, 1] *= d[outside, None]
        return X


def _inside_polygon(contour: Contour, z: np.ndarray) -> np.ndarray:
    verts = [s.a for s in contour.segments if s.kind == "poly"]
    inside = np.ones(len(z), dtype=bool)
    for k in range(len(verts)):
        a, b = verts[k], verts[(k + 1) % len(verts)]
        inside &= np.imag(np.conj(b - a) * (z - a)) > 0
    return inside


def _trivial(p, tau, y, panels) -> RHSolution:
    zero = Complex2x2(0j, 0j, 0j, 0j)
    return RHSolution(p, tau, y, panels, zero, zero, 0.0, 1.0)


def solve_w(p: float, tau: complex, y: float, panels: int = DEFAULT_PANELS,
            trunc_tol: float = TRUNC_TOL, check: bool = True) -> RHSolution:
    p = float(np.real(p))
    tau = complex(tau)
    y = float(y)
    if panels < 8:
        raise DomainError("need at least 8 panels")
    check_tau(p, tau)
    if p == 0.0 and tau == 0:
        return _trivial(p, tau, y, panels)
    contour = build_contour(p, tau, y, trunc_tol, panels)
    Cm = _self_cauchy_minus(contour)
    N = len(contour.nodes)
    D = contour.jumps - np.eye(2)[None, :, :]
    # unknown: one row (mu_1, mu_2) of mu; block (k, j) acts on mu_j in component k
    A = np.eye(2 * N, dtype=complex)
    for k in range(2):
        for j in range(2):
            A[k * N:(k + 1) * N, j * N:(j + 1) * N] -= Cm * D[None, :, j, k]
    lu, piv = lu_factor(A, check_finite=False)
    anorm = np.abs(A).sum(axis=0).max()
    rcond, _ = zgecon(lu, anorm, norm="1")
    cond = 1.0 / rcond if rcond > 0 else float("inf")
    if cond > COND_LIMIT:
        raise NearNonSolvabilityError(
            f"RH linear system condition number {cond:.2e} exceeds {COND_LIMIT:.0e} at y = {y}")
    rhs = np.zeros((2 * N, 2), dtype=complex)
    rhs[:N, 0] = 1.0
    rhs[N:, 1] = 1.0
    sol = lu_solve((lu, piv), rhs, check_finite=False)
    mu = np.empty((N, 2, 2), dtype=complex)
    for r in range(2):
        mu[:, r, 0] = sol[:N, r]
        mu[:, r, 1] = sol[N:, r]
    f = np.einsum("nab,nbc->nac", mu, D)
    wts = contour.weights
    s = contour.nodes
    M1 = -np.einsum("n,nab->ab", wts, f) / (2j * PI)
    M2 = -np.einsum("n,nab->ab", wts * s, f) / (2j * PI)
    ipc = 1j * p * contour.junction
    W1 = M1 + ipc * np.diag([1.0, -1.0])
    W2 = M2.copy()
    W2[1, 0] = M2[1, 0] + ipc * W1[1, 0]
    W2[0, 1] = M2[0, 1] - ipc * W1[0, 1]
    out = RHSolution(p, tau, y, panels, Complex2x2.from_array(W1), Complex2x2.from_array(W2),
                     float("nan"), cond, contour, f)
    if check:
        out.jump_residual = jump_residual(out)
    return out


def jump_residual(sol: RHSolution, x_probe=(-0.5, 0.5)) -> float:
    """max ||X_+ - X_- J|| / max(1, ||X_-|| ||J||) over points strictly
    inside every panel (away from the collocation nodes)."""
    if sol.contour is None:
        return 0.0
    ct = sol.contour
    pts, on, segs = [], [], []
    for k in range(ct.n_panels):
        for x in x_probe:
            pts.append(ct.mid[k] + ct.half[k] * x)
            on.append((k, x))
            segs.append(ct.panel_segment[k])
    pts = np.array(pts)
    I = np.eye(2)[None]
    Xp = I + np.einsum("ij,jab->iab", cauchy_matrix(ct, pts, on, side=+1), sol.density)
    Xm = I + np.einsum("ij,jab->iab", cauchy_matrix(ct, pts, on, side=-1), sol.density)
    J = np.empty_like(Xp)
    segs = np.array(segs)
    for i in np.unique(segs):
        sel = segs == i
        J[sel] = ct.jump_at(i, pts[sel])
    res = np.abs(Xp - np.einsum("nab,nbc->nac", Xm, J)).max(axis=(1, 2))
    scale = np.maximum(1.0, np.abs(Xm).max(axis=(1, 2)) * np.abs(J).max(axis=(1, 2)))
    return float((res / scale).max())


def probe_points(sol: RHSolution, count: int = 20) -> np.ndarray:
    """Points off the contour: between the rays, inside and outside the polygon."""
    ct = sol.contour
    c = ct.junction if ct is not None else 0.0
    rho = ct.rho if ct is not None else 1.0
    mids = [PI / 4, 2 * PI / 3, 11 * PI / 12, -11 * PI / 12, -2 * PI / 3, -PI / 4, 0.0,
            PI / 8, -PI / 8, 3 * PI / 4]
    pts = []
    for k in range(count):
        a = mids[k % len(mids)]
        r = rho * (0.45 if k < len(mids) else 1.9)
        pts.append(c + r * cmath.exp(1j * a))
    return np.array(pts)


def det_check(sol: RHSolution, count: int = 20) -> float:
    X = sol.X(probe_points(sol, count))
    det = X[:, 0, 0] * X[:, 1, 1] - X[:, 0, 1] * X[:, 1, 0]
    return float(np.abs(det - 1.0).max())


# ---------------------------------------------------------------------------
# U, V, Q
# ---------------------------------------------------------------------------


def extract_uvq(sol: RHSolution):
    U = sol.W1.m12
    V = sol.W1.m21
    if abs(V) <= 1e-10:
        raise ZeroOfVError(f"W1_21 = {V:.3e} vanishes; Q has a pole at y = {sol.y}")
    Q = 1j * sol.W1.m11 - 1j * sol.W2.m21 / V
    return U, V, Q


def uv_jet(sol: RHSolution):
    """(U, U', V, V') from the first two moments."""
    W1, W2 = sol.W1, sol.W2
    U, V = W1.m12, W1.m21
    dU = 1j * W2.m12 + 1j * U * W1.m11
    dV = -1j * W2.m21 + 1j * V * W1.m11
    return U, dU, V, dV


def schwarz_deviation(sol: RHSolution) -> float:
    """|V + conj(U)|, which vanishes for real p and y."""
    return abs(sol.W1.m21 + sol.W1.m12.conjugate())


def com_check(p: float, tau: complex, y: float, dy: float = 1e-3,
              panels: int = DEFAULT_PANELS) -> float:
    """|U'V - UV' - ip/3| with U', V' from central differences."""
    if float(np.real(p)) == 0.0:
        return 0.0
    sols = [solve_w(p, tau, y + k * dy, panels, check=False) for k in (-1, 0, 1)]
    Us = [s.W1.m12 for s in sols]
    Vs = [s.W1.m21 for s in sols]
    dU = (Us[2] - Us[0]) / (2 * dy)
    dV = (Vs[2] - Vs[0]) / (2 * dy)
    return abs(dU * Vs[1] - Us[1] * dV - 1j * p / 3.0)


def q_to_u(y: float, Q: complex):
    """(x, u) with u(x) = -(3/2)^{1/3} Q(y) at x = -(2/3)^{1/3} y."""
    return -(2.0 / 3.0) ** (1.0 / 3.0) * y, -(1.5) ** (1.0 / 3.0) * Q


@dataclass
class VSweep:
    p: float
    tau: complex
    y: np.ndarray
    V: np.ndarray
    dV: np.ndarray
    U: np.ndarray
    dU: np.ndarray
    cond: np.ndarray
    method: np.ndarray


def uv_sweep(p: float, tau: complex, y_values, direct_max: float = 10.0, panels: int = DEFAULT_PANELS,
             tol: float = 1e-11) -> VSweep:
    """U, V and derivatives along y.  Direct solves for y <= direct_max;
    beyond it the (U, V) system is integrated from the direct solve at
    direct_max, because the undeformed jumps grow like e^{2 (y/3)^{3/2}}."""
    from .ode import integrate_uv

    ys = np.asarray(sorted(float(v) for v in y_values))
    n = len(ys)
    U, dU, V, dV = (np.zeros(n, dtype=complex) for _ in range(4))
    cond = np.full(n, np.nan)
    method = np.empty(n, dtype=object)
    far = ys > direct_max
    for i in np.nonzero(~far)[0]:
        s = solve_w(p, tau, ys[i], panels, check=False)
        U[i], dU[i], V[i], dV[i] = uv_jet(s)
        cond[i] = s.cond
        method[i] = "direct"
    if far.any():
        s = solve_w(p, tau, direct_max, panels, check=False)
        seed = (direct_max,) + tuple(uv_jet(s))
        tr = integrate_uv(p, seed, (direct_max, float(ys[far].max())), tol=tol, grid=ys[far])
        U[far], dU[far], V[far], dV[far] = tr.U, tr.dU, tr.V, tr.dV
        method[far] = "continued"
    return VSweep(p, tau, ys, V, dV, U, dU, cond, method)


def v_at(p: float, tau: complex, y: float, direct_max: float = 10.0,
         panels: int = DEFAULT_PANELS) -> complex:
    return complex(uv_sweep(p, tau, [y], direct_max, panels).V[0])


def uv_dense(p: float, tau: complex, y_range, anchor: float = 0.0, spacing: float = 0.05,
             panels: int = DEFAULT_PANELS, tol: float = 1e-11):
    """Dense (U, V) trace over y_range, seeded by one direct solve at ``anchor``."""
    from .ode import integrate_uv

    ya, yb = float(min(y_range)), float(max(y_range))
    s = solve_w(p, tau, anchor, panels, check=False)
    grid = np.linspace(ya, yb, int(round((yb - ya) / spacing)) + 1)
    return integrate_uv(p, (anchor,) + tuple(uv_jet(s)), (ya, yb), tol=tol, grid=grid)
