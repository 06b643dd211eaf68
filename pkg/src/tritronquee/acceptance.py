"""The ten acceptance checks, shared by ``tritronquee verify`` and the test suite.

Each check returns a CriterionResult with the measured quantities, so a
failure report says by how much a tolerance was missed.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import pcparametrix as pc
from . import rhsolver as rh
from .asymptotics import (MinusInfinityFormula, decaying_minus_branch, decaying_plus_branch,
                          u_plus_series, v_asym_plus)
from .integrals import total_integral
from .ode import trace_tritronquee
from .params import Sign, TritronqueeSpec, is_half_integer, p_from_alpha, q_tau

LN2_2PI = math.log(2.0) / (2.0 * math.pi)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"criterion {self.number:2d} [{status}] {self.title}: {parts} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": bool(self.passed),
                "seconds": round(self.seconds, 3),
                "measured": {k: _jsonable(v) for k, v in self.measured.items()}}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return f"{v:.3e}"
    if isinstance(v, complex):
        return f"{v.real:.6g}{v.imag:+.6g}i"
    return str(v)


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _timed(number: int, title: str, fn) -> CriterionResult:
    t0 = time.perf_counter()
    passed, measured = fn()
    return CriterionResult(number, title, bool(passed), measured, time.perf_counter() - t0)


# ---------------------------------------------------------------------------


def criterion_1() -> CriterionResult:
    def run():
        _, q0, t0 = q_tau(0.0)
        _, q1, t1 = q_tau(0.5 + 1j * LN2_2PI)
        errs = [abs(q0 + LN2_2PI), abs(t0 - 1j * math.sqrt(2.0)), abs(q1 - LN2_2PI), abs(t1 - 1.0)]
        return max(errs) <= 1e-12, {"max_err": max(errs), "q(0)": q0, "tau(0)": t0,
                                    "q(rogue)": q1, "tau(rogue)": t1}
    return _timed(1, "parameter maps", run)


def criterion_2(samples: int = 100, seed: int = 20240617) -> CriterionResult:
    def run():
        rng = np.random.default_rng(seed)
        worst_a = worst_b = 0.0
        n = 0
        while n < samples:
            alpha = complex(rng.uniform(-3, 3), rng.uniform(-1, 1))
            if is_half_integer(alpha, 1e-6):
                continue
            _, q, tau = q_tau(alpha)
            p = p_from_alpha(alpha)
            worst_a = max(worst_a, abs(tau * tau + 1.0 + cmath.exp(-2j * math.pi * alpha)))
            worst_b = max(worst_b, abs(cmath.exp(2.0 * math.pi * (p - q)) - tau * tau))
            n += 1
        return max(worst_a, worst_b) <= 1e-10, {"samples": n, "tau_identity": worst_a,
                                                "p_q_identity": worst_b}
    return _timed(2, "algebraic invariants on random alpha", run)


def criterion_3() -> CriterionResult:
    def run():
        out = {}
        worst = 0.0
        xs = np.linspace(40.0, 60.0, 201)
        for alpha in (0.0, 0.3, 0.5 + 0.11j):
            tr = trace_tritronquee(alpha, Sign.MINUS, xmin=39.0, xmax=60.0, tol=1e-11)
            dev = max(abs(tr.u(x) - u_plus_series(x, alpha, Sign.MINUS, order=4)) for x in xs)
            out[f"dev[{alpha}]"] = dev
            worst = max(worst, dev)
        return worst <= 1e-6, out
    return _timed(3, "trace vs order-4 series on [40, 60]", run)


def criterion_4() -> CriterionResult:
    def run():
        t0 = time.perf_counter()
        tr = trace_tritronquee(0.0, Sign.MINUS, xmin=-60.0, xmax=30.0, tol=1e-10)
        spec = TritronqueeSpec.from_alpha(0.0)
        f = MinusInfinityFormula.from_spec(spec)
        xs = np.arange(-60.0, -40.0 + 1e-9, 0.05)
        dev = max(abs(tr.u(x) - f(x)) for x in xs)
        elapsed = time.perf_counter() - t0
        return dev <= 0.05 and elapsed <= 10.0, {"max_dev": dev, "runtime_s": elapsed}
    return _timed(4, "alpha = 0 trace vs oscillatory formula on [-60, -40]", run)


def criterion_5() -> CriterionResult:
    def run():
        out = {}
        ok = True
        for alpha in (0.15, -0.15):
            spec = TritronqueeSpec.from_alpha(alpha)
            f = MinusInfinityFormula.from_spec(spec)
            tr = trace_tritronquee(alpha, Sign.MINUS, xmin=-52.0, xmax=30.0, tol=1e-10)
            xs = (-30.0, -40.0, -50.0)
            rel = [abs(tr.u(x) / f(x) - 1.0) for x in xs]
            out[f"{spec.regime.value}[{alpha}]"] = rel
            # informational: the trace minus both decaying branches
            both = [abs(tr.u(x) - decaying_plus_branch(x, spec.q, spec.tau)
                        - decaying_minus_branch(x, spec.q, spec.tau)) / abs(f(x)) for x in xs]
            out[f"two_branch[{alpha}]"] = both
            ok &= rel[2] <= 0.2 and rel[0] > rel[1] > rel[2]
        return ok, out
    return _timed(5, "decaying branches at x = -30, -40, -50", run)


def criterion_6() -> CriterionResult:
    def run():
        out = {}
        ok = True
        for alpha in (0.5 + 0.2j, -0.5 + 0.2j):
            tr = trace_tritronquee(alpha, Sign.MINUS, xmin=-40.0, xmax=40.0, tol=1e-10)
            m = float(np.min(np.abs(tr.u_values)))
            out[f"poles[{alpha}]"] = len(tr.poles)
            out[f"min|u|[{alpha}]"] = m
            ok &= len(tr.poles) == 0 and m > 0.0
        return ok, out
    return _timed(6, "no poles or zeros on [-40, 40]", run)


def criterion_7() -> CriterionResult:
    def run():
        out = {}
        ok = True
        for alpha in (0.0, 0.1, 0.5 + 1j * LN2_2PI):
            tr = trace_tritronquee(alpha, Sign.MINUS, xmin=-100.0, xmax=60.0, tol=1e-10)
            r1 = total_integral(alpha, trace=tr)
            r2 = total_integral(alpha, trace=tr, A=r1.A - 5.0, B=r1.B + 5.0)
            shift = abs((r1.lhs / r1.rhs) - (r2.lhs / r2.rhs))
            out[f"rel_err[{alpha}]"] = r1.rel_err
            out[f"AB_shift[{alpha}]"] = shift
            ok &= r1.rel_err <= 1e-3 and shift <= 1e-6
        return ok, out
    return _timed(7, "total integral identity", run)


def criterion_8() -> CriterionResult:
    def run():
        p = LN2_2PI
        out = {}
        triv = rh.solve_w(0.0, 0.0, 1.0)
        w_err = max(triv.W1.norm(), triv.W2.norm(), rh.det_check(triv) if triv.contour else 0.0)
        out["p0_|W-I|"] = w_err
        com = max(rh.com_check(p, 1.0, y, 1e-3) for y in (-10.0, 0.0, 10.0))
        out["com_check"] = com
        v25 = rh.v_at(p, 1.0, 25.0, direct_max=8.0)
        v_ref = v_asym_plus(25.0, p)
        v_rel = abs(v25 / v_ref - 1.0)
        out["V(25)_rel"] = v_rel
        coarse = _q_vs_ode(p, panels=8, ode_tol=1e-7)
        fine = _q_vs_ode(p, panels=12, ode_tol=1e-11)
        out["Q_vs_ODE_coarse"] = coarse
        out["Q_vs_ODE_fine"] = fine
        ok = (w_err <= 1e-12 and com <= 1e-5 and v_rel <= 0.12 and fine <= 1e-3
              and fine <= max(coarse, 1e-8))
        return ok, out
    return _timed(8, "RH oracle", run)


def _q_vs_ode(p: float, panels: int, ode_tol: float) -> float:
    tr = trace_tritronquee(0.5 + 1j * p, Sign.MINUS, xmin=-10.0, xmax=30.0, tol=ode_tol)
    worst = 0.0
    for y in (3.0, 6.0, 10.0):
        _, _, Q = rh.extract_uvq(rh.solve_w(p, 1.0, y, panels=panels, check=False))
        x, u = rh.q_to_u(y, Q)
        worst = max(worst, abs(u - tr.u(x)))
    return worst


def criterion_9() -> CriterionResult:
    def run():
        p = LN2_2PI
        exact = v_asym_plus(6.0, p)
        # direct RH solves on a unit grid (continued past y = 8) ...
        sweep = rh.uv_sweep(p, 1.0, np.arange(-15.0, 15.0 + 1e-9, 1.0), direct_max=8.0)
        # ... and a dense (U, V) trace seeded at y = 0, checked against the solves
        dense = rh.uv_dense(p, 1.0, (-15.0, 15.0), anchor=0.0, spacing=0.05)
        gap = max(abs(complex(dense.evaluate(y)[2]) - v)
                  for y, v, m in zip(sweep.y, sweep.V, sweep.method) if m == "direct")
        min_v = float(min(np.abs(sweep.V).min(), np.abs(dense.V).min()))
        min_dv = float(min(np.abs(sweep.dV).min(), np.abs(dense.dV).min()))
        ok = exact == -1.0 and min_v > 0.0 and min_dv > 0.0
        return ok, {"v_asym_plus(6)": exact, "min|V|": min_v, "min|V'|": min_dv,
                    "samples": len(sweep.y) + len(dense.y_grid), "dense_vs_direct": gap}
    return _timed(9, "V zero-free and critical-point-free on [-15, 15]", run)


def criterion_10() -> CriterionResult:
    def run():
        p = LN2_2PI
        c = pc.pc_coefficients(p, 1.0)
        rs = abs(c.r * c.s + 2.0 * p)
        jumps = max(pc.pc_jump_residuals(c, radii=(0.5, 1.5)).values())
        ref = np.array([[0.0, c.r / 2j], [-c.s / 2j, 0.0]])
        sector = max(float(np.abs(pc.first_coefficient(c, ang) - ref).max())
                     for ang in (0.0, 0.5 * math.pi, -0.5 * math.pi, 0.9 * math.pi, -0.9 * math.pi))
        radii = np.array([8.0, 12.0, 18.0, 30.0])
        errs = np.array([pc.expansion_error(R * cmath.exp(0.125j * math.pi), c) for R in radii])
        slope = float(np.polyfit(np.log(radii), np.log(errs), 1)[0])
        c3 = pc.pc_coefficients(0.3, math.sqrt(math.expm1(0.6 * math.pi)))
        conj = abs(c3.s + c3.r.conjugate())
        ok = (rs <= 1e-12 and jumps <= 1e-8 and sector <= 1e-8 and abs(slope + 2.0) <= 0.2
              and conj <= 1e-10)
        return ok, {"rs+2p": rs, "max_jump_residual": jumps, "sector_spread": sector,
                    "remainder_slope": slope, "s+conj(r)": conj}
    return _timed(10, "parabolic cylinder parametrix", run)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}

SUITES = {
    "params": (1, 2),
    "ode": (3, 4, 5, 6),
    "integral": (7,),
    "rh": (8, 9),
    "pc": (10,),
}


def run_suite(name: str | None = None) -> list[CriterionResult]:
    numbers = sorted(CRITERIA) if name in (None, "all") else SUITES[name]
    return [CRITERIA[n]() for n in numbers]
