"""Command-line front end.

Exit codes: 0 success, 1 numerical failure, 2 domain error (for example
alpha in Z + 1/2).  Complex scalars are written ``re,im``.
"""

from __future__ import annotations

import cmath
import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field

import click
import numpy as np

from . import __version__
from .errors import ConfigurationError, DomainError, TritronqueeError

SCHEMA_VERSION = 1
FLOAT_FMT = "%.12e"


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------


def parse_complex(text) -> complex:
    if isinstance(text, complex):
        return text
    if isinstance(text, (int, float)):
        return complex(text)
    s = str(text).strip()
    try:
        if "," in s:
            re_s, im_s = s.split(",", 1)
            return complex(float(re_s), float(im_s))
        return complex(float(s), 0.0)
    except ValueError as exc:
        raise DomainError(f"cannot parse complex value {text!r} (expected re or re,im)") from exc


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real!r},{z.imag!r}"


@dataclass
class RunConfig:
    command: str
    alpha: complex = 0j
    sign: str = "minus"
    xmin: float = -60.0
    xmax: float = 60.0
    spacing: float = 0.05
    tol: float = 1e-10
    p: float = 0.0
    tau: complex = 0j
    y: tuple = ()
    panels: int = 12
    A: float | None = None
    B: float | None = None
    output: str | None = None
    format: str = "csv"
    suite: str | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["alpha"] = format_complex(self.alpha)
        d["tau"] = format_complex(self.tau)
        d["y"] = list(self.y)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        for key in ("alpha", "tau"):
            if key in d:
                d[key] = parse_complex(d[key])
        if "y" in d:
            d["y"] = tuple(float(v) for v in d["y"])
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))

    def digest(self) -> str:
        d = self.to_dict()
        d.pop("output", None)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


def load_toml(path: str) -> dict:
    try:
        import tomllib
    except ImportError:  # Python 3.10
        try:
            import tomli as tomllib
        except ImportError as exc:
            raise ConfigurationError("TOML configs need Python 3.11+ or the tomli package") from exc
    with open(path, "rb") as fh:
        return tomllib.load(fh)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _cplx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _matrix(m) -> list:
    return [[_cplx(m.m11), _cplx(m.m12)], [_cplx(m.m21), _cplx(m.m22)]]


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _json_doc(cfg: RunConfig, payload: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "config_hash": cfg.digest(),
           "version": __version__}
    doc.update(payload)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv_header(cfg: RunConfig, columns) -> list[str]:
    return [f"# tritronquee {cfg.command} schema_version={SCHEMA_VERSION} config_hash={cfg.digest()}",
            f"# config {cfg.to_json()}",
            ",".join(columns)]


def _row(values) -> str:
    out = []
    for v in values:
        if v is None or (isinstance(v, float) and math.isnan(v)):
            out.append("")
        else:
            out.append(FLOAT_FMT % v)
    return ",".join(out)


# ---------------------------------------------------------------------------
# Commands (pure functions returning text)
# ---------------------------------------------------------------------------


def cmd_params(cfg: RunConfig) -> str:
    from .params import TritronqueeSpec

    spec = TritronqueeSpec.from_alpha(cfg.alpha, cfg.sign)
    return _json_doc(cfg, {"alpha": _cplx(spec.alpha), "sign": spec.sign.value, "q0": _cplx(spec.q0),
                           "q": _cplx(spec.q), "tau": _cplx(spec.tau), "regime": spec.regime.value})


def _trace(cfg: RunConfig):
    from .ode import trace_tritronquee

    return trace_tritronquee(cfg.alpha, cfg.sign, cfg.xmin, cfg.xmax, cfg.tol, spacing=cfg.spacing)


def cmd_trace(cfg: RunConfig) -> str:
    tr = _trace(cfg)
    if cfg.format == "json":
        return _json_doc(cfg, {
            "x": tr.x_grid.tolist(), "u": [_cplx(v) for v in tr.u_values],
            "du": [_cplx(v) for v in tr.du_values],
            "poles": [{"x0": r.location, "residue": r.residue} for r in tr.poles]})
    lines = _csv_header(cfg, ["x", "re_u", "im_u", "re_du", "im_du"])
    lines += [f"# pole {FLOAT_FMT % r.location} {r.residue:+d}" for r in tr.poles]
    for x, u, du in zip(tr.x_grid, tr.u_values, tr.du_values):
        lines.append(_row([x, u.real, u.imag, du.real, du.imag]))
    return "\n".join(lines) + "\n"


def cmd_poles(cfg: RunConfig) -> str:
    tr = _trace(cfg)
    if cfg.format == "json":
        return _json_doc(cfg, {"poles": [{"x0": r.location, "residue": r.residue,
                                          "local_coeffs": [_cplx(c) for c in r.local_coeffs]}
                                         for r in tr.poles]})
    lines = _csv_header(cfg, ["x0", "residue"])
    lines += [_row([r.location, float(r.residue)]) for r in tr.poles]
    return "\n".join(lines) + "\n"


def cmd_total_integral(cfg: RunConfig) -> str:
    from .integrals import total_integral

    r = total_integral(cfg.alpha, cfg.xmin, cfg.xmax, cfg.tol, A=cfg.A, B=cfg.B)
    return _json_doc(cfg, {"alpha": _cplx(r.alpha), "A": r.A, "B": r.B, "n_plus": r.n_plus,
                           "n_minus": r.n_minus, "lhs": _cplx(r.lhs), "rhs": _cplx(r.rhs),
                           "rel_err": r.rel_err, "tail_minus": _cplx(r.tail_minus),
                           "pv": _cplx(r.pv), "tail_plus": _cplx(r.tail_plus)})


def cmd_rh(cfg: RunConfig) -> str:
    from . import rhsolver as rh
    from .errors import ZeroOfVError

    tau = cfg.tau
    if tau == 0 and cfg.p != 0:
        tau = cmath.sqrt(math.expm1(2.0 * math.pi * cfg.p))
    rows = []
    for y in (cfg.y or (0.0,)):
        sol = rh.solve_w(cfg.p, tau, y, cfg.panels)
        U, V = sol.W1.m12, sol.W1.m21
        try:
            Q = _cplx(rh.extract_uvq(sol)[2])
        except ZeroOfVError:
            Q = None
        rows.append({"y": y, "U": _cplx(U), "V": _cplx(V), "Q": Q, "W1": _matrix(sol.W1),
                     "W2": _matrix(sol.W2), "cond": sol.cond, "jump_residual": sol.jump_residual})
    return _json_doc(cfg, {"p": cfg.p, "tau": _cplx(tau), "panels": cfg.panels, "solutions": rows})


def cmd_pc(cfg: RunConfig) -> str:
    from . import pcparametrix as pc

    tau = cfg.tau
    if tau == 0 and cfg.p != 0:
        tau = cmath.sqrt(math.expm1(2.0 * math.pi * cfg.p))
    c = pc.pc_coefficients(cfg.p, tau)
    payload = {"p": cfg.p, "tau": _cplx(tau), "a": _cplx(c.a), "r": _cplx(c.r), "s": _cplx(c.s),
               "A2_0": _cplx(c.A2_0), "A2_m1": _cplx(c.A2_m1), "rB1_0": _cplx(c.B1_0),
               "rB1_1": _cplx(c.B1_1), "rs_plus_2p": abs(c.r * c.s + 2 * cfg.p)}
    if cfg.p != 0:
        payload["jump_residuals"] = {f"{k:.6f}": v for k, v in pc.pc_jump_residuals(c).items()}
        payload["connection_residual_t1"] = pc.pc_connection_residual(c, 1.0)
    return _json_doc(cfg, payload)


def fig2_rows(xmin: float = -60.0, xmax: float = 60.0, step: float = 0.05, tol: float = 1e-10):
    """(x, Im u numeric, Im u asym plus | None, Im u asym minus | None) at alpha = 0."""
    from .asymptotics import MinusInfinityFormula, u_plus_series
    from .ode import trace_tritronquee
    from .params import TritronqueeSpec

    tr = trace_tritronquee(0.0, "minus", xmin, max(xmax, 30.0), tol, spacing=step)
    re_max = float(np.abs(tr.u_values.real).max())
    if re_max > 1e-6:
        raise ArithmeticError(f"alpha = 0 trace is not purely imaginary (max |Re u| = {re_max:.2e})")
    f = MinusInfinityFormula.from_spec(TritronqueeSpec.from_alpha(0.0))
    rows = []
    for x, u in zip(tr.x_grid, tr.u_values):
        plus = u_plus_series(x, 0.0, "minus", order=2).imag if x >= 1.0 else None
        minus = f(x).imag if x < 0 else None
        rows.append((float(x), float(u.imag), plus, minus))
    return rows


def cmd_fig2(cfg: RunConfig) -> str:
    lines = _csv_header(cfg, ["x", "im_u_numeric", "im_u_asym_plus", "im_u_asym_minus"])
    lines += [_row(r) for r in fig2_rows(cfg.xmin, cfg.xmax, cfg.spacing, cfg.tol)]
    return "\n".join(lines) + "\n"


def cmd_verify(cfg: RunConfig) -> tuple[str, bool]:
    from .acceptance import run_suite

    results = run_suite(cfg.suite)
    for r in results:
        click.echo(r.line(), err=True)
    ok = all(r.passed for r in results)
    return _json_doc(cfg, {"passed": ok, "criteria": [r.to_json() for r in results]}), ok


# ---------------------------------------------------------------------------
# click wiring
# ---------------------------------------------------------------------------


def _run(cfg: RunConfig, fn) -> None:
    try:
        result = fn(cfg)
        if isinstance(result, tuple):
            text, ok = result
        else:
            text, ok = result, True
        _emit(text, cfg.output)
    except TritronqueeError as exc:
        click.echo(json.dumps({"error": exc.code, "message": str(exc)}), err=True)
        sys.exit(exc.exit_code)
    except ArithmeticError as exc:
        click.echo(json.dumps({"error": "numerical", "message": str(exc)}), err=True)
        sys.exit(1)
    except ValueError as exc:
        click.echo(json.dumps({"error": "domain", "message": str(exc)}), err=True)
        sys.exit(2)
    sys.exit(0 if ok else 1)


def _make_config(ctx: click.Context, command: str, **kwargs) -> RunConfig:
    base = {}
    path = ctx.obj.get("config") if ctx.obj else None
    if path:
        base = dict(load_toml(path).get(command, {}))
    for k, v in kwargs.items():
        src = ctx.get_parameter_source(k) if k in ctx.params else None
        if v is not None and (k not in base or src != click.core.ParameterSource.DEFAULT):
            base[k] = v
    base["command"] = command
    return RunConfig.from_dict(base)


alpha_opt = click.option("--alpha", default="0", show_default=True, help="alpha as re or re,im")
sign_opt = click.option("--sign", default="minus", show_default=True, type=click.Choice(["minus", "plus"]))
out_opt = click.option("--out", "output", default=None, help="output file (default stdout)")
fmt_opt = click.option("--format", "fmt", default="csv", show_default=True, type=click.Choice(["csv", "json"]))


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None,
              help="TOML file with per-command tables; flags override it")
@click.version_option(__version__)
@click.pass_context
def main(ctx, config):
    """Increasing tritronquee solutions of Painleve-II."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = config


@main.command()
@alpha_opt
@sign_opt
@out_opt
@click.pass_context
def params(ctx, alpha, sign, output):
    """Print q0, q, tau and the regime for alpha."""
    try:
        cfg = _make_config(ctx, "params", alpha=parse_complex(alpha), sign=sign, output=output,
                           format="json")
    except TritronqueeError as exc:
        click.echo(json.dumps({"error": exc.code, "message": str(exc)}), err=True)
        sys.exit(exc.exit_code)
    _run(cfg, cmd_params)


def _trace_options(f):
    for opt in reversed([
        alpha_opt, sign_opt,
        click.option("--xmin", default=-60.0, show_default=True, type=float),
        click.option("--xmax", default=60.0, show_default=True, type=float),
        click.option("--spacing", default=0.05, show_default=True, type=float),
        click.option("--tol", default=1e-10, show_default=True, type=float),
        out_opt, fmt_opt,
    ]):
        f = opt(f)
    return f


def _parse_or_exit(fn):
    try:
        return fn()
    except TritronqueeError as exc:
        click.echo(json.dumps({"error": exc.code, "message": str(exc)}), err=True)
        sys.exit(exc.exit_code)


@main.command()
@_trace_options
@click.pass_context
def trace(ctx, alpha, sign, xmin, xmax, spacing, tol, output, fmt):
    """Trace u_TT^sign(x; alpha) on a grid (CSV: x, re_u, im_u, re_du, im_du)."""
    cfg = _parse_or_exit(lambda: _make_config(
        ctx, "trace", alpha=parse_complex(alpha), sign=sign, xmin=xmin, xmax=xmax, spacing=spacing,
        tol=tol, output=output, format=fmt))
    _run(cfg, cmd_trace)


@main.command()
@_trace_options
@click.pass_context
def poles(ctx, alpha, sign, xmin, xmax, spacing, tol, output, fmt):
    """List the real poles met by the trace."""
    cfg = _parse_or_exit(lambda: _make_config(
        ctx, "poles", alpha=parse_complex(alpha), sign=sign, xmin=xmin, xmax=xmax, spacing=spacing,
        tol=tol, output=output, format=fmt))
    _run(cfg, cmd_poles)


@main.command("total-integral")
@alpha_opt
@click.option("--xmin", default=-80.0, show_default=True, type=float)
@click.option("--xmax", default=60.0, show_default=True, type=float)
@click.option("--tol", default=1e-10, show_default=True, type=float)
@click.option("--A", "A", default=None, type=float, help="left end of the principal-value interval")
@click.option("--B", "B", default=None, type=float, help="right end of the principal-value interval")
@out_opt
@click.pass_context
def total_integral_cmd(ctx, alpha, xmin, xmax, tol, A, B, output):
    """Both sides of the total integral identity (JSON)."""
    cfg = _parse_or_exit(lambda: _make_config(
        ctx, "total-integral", alpha=parse_complex(alpha), xmin=xmin, xmax=xmax, tol=tol, A=A, B=B,
        output=output, format="json"))
    _run(cfg, cmd_total_integral)


@main.command()
@click.option("--p", "p", default=0.0, show_default=True, type=float)
@click.option("--tau", default=None, help="re,im; defaults to +sqrt(e^(2 pi p) - 1)")
@click.option("--y", "y", multiple=True, type=float, help="may be repeated")
@click.option("--panels", default=12, show_default=True, type=int)
@out_opt
@click.pass_context
def rh(ctx, p, tau, y, panels, output):
    """Solve the Riemann-Hilbert problem and report U, V, Q, W1, W2 (JSON)."""
    cfg = _parse_or_exit(lambda: _make_config(
        ctx, "rh", p=p, tau=parse_complex(tau) if tau is not None else 0j, y=tuple(y),
        panels=panels, output=output, format="json"))
    _run(cfg, cmd_rh)


@main.command()
@click.option("--p", "p", default=0.0, show_default=True, type=float)
@click.option("--tau", default=None, help="re,im; defaults to +sqrt(e^(2 pi p) - 1)")
@out_opt
@click.pass_context
def pc(ctx, p, tau, output):
    """Parabolic cylinder parametrix coefficients and jump residuals (JSON)."""
    cfg = _parse_or_exit(lambda: _make_config(
        ctx, "pc", p=p, tau=parse_complex(tau) if tau is not None else 0j, output=output,
        format="json"))
    _run(cfg, cmd_pc)


@main.command()
@click.option("--xmin", default=-60.0, show_default=True, type=float)
@click.option("--xmax", default=60.0, show_default=True, type=float)
@click.option("--spacing", default=0.05, show_default=True, type=float)
@out_opt
@click.pass_context
def fig2(ctx, xmin, xmax, spacing, output):
    """Im u at alpha = 0 next to the leading asymptotic terms (CSV)."""
    cfg = _parse_or_exit(lambda: _make_config(
        ctx, "fig2", xmin=xmin, xmax=xmax, spacing=spacing, output=output))
    _run(cfg, cmd_fig2)


@main.command()
@click.option("--suite", default=None, type=click.Choice(["all", "params", "ode", "integral", "rh", "pc"]))
@out_opt
@click.pass_context
def verify(ctx, suite, output):
    """Run the acceptance checks; exit 1 if any fails."""
    cfg = _parse_or_exit(lambda: _make_config(ctx, "verify", suite=suite, output=output,
                                              format="json"))
    _run(cfg, cmd_verify)


if __name__ == "__main__":  # pragma: no cover
    main()
