"""Command-line front end.

Subcommands: kernel, classical-limit, commutator, weyl-compare, grid, toa.
Each reads a flat key = value config file (# comments allowed, rationals as
"num/den" strings) and writes JSON or CSV. Exit codes: 0 success, 1 usage or
config error, 2 verification failure.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import click
import numpy as np

from .algebra import QPoly, format_rational, parse_rational, poly_shift
from .classical_toa import (
    PhasePoint,
    Potential,
    convergence_margin,
    local_toa,
    series_tail_bound,
    shift_arrival,
    toa_quadrature,
)
from .errors import ConfigError, SupratoaError
from .kernel_solver import (
    KernelRequest,
    boundary_check,
    classical_term,
    kernel_eval,
    pde_residual,
    solve_kernel_general,
)
from .numerics import BumpProfile, QuadSpec, commutator_residual
from .serialize import (
    kernel_to_dict,
    poly_to_pairs,
    residual_report_to_dict,
    series_to_list,
)
from .transforms import classical_limit, hbar2_residual, weyl_quantize, wigner_transform

_FORMATS = ("json", "csv")

_GRID_KINDS = ("kernel", "toa")


@dataclass
class RunConfig:
    """Parsed run configuration with documented defaults."""

    potential: Potential = field(default_factory=Potential.free)
    mu: Fraction = Fraction(1)
    hbar: float = 1.0
    x: Fraction = Fraction(0)
    jmax: int = 6
    kmax: int = 6
    quad_abs_tol: float = 1e-10
    series_tol: float = 1e-12
    format: str | None = None
    out: str | None = None
    threshold: float = 1e-6
    phi_center: float = 0.0
    phi_halfwidth: float = 0.5
    psi_center: float = 0.0
    psi_halfwidth: float = 0.5
    grid_kind: str = "kernel"
    qmin: float = -1.0
    qmax: float = 1.0
    nq: int = 50
    qpmin: float = -1.0
    qpmax: float = 1.0
    nqp: int = 50
    pmin: float = 0.5
    pmax: float = 1.5
    np: int = 50
    q: float = 0.2
    p: float = 1.0


def _parse_potential(raw: str) -> Potential:
    raw = raw.strip()
    if raw == "free":
        return Potential.free()
    pairs: dict[int, Fraction] = {}
    for token in raw.split():
        if ":" not in token:
            raise ConfigError(f"key 'potential': token {token!r} is not degree:coeff")
        deg_text, coeff_text = token.split(":", 1)
        try:
            deg = int(deg_text)
            coeff = parse_rational(coeff_text)
        except ValueError as exc:
            raise ConfigError(f"key 'potential': {exc}") from exc
        if deg < 0:
            raise ConfigError(f"key 'potential': negative degree {deg}")
        pairs[deg] = pairs.get(deg, Fraction(0)) + coeff
    if not pairs:
        raise ConfigError("key 'potential': empty (use 'free' for V = 0)")
    return Potential(QPoly(pairs))


def _to_rational(key: str, raw: str) -> Fraction:
    try:
        return parse_rational(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc


def _to_float(key: str, raw: str) -> float:
    try:
        return float(parse_rational(raw))
    except ValueError:
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: not a number: {raw!r}") from exc


def _to_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: not an integer: {raw!r}") from exc


_PARSERS = {
    "potential": lambda raw: _parse_potential(raw),
    "mu": lambda raw: _to_rational("mu", raw),
    "hbar": lambda raw: _to_float("hbar", raw),
    "x": lambda raw: _to_rational("x", raw),
    "jmax": lambda raw: _to_int("jmax", raw),
    "kmax": lambda raw: _to_int("kmax", raw),
    "quad_abs_tol": lambda raw: _to_float("quad_abs_tol", raw),
    "series_tol": lambda raw: _to_float("series_tol", raw),
    "format": lambda raw: raw.strip(),
    "out": lambda raw: raw.strip(),
    "threshold": lambda raw: _to_float("threshold", raw),
    "phi_center": lambda raw: _to_float("phi_center", raw),
    "phi_halfwidth": lambda raw: _to_float("phi_halfwidth", raw),
    "psi_center": lambda raw: _to_float("psi_center", raw),
    "psi_halfwidth": lambda raw: _to_float("psi_halfwidth", raw),
    "grid_kind": lambda raw: raw.strip(),
    "qmin": lambda raw: _to_float("qmin", raw),
    "qmax": lambda raw: _to_float("qmax", raw),
    "nq": lambda raw: _to_int("nq", raw),
    "qpmin": lambda raw: _to_float("qpmin", raw),
    "qpmax": lambda raw: _to_float("qpmax", raw),
    "nqp": lambda raw: _to_int("nqp", raw),
    "pmin": lambda raw: _to_float("pmin", raw),
    "pmax": lambda raw: _to_float("pmax", raw),
    "np": lambda raw: _to_int("np", raw),
    "q": lambda raw: _to_float("q", raw),
    "p": lambda raw: _to_float("p", raw),
}


def parse_config_text(text: str) -> RunConfig:
    """Parse the flat key = value config format into a validated RunConfig."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        parser = _PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = parser(raw)
    config = RunConfig(**values)
    _validate(config)
    return config


def _validate(config: RunConfig) -> None:
    if config.jmax < 0:
        raise ConfigError("key 'jmax': must be >= 0")
    if config.kmax < 0:
        raise ConfigError("key 'kmax': must be >= 0")
    if config.quad_abs_tol <= 0 or config.series_tol <= 0:
        raise ConfigError("tolerances must be positive")
    if config.hbar <= 0:
        raise ConfigError("key 'hbar': must be positive")
    if config.format is not None and config.format not in _FORMATS:
        raise ConfigError(f"key 'format': must be one of {_FORMATS}")
    if config.grid_kind not in _GRID_KINDS:
        raise ConfigError(f"key 'grid_kind': must be one of {_GRID_KINDS}")
    if config.phi_halfwidth <= 0 or config.psi_halfwidth <= 0:
        raise ConfigError("bump halfwidths must be positive")
    if min(config.nq, config.nqp, config.np) < 1:
        raise ConfigError("grid point counts must be >= 1")


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config_text(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


def _effective_potential(config: RunConfig) -> Potential:
    """Arrival point x != 0 is folded into the potential before solving."""
    if config.x:
        return shift_arrival(config.potential, config.x)
    return config.potential


def cmd_kernel(config: RunConfig) -> int:
    """Solve the kernel table, verify boundary and PDE residual, emit it."""
    V = _effective_potential(config)
    K = solve_kernel_general(KernelRequest(V=V, mu=config.mu, Jmax=config.jmax))
    report = boundary_check(K)
    residual = pde_residual(K, V)
    residual_ok = residual is None or residual >= 2 * config.jmax + 2
    if not (report.passed and residual_ok):
        diagnostics = {
            "diagnostics": {
                "boundary_failures": list(report.failures),
                "pde_residual_order": residual,
                "required_min_order": 2 * config.jmax + 2,
            }
        }
        _emit(json.dumps(diagnostics, indent=2), config.out)
        return 2
    fmt = config.format or "json"
    if fmt == "json":
        _emit(json.dumps(kernel_to_dict(K), indent=2), config.out)
    else:
        lines = ["m,j,s,coeff"]
        lines += [f"{m},{j},{s},{format_rational(c)}" for (m, j, s), c in K.items()]
        _emit("\n".join(lines), config.out)
    return 0


def cmd_classical_limit(config: RunConfig) -> int:
    """Compare the Wigner transform of the kernel with the classical series."""
    if (config.format or "json") != "json":
        raise ConfigError("classical-limit reports are json only")
    V = _effective_potential(config)
    kmax = min(config.kmax, config.jmax)
    K = solve_kernel_general(KernelRequest(V=V, mu=config.mu, Jmax=config.jmax))
    transform = wigner_transform(K)
    limit = classical_limit(transform)
    residual = hbar2_residual(transform)
    series = local_toa(config.potential, config.mu, config.x, kmax)

    rows = []
    all_match = True
    for k in range(kmax + 1):
        wig = limit.term(k, 0)
        # the kernel was solved at the shifted origin; move the classical
        # series into the same coordinate before comparing
        cls = poly_shift(series.term(k, 0), config.x)
        equal = wig == cls
        all_match = all_match and equal
        rows.append(
            {
                "k": k,
                "wigner": poly_to_pairs(wig),
                "classical": poly_to_pairs(cls),
                "equal": equal,
            }
        )
    payload = {
        "terms": rows,
        "hbar2_residual": series_to_list(residual),
        "linear_system": V.is_linear,
        "all_match": all_match,
    }
    _emit(json.dumps(payload, indent=2), config.out)
    return 0 if all_match else 2


def cmd_commutator(config: RunConfig) -> int:
    """Measure the canonical-commutator residual of the solved kernel."""
    if (config.format or "json") != "json":
        raise ConfigError("commutator reports are json only")
    V = config.potential
    K = solve_kernel_general(KernelRequest(V=V, mu=config.mu, Jmax=config.jmax))
    phi = BumpProfile(config.phi_center, config.phi_halfwidth)
    psi = BumpProfile(config.psi_center, config.psi_halfwidth)
    quad = QuadSpec(abs_tol=config.quad_abs_tol)
    report = commutator_residual(V, K, phi, psi, float(config.mu), config.hbar, quad)
    payload = residual_report_to_dict(report)
    payload["threshold"] = config.threshold
    payload["passed"] = report.residual < config.threshold
    _emit(json.dumps(payload, indent=2), config.out)
    return 0 if payload["passed"] else 2


def cmd_weyl_compare(config: RunConfig) -> int:
    """Weyl-quantized classical series vs the kernel's classical term."""
    if (config.format or "json") != "json":
        raise ConfigError("weyl-compare reports are json only")
    V = config.potential
    kmax = config.kmax
    series = local_toa(V, config.mu, 0, kmax)
    weyl = weyl_quantize(series, config.mu)
    cterm = classical_term(V, config.mu, kmax)
    weyl_map = weyl.s_slice(0)
    weyl_equals_classical = weyl_map == cterm

    full = solve_kernel_general(KernelRequest(V=V, mu=config.mu, Jmax=kmax))
    s_ge_1 = sum(1 for (_, _, s) in full.A if s >= 1)
    difference_nonzero = full.A != weyl.A

    payload = {
        "weyl_equals_classical": weyl_equals_classical,
        "linear_system": V.is_linear,
        "full_minus_weyl_nonzero": difference_nonzero,
        "s_ge_1_entries": s_ge_1,
    }
    if not V.is_linear and s_ge_1:
        payload["note"] = "obstruction: s>=1 terms present"
    ok = weyl_equals_classical and (V.is_linear or difference_nonzero)
    _emit(json.dumps(payload, indent=2), config.out)
    return 0 if ok else 2


def cmd_grid(config: RunConfig) -> int:
    """Write a CSV evaluation grid (kernel values or arrival times)."""
    if config.format == "json":
        raise ConfigError("grid emits csv only")
    V = _effective_potential(config)
    qs = np.linspace(config.qmin, config.qmax, config.nq)
    if config.grid_kind == "kernel":
        K = solve_kernel_general(KernelRequest(V=V, mu=config.mu, Jmax=config.jmax))
        qps = np.linspace(config.qpmin, config.qpmax, config.nqp)
        lines = ["q,qp,re,im"]
        for q in qs:
            for qp in qps:
                val = kernel_eval(K, float(q), float(qp), config.hbar)
                lines.append(f"{float(q)!r},{float(qp)!r},{val.real!r},{val.imag!r}")
    else:
        ps = np.linspace(config.pmin, config.pmax, config.np)
        lines = ["q,p,toa"]
        for q in qs:
            for p in ps:
                pt = PhasePoint(q=float(q), p=float(p), x=float(config.x), mu=float(config.mu))
                try:
                    value = toa_quadrature(config.potential, pt, config.quad_abs_tol)
                except SupratoaError:
                    value = math.nan
                lines.append(f"{float(q)!r},{float(p)!r},{value!r}")
    _emit("\n".join(lines), config.out)
    return 0


def cmd_toa(config: RunConfig) -> int:
    """Classical arrival time at one phase point: series, quadrature, margin."""
    if (config.format or "json") != "json":
        raise ConfigError("toa reports are json only")
    V = config.potential
    mu = float(config.mu)
    x = float(config.x)
    pt = PhasePoint(q=config.q, p=config.p, x=x, mu=mu)
    ratio, converges = convergence_margin(V, mu, config.q, x, config.p)
    series = local_toa(V, config.mu, config.x, config.kmax)
    series_value = series.evaluate(config.q, config.p)
    quad_value = toa_quadrature(V, pt, config.quad_abs_tol)
    tail = series_tail_bound(V, mu, config.q, x, config.p, config.kmax)
    # quadrature tolerance plus roundoff; the tail alone can sit below both
    slack = max(100.0 * config.quad_abs_tol, 1e-12)
    verified = converges and abs(series_value - quad_value) <= tail + slack
    payload = {
        "q": config.q,
        "p": config.p,
        "x": x,
        "kmax": config.kmax,
        "series_value": series_value,
        "quadrature_value": quad_value,
        "difference": series_value - quad_value,
        "tail_bound": tail if math.isfinite(tail) else None,
        "convergence_ratio": ratio,
        "converges": converges,
        "verified": verified,
    }
    _emit(json.dumps(payload, indent=2), config.out)
    return 0 if verified else 2


_SAMPLES = {
    "kernel": """\
# kernel: solve the time kernel coefficient table and emit it
# potential: "free" or space-separated degree:coefficient pairs, exact rationals
potential = 2:1/2
mu = 1
hbar = 1
# arrival point; nonzero x is folded into the potential before solving
x = 0
# truncation order (max v-power / 2)
jmax = 6
# output: json (exact round-trip table) or csv (m,j,s,coeff rows)
format = json
# out = kernel.json
""",
    "classical-limit": """\
# classical-limit: Wigner transform of the kernel vs the classical series
potential = 2:1/2
mu = 1
x = 0
jmax = 8
# number of series orders compared (clamped to jmax)
kmax = 8
format = json
# out = classical_limit.json
""",
    "commutator": """\
# commutator: canonical commutation relation residual on a pair of bumps
potential = free
mu = 1
hbar = 1
jmax = 8
quad_abs_tol = 1e-10
# acceptance threshold on the relative residual
threshold = 1e-6
phi_center = 0
phi_halfwidth = 1/2
psi_center = 0
psi_halfwidth = 1/2
format = json
# out = commutator.json
""",
    "weyl-compare": """\
# weyl-compare: Weyl quantization of the classical series vs the kernel
potential = 4:1
mu = 1
# series / table order
kmax = 6
format = json
# out = weyl_compare.json
""",
    "grid": """\
# grid: CSV evaluation grid for plotting
# grid_kind = kernel writes q,qp,re,im rows; grid_kind = toa writes q,p,toa rows
grid_kind = kernel
potential = 2:1/2
mu = 1
hbar = 1
jmax = 6
qmin = -1
qmax = 1
nq = 50
qpmin = -1
qpmax = 1
nqp = 50
# toa grids use pmin/pmax/np for the momentum axis and quad_abs_tol
format = csv
# out = grid.csv
""",
    "toa": """\
# toa: classical arrival time at one phase point, series vs quadrature
potential = 2:1/2
mu = 1
x = 0
q = 1/5
p = 1
kmax = 12
quad_abs_tol = 1e-10
format = json
# out = toa.json
""",
}

_COMMANDS = {
    "kernel": cmd_kernel,
    "classical-limit": cmd_classical_limit,
    "commutator": cmd_commutator,
    "weyl-compare": cmd_weyl_compare,
    "grid": cmd_grid,
    "toa": cmd_toa,
}


def _run_command(name: str, config_path: str | None, out: str | None, fmt: str | None, seed: bool) -> int:
    if seed:
        _emit(_SAMPLES[name], out)
        return 0
    if not config_path:
        raise ConfigError("--config FILE is required (or use --seed-config)")
    config = load_config(config_path)
    if out:
        config.out = out
    if fmt:
        config.format = fmt
    return _COMMANDS[name](config)


def _attach(group: click.Group, name: str, func) -> None:
    help_text = (func.__doc__ or "").strip().splitlines()[0]

    @click.option("--config", "config_path", type=click.Path(), default=None, help="Config file (key = value lines).")
    @click.option("--out", type=click.Path(), default=None, help="Write output to this path instead of stdout.")
    @click.option("--format", "fmt", type=click.Choice(_FORMATS), default=None, help="Output format override.")
    @click.option("--seed-config", "seed", is_flag=True, help="Print a commented sample config and exit.")
    def _callback(config_path, out, fmt, seed, _name=name):
        return _run_command(_name, config_path, out, fmt, seed)

    group.command(name=name, help=help_text)(_callback)


@click.group()
def cli() -> None:
    """Exact time-kernel tables for arrival-time operators, with transform,
    commutator, and quadrature verification commands."""


for _name, _func in _COMMANDS.items():
    _attach(cli, _name, _func)


def main(argv=None) -> int:
    """Entry point with the documented exit-code contract (0 / 1 / 2)."""
    try:
        code = cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.exceptions.Abort:
        return 1
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return 1
    except SupratoaError as exc:
        click.echo(f"verification failure: {exc}", err=True)
        return 2
    except Exception as exc:  # malformed input must never escape as a traceback
        click.echo(f"error: {exc}", err=True)
        return 1
    return code if isinstance(code, int) else 0


if __name__ == "__main__":
    sys.exit(main())
