"""Command-line front end.

Configuration files hold one ``key = value`` pair per line. ``#`` starts a
comment and lists are comma separated::

    domain = 0, 10
    n_elements = 20
    L = 1
    C = 0.01
    signal = sine_pulse

Subcommands: ``verify``, ``matrices``, ``assemble``, ``simulate``.
Exit codes: 0 success, 1 failed invariant or numerical failure, 2 usage,
configuration or I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import io as phio
from .assembly import compose_chain, io_map_description, sparsity_report
from .element_matrices import build_dirac_pair, compute_matrices, element_state_space
from .hamiltonian import quadratic_density, quartic_density
from .mesh import Domain, build_mesh, build_uniform_mesh, element_of
from .simulate import INTEGRATORS, Scenario, run, sine_pulse, zero_signal
from .verify import format_checks, run_checks

__all__ = ["RunConfig", "ConfigError", "parse_config", "render_config",
           "build_mesh_from", "build_densities", "build_signal", "main"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DENSITY_KINDS = {"quadratic": ("L", "C", "coefficient"), "quartic": ("k",)}
SIGNALS = ("sine_pulse", "zero")
REQUIRED = ("domain", "n_elements | breakpoints", "L | density_p", "C | density_q")


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class RunConfig:
    domain: tuple
    density_p: str
    density_q: str
    n_elements: Optional[int] = None
    breakpoints: Optional[tuple] = None
    sigma: object = 0.0            # float or tuple of floats
    signal: str = "zero"
    signal_amplitude: float = 1.0
    signal_duration: float = 2.0
    integrator: str = "implicit_midpoint"
    dt: float = 1e-3
    t_end: float = 10.0
    quad_order: int = 5
    threshold: float = 1e-12
    out_dir: str = "."
    csv: str = "simulation.csv"


def _float(text, line, key):
    try:
        val = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}", line) from None
    if not math.isfinite(val):
        raise ConfigError(f"{key}: value must be finite", line)
    return val


def _int(text, line, key):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}", line) from None


def _floats(text, line, key):
    return tuple(_float(t.strip(), line, key) for t in text.split(","))


def normalize_density(text, line=None, key="density") -> str:
    """Canonical ``kind:value`` form of ``quadratic:L=1``, ``quartic:2`` etc."""
    kind, sep, param = text.strip().partition(":")
    kind = kind.strip()
    if kind not in DENSITY_KINDS or not sep:
        raise ConfigError(f"{key}: unknown density {text!r}; use "
                          "quadratic:<coefficient> or quartic:<k>", line)
    name, eq, val = param.partition("=")
    if eq:
        if name.strip() not in DENSITY_KINDS[kind]:
            raise ConfigError(f"{key}: unknown parameter {name.strip()!r} for {kind}", line)
    else:
        val = name
    num = _float(val.strip(), line, key)
    if num <= 0:
        raise ConfigError(f"{key}: density parameter must be positive", line)
    return f"{kind}:{num!r}"


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` text into a validated :class:`RunConfig`."""
    raw = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not key:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        raw[key] = value
        lines[key] = lineno

    missing = []
    if "domain" not in raw:
        missing.append("domain")
    if "n_elements" not in raw and "breakpoints" not in raw:
        missing.append("n_elements | breakpoints")
    if "L" not in raw and "density_p" not in raw:
        missing.append("L | density_p")
    if "C" not in raw and "density_q" not in raw:
        missing.append("C | density_q")
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing)
                          + " (required: " + "; ".join(REQUIRED) + ")")

    kw = {}
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    for key, value in raw.items():
        ln = lines[key]
        if key == "domain":
            dom = _floats(value, ln, key)
            if len(dom) != 2 or not dom[0] < dom[1]:
                raise ConfigError("domain: expected 'z_start, z_end' with z_start < z_end", ln)
            kw["domain"] = dom
        elif key == "n_elements":
            n = _int(value, ln, key)
            if n < 1:
                raise ConfigError("n_elements must be >= 1", ln)
            kw["n_elements"] = n
        elif key == "breakpoints":
            kw["breakpoints"] = _floats(value, ln, key)
        elif key == "sigma":
            vals = _floats(value, ln, key)
            if any(v < 0 for v in vals):
                raise ConfigError("sigma must be nonnegative", ln)
            kw["sigma"] = vals[0] if len(vals) == 1 else vals
        elif key in ("L", "C"):
            target = "density_p" if key == "L" else "density_q"
            if target in raw:
                raise ConfigError(f"{key} and {target} are mutually exclusive", ln)
            kw[target] = normalize_density(f"quadratic:{value}", ln, key)
        elif key in ("density_p", "density_q"):
            kw[key] = normalize_density(value, ln, key)
        elif key == "signal":
            if value not in SIGNALS:
                raise ConfigError(f"signal: unknown signal {value!r}; choose from {SIGNALS}", ln)
            kw[key] = value
        elif key == "integrator":
            value = value.replace("-", "_")
            if value not in INTEGRATORS:
                raise ConfigError(f"integrator: choose from {INTEGRATORS}", ln)
            kw[key] = value
        elif key in ("dt", "t_end", "signal_duration", "threshold"):
            val = _float(value, ln, key)
            if val <= 0:
                raise ConfigError(f"{key} must be positive", ln)
            kw[key] = val
        elif key == "signal_amplitude":
            kw[key] = _float(value, ln, key)
        elif key == "quad_order":
            q = _int(value, ln, key)
            if q < 1:
                raise ConfigError("quad_order must be >= 1", ln)
            kw[key] = q
        elif key in ("out_dir", "csv"):
            kw[key] = value
        elif key not in fields:
            raise ConfigError(f"unknown key {key!r}", ln)

    if "n_elements" in kw and "breakpoints" in kw:
        raise ConfigError("n_elements and breakpoints are mutually exclusive",
                          lines["breakpoints"])
    config = RunConfig(**kw)
    try:
        mesh = build_mesh_from(config)
    except ValueError as exc:
        raise ConfigError(str(exc), lines.get("breakpoints", lines["domain"])) from None
    if isinstance(config.sigma, tuple) and len(config.sigma) != mesh.n_elements:
        raise ConfigError(f"sigma: expected 1 or {mesh.n_elements} values",
                          lines["sigma"])
    if config.dt > config.t_end:
        raise ConfigError("dt must not exceed t_end", lines.get("dt", lines.get("t_end")))
    return config


def render_config(config: RunConfig) -> str:
    """Inverse of :func:`parse_config` (up to comments and layout)."""
    out = [f"domain = {config.domain[0]!r}, {config.domain[1]!r}"]
    if config.n_elements is not None:
        out.append(f"n_elements = {config.n_elements}")
    if config.breakpoints is not None:
        out.append("breakpoints = " + ", ".join(repr(b) for b in config.breakpoints))
    sig = config.sigma if isinstance(config.sigma, tuple) else (config.sigma,)
    out.append("sigma = " + ", ".join(repr(float(s)) for s in sig))
    out.append(f"density_p = {config.density_p}")
    out.append(f"density_q = {config.density_q}")
    for name in ("signal", "signal_amplitude", "signal_duration", "integrator",
                 "dt", "t_end", "quad_order", "threshold", "out_dir", "csv"):
        val = getattr(config, name)
        out.append(f"{name} = {val!r}" if isinstance(val, float) else f"{name} = {val}")
    return "\n".join(out) + "\n"


def build_mesh_from(config: RunConfig):
    domain = Domain(*config.domain)
    if config.breakpoints is not None:
        return build_mesh(domain, config.breakpoints)
    return build_uniform_mesh(domain, config.n_elements)


def _density(text):
    kind, _, val = text.partition(":")
    return quadratic_density(float(val)) if kind == "quadratic" else quartic_density(float(val))


def build_densities(config: RunConfig):
    return _density(config.density_p), _density(config.density_q)


def build_signal(config: RunConfig):
    if config.signal == "sine_pulse":
        return sine_pulse(config.signal_amplitude, config.signal_duration)
    return zero_signal()


def _sigma(config):
    return np.asarray(config.sigma, dtype=float)


def _cmd_verify(config, args):
    checks = run_checks(build_mesh_from(config), _sigma(config))
    print(format_checks(checks))
    ok = all(c.passed for c in checks)
    print("all checks passed" if ok else "some checks FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_matrices(config, args):
    mesh = build_mesh_from(config)
    el = element_of(mesh, args.element)
    sig = float(np.broadcast_to(_sigma(config), (mesh.n_elements,))[args.element - 1])
    mx = compute_matrices(el, sig)
    pair = build_dirac_pair(mx)
    model = element_state_space(pair)
    print(f"element {args.element}: a={el.a!r}, m={el.m!r}, b={el.b!r}, h={el.h!r}, sigma={sig!r}")
    with np.printoptions(precision=6, suppress=True, linewidth=120):
        for name in ("M1", "M2", "M3", "M4", "M5", "M6"):
            print(f"{name} =\n{getattr(mx, name)}")
        for name in ("E", "F"):
            print(f"{name} =\n{getattr(pair, name)}")
        for name in ("A", "B", "C", "D", "R"):
            print(f"{name} =\n{getattr(model, name)}")
    return EXIT_OK


def _cmd_assemble(config, args):
    model = compose_chain(build_mesh_from(config), _sigma(config), config.threshold)
    out = Path(args.out or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in ("A", "B", "C", "D"):
        phio.write_triplets(out / f"{name}.txt", getattr(model, name))
    report = sparsity_report(model, config.threshold)
    text = "\n".join([f"state dimension: {model.state_dim}", *report.lines(),
                      "io map:", io_map_description(model)])
    (out / "sparsity.txt").write_text(text + "\n")
    print(text)
    print(f"wrote A.txt, B.txt, C.txt, D.txt, sparsity.txt to {out}")
    return EXIT_OK


def _cmd_simulate(config, args):
    model = compose_chain(build_mesh_from(config), _sigma(config), config.threshold)
    dens_p, dens_q = build_densities(config)
    scenario = Scenario(model, dens_p, dens_q, build_signal(config), config.t_end,
                        config.dt, config.integrator, quad_order=config.quad_order)
    result = run(scenario)
    out = Path(args.out or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / config.csv
    phio.write_result_csv(path, result)
    print(f"state dimension: {model.state_dim}, steps: {len(result.times) - 1}")
    print(f"final energy: {result.hamiltonian[-1]:.12g}")
    print(f"max |dH/dt - y^T u| = {result.max_power_residual:.3e} "
          f"(max |y^T u| = {result.max_power:.3e})")
    print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {"verify": _cmd_verify, "matrices": _cmd_matrices,
            "assemble": _cmd_assemble, "simulate": _cmd_simulate}


def _parser():
    parser = argparse.ArgumentParser(
        prog="phnet1d",
        description="Discretize, verify and simulate 1D port-Hamiltonian lines.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key = value configuration file")
        p.add_argument("--out", help="output directory (overrides out_dir)")
        p.add_argument("--n-elements", type=int, help="override n_elements")
        p.add_argument("--sigma", help="override sigma (scalar or comma list)")
        p.add_argument("--dt", type=float, help="override dt")
        if name == "matrices":
            p.add_argument("--element", type=int, default=1,
                           help="element index, counted from 1")
    return parser


def _apply_overrides(text, args):
    extra = []
    if args.n_elements is not None:
        extra.append(("n_elements", str(args.n_elements)))
    if args.sigma is not None:
        extra.append(("sigma", args.sigma))
    if args.dt is not None:
        extra.append(("dt", repr(args.dt)))
    if not extra:
        return text
    drop = {k for k, _ in extra}
    if "n_elements" in drop:
        drop.add("breakpoints")
    kept = []
    for line in text.splitlines():
        key = line.split("#", 1)[0].partition("=")[0].strip()
        kept.append("" if key in drop else line)
    return "\n".join(kept + [f"{k} = {v}" for k, v in extra]) + "\n"


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        config = parse_config(_apply_overrides(text, args))
    except (OSError, ConfigError) as exc:
        print(f"phnet1d: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](config, args)
    except OSError as exc:
        print(f"phnet1d {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, IndexError, ArithmeticError, RuntimeError,
            np.linalg.LinAlgError) as exc:
        print(f"phnet1d {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
