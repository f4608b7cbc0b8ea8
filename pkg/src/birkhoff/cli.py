"""Command-line front end.

Subcommands: ``integrate``, ``check``, ``convergence``, ``reconstruct``.
Only built-in systems are selectable here; arbitrary systems enter through
the library API.  Exit codes: 0 success, 1 usage or configuration error,
2 numerical step failure (partial output still written), 3 check failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from . import stepper
from .core import BirkhoffSystem, PhasePoint
from .diagnostics import convergence_order, symplectic_residual
from .errors import BirkhoffError, InconsistencyError, StepFailure
from .genscheme import make_scheme
from .oscillator import (
    euler_center,
    exact_solution,
    oscillator_alpha,
    oscillator_system,
    scheme_first_order,
    scheme_second_order,
)
from .selfadjoint import RawFirstOrderSystem, check_self_adjointness, reconstruct_b, reconstruct_f
from .transform import AlphaTransform

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_STEP_FAILURE = 2
EXIT_CHECK_FAILURE = 3

GENERATING_SCHEMES = ("generating-1", "generating-2")
MATRIX_SCHEMES = {
    "closed-first": scheme_first_order,
    "closed-second": scheme_second_order,
    "euler-center": euler_center,
}
SCHEME_CHOICES = GENERATING_SCHEMES + tuple(MATRIX_SCHEMES)


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    """Resolved configuration of one CLI invocation; flags beat config-file values."""

    system: str = "damped-oscillator"
    nu: float = 0.5
    scheme: str = "generating-2"
    z0: Tuple[float, ...] = (1.0, 0.0)
    t0: float = 0.0
    tau: float = 0.01
    steps: int = 100
    out: Optional[str] = None
    tol: float = 1e-7
    perturb: float = 0.0
    tau_list: Tuple[float, ...] = ()
    samples: int = 50
    seed: int = 0
    horizon: float = 1.0


@dataclass
class SystemBundle:
    system: BirkhoffSystem
    alpha: AlphaTransform
    raw: RawFirstOrderSystem
    reference: Callable


def _damped_oscillator(nu: float, perturb: float) -> SystemBundle:
    system = oscillator_system(nu)
    alpha = oscillator_alpha(nu)
    if perturb:
        base_d = system.D

        def d_perturbed(z, t):
            d = np.array(base_d(z, t), dtype=float)
            d[1] += perturb * z[0]
            return d

        raw = RawFirstOrderSystem(1, system.K, d_perturbed)
    else:
        raw = RawFirstOrderSystem(1, system.K, system.D)

    def reference(z0, t0):
        return lambda t: exact_solution(nu, z0[0], z0[1], t - t0)

    return SystemBundle(system, alpha, raw, reference)


SYSTEMS = {"damped-oscillator": _damped_oscillator}


def _parse_vector(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise ConfigError(f"cannot parse vector {text!r}; expected comma-separated floats")


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    return values


_CONVERTERS = {
    "system": str,
    "nu": float,
    "scheme": str,
    "z0": _parse_vector,
    "t0": float,
    "tau": float,
    "steps": int,
    "out": str,
    "tol": float,
    "perturb": float,
    "tau_list": _parse_vector,
    "samples": int,
    "seed": int,
    "horizon": float,
}


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flag values over config-file values over defaults."""
    cfg = RunConfig()
    file_values = _read_config_file(args.config) if getattr(args, "config", None) else {}
    known = {f.name for f in fields(RunConfig)}
    for key, raw in file_values.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        cfg = replace(cfg, **{key: _CONVERTERS[key](raw)})
    for name in known:
        value = getattr(args, name, None)
        if value is not None:
            cfg = replace(cfg, **{name: value})
    if cfg.system not in SYSTEMS:
        raise ConfigError(
            f"unknown system {cfg.system!r}; available: {', '.join(sorted(SYSTEMS))}"
        )
    if cfg.scheme not in SCHEME_CHOICES:
        raise ConfigError(
            f"unknown scheme {cfg.scheme!r}; available: {', '.join(SCHEME_CHOICES)}"
        )
    return cfg


def _build_step_maps(bundle: SystemBundle, cfg: RunConfig, tau: float):
    """(advance, jacobian) callables of signature (z, t_k) for the selected scheme."""
    if cfg.scheme in GENERATING_SCHEMES:
        order = int(cfg.scheme[-1])
        scheme = make_scheme(bundle.system, bundle.alpha, cfg.t0, order)
        return (
            lambda z, t: stepper.step(bundle.system, scheme, z, t, tau),
            lambda z, t: stepper.step_jacobian(bundle.system, scheme, z, t, tau),
        )
    matrix = MATRIX_SCHEMES[cfg.scheme](cfg.nu, tau)
    return (lambda z, t: matrix @ z), (lambda z, t: matrix)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def cmd_integrate(cfg: RunConfig) -> int:
    if cfg.tau <= 0:
        raise ConfigError("tau must be positive")
    if cfg.steps < 1:
        raise ConfigError("steps must be at least 1")
    bundle = SYSTEMS[cfg.system](cfg.nu, cfg.perturb)
    dim = bundle.system.dim
    z0 = np.asarray(cfg.z0, dtype=float)
    if z0.shape != (dim,):
        raise ConfigError(f"z0 must have length {dim} for system {cfg.system!r}")
    advance, jacobian = _build_step_maps(bundle, cfg, cfg.tau)

    header = "step,t," + ",".join(f"z{i + 1}" for i in range(dim)) + ",residual"
    lines = [header]
    z = z0
    lines.append(f"0,{_fmt(cfg.t0)}," + ",".join(_fmt(v) for v in z) + ",")
    failure = None
    for k in range(cfg.steps):
        t_k = cfg.t0 + k * cfg.tau
        try:
            jac = jacobian(z, t_k)
            z_next = advance(z, t_k)
            residual = symplectic_residual(bundle.system, jac, z, t_k, z_next, t_k + cfg.tau)
        except (StepFailure, BirkhoffError) as exc:
            failure = (k, exc)
            break
        z = z_next
        lines.append(
            f"{k + 1},{_fmt(t_k + cfg.tau)},"
            + ",".join(_fmt(v) for v in z)
            + f",{_fmt(residual)}"
        )
    _write_text(cfg.out, "\n".join(lines) + "\n")
    if failure is not None:
        k, exc = failure
        print(f"step {k} failed at t={cfg.t0 + k * cfg.tau}: {exc}", file=sys.stderr)
        return EXIT_STEP_FAILURE
    return EXIT_OK


def _sample_points(dim: int, count: int, seed: int):
    rng = np.random.default_rng(seed)
    return [
        PhasePoint(rng.uniform(-2.0, 2.0, dim), float(rng.uniform(0.0, 1.0)))
        for _ in range(count)
    ]


def cmd_check(cfg: RunConfig) -> int:
    if cfg.samples < 1:
        raise ConfigError("samples must be at least 1")
    bundle = SYSTEMS[cfg.system](cfg.nu, cfg.perturb)
    points = _sample_points(bundle.raw.dim, cfg.samples, cfg.seed)
    report = check_self_adjointness(bundle.raw, points, tol=cfg.tol)
    print(f"antisymmetry violation: {report.antisymmetry_violation:.6g}")
    print(f"closure violation:      {report.closure_violation:.6g}")
    print(f"time-curl violation:    {report.time_curl_violation:.6g}")
    verdict = "PASSED" if report.passed else "FAILED"
    print(f"self-adjointness check: {verdict} (tol {cfg.tol:.6g}, {cfg.samples} samples)")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILURE


def cmd_convergence(cfg: RunConfig) -> int:
    taus = tuple(cfg.tau_list) or (0.1, 0.05, 0.025, 0.0125)
    if len(taus) < 3:
        raise ConfigError("need at least 3 tau values")
    if cfg.horizon <= 0:
        raise ConfigError("horizon must be positive")
    bundle = SYSTEMS[cfg.system](cfg.nu, cfg.perturb)
    z0 = np.asarray(cfg.z0, dtype=float)
    if z0.shape != (bundle.system.dim,):
        raise ConfigError(f"z0 must have length {bundle.system.dim}")

    def factory(tau: float):
        advance, _ = _build_step_maps(bundle, cfg, tau)
        return advance

    try:
        report = convergence_order(
            bundle.system,
            factory,
            bundle.reference(z0, cfg.t0),
            z0,
            cfg.t0,
            cfg.horizon,
            taus,
        )
    except ValueError as exc:
        raise ConfigError(str(exc))
    lines = ["tau,error"]
    for tau, err in zip(report.tau_values, report.errors):
        lines.append(f"{_fmt(tau)},{_fmt(err)}")
    _write_text(cfg.out, "\n".join(lines) + "\n")
    print(f"slope = {report.slope:.3f}")
    return EXIT_OK


def cmd_reconstruct(cfg: RunConfig) -> int:
    bundle = SYSTEMS[cfg.system](cfg.nu, cfg.perturb)
    point = PhasePoint(np.asarray(cfg.z0, dtype=float), cfg.t0)
    f_vec = reconstruct_f(bundle.raw, point)
    print("F = (" + ", ".join(f"{v:.12g}" for v in f_vec) + ")")
    try:
        b_val = reconstruct_b(bundle.raw, point)
    except InconsistencyError as exc:
        print(f"B reconstruction failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILURE
    print(f"B = {b_val:.12g}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--system", help="built-in system selector (damped-oscillator)")
    parser.add_argument("--nu", type=float, help="damping coefficient of the built-in system")
    parser.add_argument("--config", help="optional key=value config file; flags win")
    parser.add_argument("--perturb", type=float, help="perturb D_2 by this factor times z_1")
    parser.add_argument("--out", help="output file path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="birkhoff",
        description="Structure-preserving one-step schemes for Birkhoffian systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_int = sub.add_parser("integrate", help="integrate a trajectory and emit CSV")
    _add_common(p_int)
    p_int.add_argument("--scheme", help="|".join(SCHEME_CHOICES))
    p_int.add_argument("--z0", type=_parse_vector, help="initial state, comma separated")
    p_int.add_argument("--t0", type=float, help="initial time")
    p_int.add_argument("--tau", type=float, help="step size")
    p_int.add_argument("--steps", type=int, help="number of steps")
    p_int.set_defaults(func=cmd_integrate)

    p_chk = sub.add_parser("check", help="verify the self-adjointness conditions")
    _add_common(p_chk)
    p_chk.add_argument("--tol", type=float, help="violation tolerance")
    p_chk.add_argument("--samples", type=int, help="number of random sample points")
    p_chk.add_argument("--seed", type=int, help="sampling seed")
    p_chk.set_defaults(func=cmd_check)

    p_conv = sub.add_parser("convergence", help="estimate a scheme's convergence order")
    _add_common(p_conv)
    p_conv.add_argument("--scheme", help="|".join(SCHEME_CHOICES))
    p_conv.add_argument("--z0", type=_parse_vector, help="initial state, comma separated")
    p_conv.add_argument("--t0", type=float, help="initial time")
    p_conv.add_argument(
        "--tau-list", dest="tau_list", type=_parse_vector, help="decreasing step sizes"
    )
    p_conv.add_argument("--horizon", type=float, help="integration horizon from t0")
    p_conv.set_defaults(func=cmd_convergence)

    p_rec = sub.add_parser("reconstruct", help="rebuild F and B from the raw system")
    _add_common(p_rec)
    p_rec.add_argument("--z0", type=_parse_vector, help="phase point, comma separated")
    p_rec.add_argument("--t0", type=float, help="time of the phase point")
    p_rec.set_defaults(func=cmd_reconstruct)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    except ConfigError as exc:
        # raised by flag-value parsers; argparse passes it through
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _resolve_config(args)
        return args.func(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StepFailure as exc:
        print(f"step failure: {exc}", file=sys.stderr)
        return EXIT_STEP_FAILURE


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
