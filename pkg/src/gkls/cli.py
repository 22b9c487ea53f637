"""Command line interface.

Usage::

    gkls run <config.json>
    gkls field <config.json>
    gkls scenarios list
    gkls verify <config.json>

Exit codes: 0 success, 2 configuration error, 3 physics drift or failed
audit, 4 I/O error.  ``GKLS_HBAR`` overrides the ``hbar`` of a config file.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from . import __version__, kernels
from .algebra import AlgebraElement, AlgebraKind
from .dynamics import (
    DissipatorSet,
    FieldDecomposition,
    HamiltonianSpec,
    TracePreservationError,
    gkls_field,
    lie_derivative_purity,
    oracle_velocity,
)
from .integrator import DriftError, IntegratorConfig, integrate_rk4
from .scenarios import SCENARIOS, build_scenario, list_scenarios
from .state_space import StatePoint, check_physical, constraint_residual, random_physical_point

__all__ = [
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_DRIFT",
    "EXIT_IO",
    "ConfigError",
    "ScenarioRef",
    "TimeSpec",
    "Outputs",
    "GridSpec",
    "RunConfig",
    "parse_config",
    "emit_config",
    "load_config",
    "build_system",
    "build_report",
    "sample_field_grid",
    "trajectory_rows",
    "run",
    "verify",
    "main",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DRIFT = 3
EXIT_IO = 4

TRAJECTORY_HEADER = ("t", "c1", "c2", "c3", "r", "residual")
GRID_HEADER = ("g1", "g2", "g3", "f1", "f2", "f3", "r", "physical")


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


@dataclass(frozen=True)
class ScenarioRef:
    name: str
    nu: float = 2.0
    gamma: float = 1.0


@dataclass(frozen=True)
class TimeSpec:
    t0: float
    t1: float
    dt: float
    monitor_every: int = 10
    drift_tol: float = 1e-8

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(self.t0, self.t1, self.dt, self.monitor_every, self.drift_tol)


@dataclass(frozen=True)
class Outputs:
    trajectory_csv: str | None = None
    field_grid_csv: str | None = None
    report_json: str | None = None


@dataclass(frozen=True)
class GridSpec:
    ranges: tuple
    counts: tuple


@dataclass(frozen=True)
class RunConfig:
    system: str
    initial: tuple
    time: TimeSpec
    hbar: float = 1.0
    hamiltonian: tuple | None = None
    dissipators: tuple | None = None
    scenario: ScenarioRef | None = None
    outputs: Outputs = Outputs()
    grid: GridSpec | None = None

    @property
    def kind(self) -> AlgebraKind:
        return AlgebraKind.parse(self.system)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOP_KEYS = {"system", "hbar", "hamiltonian", "dissipators", "scenario", "initial", "time", "outputs", "grid", "first_moments"}


def _real(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {type(value).__name__}")
    x = float(value)
    if not math.isfinite(x):
        raise ConfigError(key, "must be finite")
    return x


def _real_list(value: Any, n: int, key: str) -> tuple:
    if not isinstance(value, list) or len(value) != n:
        raise ConfigError(key, f"expected a list of {n} numbers")
    return tuple(_real(v, f"{key}[{i}]") for i, v in enumerate(value))


def _complex(value: Any, key: str) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError(key, "complex numbers are written as [re, im]")
        return complex(_real(value[0], key + "[0]"), _real(value[1], key + "[1]"))
    return complex(_real(value, key), 0.0)


def _check_keys(obj: dict, allowed: set, key: str) -> None:
    for k in obj:
        if k not in allowed:
            raise ConfigError(f"{key}.{k}" if key else k, "unknown key")


def _require(obj: dict, name: str, key: str):
    if name not in obj:
        raise ConfigError(f"{key}.{name}" if key else name, "missing required key")
    return obj[name]


def parse_config(text: bytes | str) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError("", f"config is not UTF-8: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"malformed JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "")

    system = _require(raw, "system", "")
    if system not in ("qbit", "gaussian"):
        raise ConfigError("system", "must be 'qbit' or 'gaussian'")
    hbar = _real(raw.get("hbar", 1.0), "hbar")
    if hbar <= 0.0:
        raise ConfigError("hbar", "must be positive")

    if "first_moments" in raw:
        fm = _real_list(raw["first_moments"], 2, "first_moments")
        if any(v != 0.0 for v in fm):
            raise ConfigError("first_moments", "only zero first moments are supported")

    has_custom = "hamiltonian" in raw or "dissipators" in raw
    if has_custom == ("scenario" in raw):
        raise ConfigError("scenario", "give exactly one of 'scenario' or 'hamiltonian'+'dissipators'")
    hamiltonian = dissipators = scenario = None
    if has_custom:
        hamiltonian = _real_list(_require(raw, "hamiltonian", ""), 4, "hamiltonian")
        ds = raw.get("dissipators", [])
        if not isinstance(ds, list):
            raise ConfigError("dissipators", "expected a list")
        out = []
        for i, dv in enumerate(ds):
            if not isinstance(dv, list) or len(dv) != 4:
                raise ConfigError(f"dissipators[{i}]", "expected 4 complex coefficients")
            out.append(tuple(_complex(c, f"dissipators[{i}][{j}]") for j, c in enumerate(dv)))
        dissipators = tuple(out)
    else:
        sc = raw["scenario"]
        if not isinstance(sc, dict):
            raise ConfigError("scenario", "expected an object")
        _check_keys(sc, {"name", "nu", "gamma"}, "scenario")
        name = _require(sc, "name", "scenario")
        if name not in SCENARIOS:
            raise ConfigError("scenario.name", f"unknown scenario {name!r}")
        if SCENARIOS[name][0] != system:
            raise ConfigError("scenario.name", f"scenario {name} needs system '{SCENARIOS[name][0]}'")
        gamma = _real(sc.get("gamma", 1.0), "scenario.gamma")
        if gamma < 0.0:
            raise ConfigError("scenario.gamma", "must be non-negative")
        scenario = ScenarioRef(name, _real(sc.get("nu", 2.0), "scenario.nu"), gamma)

    initial = _real_list(_require(raw, "initial", ""), 3, "initial")
    rep = check_physical(StatePoint(system, initial), 0.0)
    if not rep.ok:
        where = "Bloch ball" if system == "qbit" else "solid hyperboloid"
        raise ConfigError("initial", f"initial state outside {where} (residual {rep.residual:.6g})")

    tr = _require(raw, "time", "")
    if not isinstance(tr, dict):
        raise ConfigError("time", "expected an object")
    _check_keys(tr, {"t0", "t1", "dt", "monitor_every", "drift_tol"}, "time")
    t0 = _real(_require(tr, "t0", "time"), "time.t0")
    t1 = _real(_require(tr, "t1", "time"), "time.t1")
    dt = _real(_require(tr, "dt", "time"), "time.dt")
    me = tr.get("monitor_every", 10)
    if isinstance(me, bool) or not isinstance(me, int) or me < 1:
        raise ConfigError("time.monitor_every", "must be a positive integer")
    dtol = _real(tr.get("drift_tol", 1e-8), "time.drift_tol")
    time = TimeSpec(t0, t1, dt, me, dtol)
    try:
        time.integrator_config()
    except ValueError as exc:
        raise ConfigError("time", str(exc)) from None

    ob = raw.get("outputs", {})
    if not isinstance(ob, dict):
        raise ConfigError("outputs", "expected an object")
    _check_keys(ob, {"trajectory_csv", "field_grid_csv", "report_json"}, "outputs")
    for k, v in ob.items():
        if v is not None and not isinstance(v, str):
            raise ConfigError(f"outputs.{k}", "expected a path string")
    outputs = Outputs(ob.get("trajectory_csv"), ob.get("field_grid_csv"), ob.get("report_json"))

    grid = None
    if "grid" in raw:
        g = raw["grid"]
        if not isinstance(g, dict):
            raise ConfigError("grid", "expected an object")
        _check_keys(g, {"ranges", "counts"}, "grid")
        rs = _require(g, "ranges", "grid")
        if not isinstance(rs, list) or len(rs) != 3:
            raise ConfigError("grid.ranges", "expected three [lo, hi] pairs")
        ranges = tuple(_real_list(r, 2, f"grid.ranges[{i}]") for i, r in enumerate(rs))
        for i, (lo, hi) in enumerate(ranges):
            if hi < lo:
                raise ConfigError(f"grid.ranges[{i}]", "hi must not be below lo")
        cs = _require(g, "counts", "grid")
        if not isinstance(cs, list) or len(cs) != 3 or any(isinstance(c, bool) or not isinstance(c, int) for c in cs):
            raise ConfigError("grid.counts", "expected three integers")
        if any(c < 1 for c in cs):
            raise ConfigError("grid.counts", "grid degenerate: counts must be positive")
        grid = GridSpec(ranges, tuple(cs))

    return RunConfig(
        system=system,
        initial=initial,
        time=time,
        hbar=hbar,
        hamiltonian=hamiltonian,
        dissipators=dissipators,
        scenario=scenario,
        outputs=outputs,
        grid=grid,
    )


def emit_config(cfg: RunConfig) -> str:
    """Serialize a RunConfig back to JSON (inverse of :func:`parse_config`)."""
    out: dict[str, Any] = {"system": cfg.system, "hbar": cfg.hbar}
    if cfg.scenario is not None:
        out["scenario"] = {"name": cfg.scenario.name, "nu": cfg.scenario.nu, "gamma": cfg.scenario.gamma}
    else:
        out["hamiltonian"] = list(cfg.hamiltonian)
        out["dissipators"] = [[[c.real, c.imag] for c in dv] for dv in cfg.dissipators]
    out["initial"] = list(cfg.initial)
    t = cfg.time
    out["time"] = {"t0": t.t0, "t1": t.t1, "dt": t.dt, "monitor_every": t.monitor_every, "drift_tol": t.drift_tol}
    out["outputs"] = {k: v for k, v in vars(cfg.outputs).items() if v is not None}
    if cfg.grid is not None:
        out["grid"] = {"ranges": [list(r) for r in cfg.grid.ranges], "counts": list(cfg.grid.counts)}
    return dumps(out)


def load_config(path: str, environ=None) -> RunConfig:
    """Read a config file and apply the ``GKLS_HBAR`` override."""
    environ = os.environ if environ is None else environ
    with open(path, "rb") as fh:
        data = fh.read()
    cfg = parse_config(data)
    override = environ.get("GKLS_HBAR")
    if override not in (None, ""):
        try:
            hbar = float(override)
        except ValueError:
            raise ConfigError("GKLS_HBAR", f"not a number: {override!r}") from None
        if not (math.isfinite(hbar) and hbar > 0.0):
            raise ConfigError("GKLS_HBAR", "must be a finite positive number")
        cfg = replace(cfg, hbar=hbar)
    return cfg


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------


def fmt(x: float) -> str:
    """17 significant digits; enough to round-trip any double."""
    return format(float(x), ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag], indent, _level)
    return json.dumps(str(obj))


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


def build_system(cfg: RunConfig) -> tuple[HamiltonianSpec, DissipatorSet, FieldDecomposition]:
    """Hamiltonian, dissipators and decomposed field described by ``cfg``."""
    kind = cfg.kind
    if cfg.scenario is not None:
        sc = build_scenario(cfg.scenario.name, cfg.scenario.nu, cfg.scenario.gamma, hbar=cfg.hbar)
        h, d = sc.h, sc.d
    else:
        h = HamiltonianSpec(kind, cfg.hamiltonian)
        try:
            d = DissipatorSet(kind, tuple(AlgebraElement(kind, v) for v in cfg.dissipators), cfg.hbar)
        except ValueError as exc:
            raise ConfigError("dissipators", str(exc)) from None
    try:
        return h, d, gkls_field(h, d, cfg.hbar)
    except ValueError as exc:
        raise ConfigError("dissipators", str(exc)) from None


def _part_linear(part, at=None) -> dict:
    """Constant and linear terms of a (possibly quadratic) field at the origin."""
    c = part(np.zeros(3))
    E = np.eye(3)
    A = ((part(E) - part(-E)) / 2.0).T
    quad = float(np.max(np.abs((part(E) + part(-E)) / 2.0 - c)))
    return {"A": A.tolist(), "c": c.tolist(), "quadratic_size": quad}


def build_report(cfg: RunConfig, fd: FieldDecomposition, h, d, traj=None) -> dict:
    """Decomposition, fixed points, spectrum and audit summary."""
    A, c = fd.A, fd.c
    eig = sorted(np.linalg.eigvals(A), key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    fixed = []
    note = "unique"
    if np.linalg.cond(A) < 1e12:
        fixed = [np.linalg.solve(A, -c).tolist()]
    else:
        note = "A is singular; the fixed points form a set (not listed)"
    p0 = StatePoint(cfg.kind, cfg.initial)
    try:
        oracle_res = float(np.max(np.abs(fd.gamma(p0) - oracle_velocity(h, d, p0, fd.hbar))))
    except (TracePreservationError, ValueError) as exc:
        oracle_res = float("nan")
        note += f"; oracle failed: {exc}"
    audit: dict[str, Any] = {
        "oracle_residual_initial": oracle_res,
        "cancellation_residual": fd.cancellation_residual,
        "kernel_backend": kernels.BACKEND,
    }
    if traj is not None:
        audit.update(
            {
                "samples": len(traj),
                "max_constraint_violation": float(max(0.0, -float(np.min(traj.residuals)))),
                "min_residual": float(np.min(traj.residuals)),
                "purity_initial": float(traj.purity[0]),
                "purity_final": float(traj.purity[-1]),
                "max_purity_change": float(np.max(np.abs(traj.purity - traj.purity[0]))),
            }
        )
    return {
        "system": cfg.system,
        "hbar": fd.hbar,
        "source": cfg.scenario.name if cfg.scenario else "custom",
        "gamma": {"A": A.tolist(), "c": c.tolist()},
        "parts": {"X_H": _part_linear(fd.X_H), "Y_b": _part_linear(fd.Y_b), "Z_K": _part_linear(fd.Z_K)},
        "V": fd.V.coeffs.real.tolist(),
        "b": fd.b.tolist(),
        "kraus": fd.kraus.K.tolist(),
        "fixed_points": fixed,
        "fixed_point_status": note,
        "eigenvalues": [[z.real, z.imag] for z in eig],
        "audit": audit,
    }


def trajectory_rows(traj) -> list[list[str]]:
    return [[fmt(t), fmt(p[0]), fmt(p[1]), fmt(p[2]), fmt(r), fmt(res)] for t, p, r, res in zip(traj.times, traj.coords, traj.purity, traj.residuals)]


def sample_field_grid(cfg: RunConfig, fd: FieldDecomposition | None = None) -> list[list[str]]:
    """Rows (g1, g2, g3, f1, f2, f3, r, physical) over the tensor grid."""
    if cfg.grid is None:
        raise ConfigError("grid", "a grid block is required for field sampling")
    if any(int(n) < 1 for n in cfg.grid.counts):
        raise ConfigError("grid.counts", "grid degenerate: counts must be positive")
    if fd is None:
        fd = build_system(cfg)[2]
    axes = [np.linspace(lo, hi, int(n)) for (lo, hi), n in zip(cfg.grid.ranges, cfg.grid.counts)]
    G = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    F = fd.gamma(G)
    res = constraint_residual(cfg.kind, G)
    if cfg.kind is AlgebraKind.QBIT:
        r = np.sqrt(np.sum(G * G, axis=1))
    else:
        r = np.sqrt(np.maximum(G[:, 0] ** 2 - G[:, 1] ** 2 - G[:, 2] ** 2, 0.0))
    return [[fmt(g[0]), fmt(g[1]), fmt(g[2]), fmt(f[0]), fmt(f[1]), fmt(f[2]), fmt(rr), "true" if ok >= 0 else "false"] for g, f, rr, ok in zip(G, F, r, res)]


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run(cfg: RunConfig) -> int:
    """Integrate, then write every requested output.  Returns an exit code."""
    h, d, fd = build_system(cfg)
    p0 = StatePoint(cfg.kind, cfg.initial)
    try:
        traj = integrate_rk4(fd.gamma, p0, cfg.time.integrator_config())
    except DriftError as exc:
        print(f"gkls: drift error: {exc}", file=sys.stderr)
        return EXIT_DRIFT
    out = cfg.outputs
    if out.trajectory_csv:
        _write(out.trajectory_csv, _csv_text(TRAJECTORY_HEADER, trajectory_rows(traj)))
    if out.field_grid_csv and cfg.grid is not None:
        _write(out.field_grid_csv, _csv_text(GRID_HEADER, sample_field_grid(cfg, fd)))
    if out.report_json:
        _write(out.report_json, dumps(build_report(cfg, fd, h, d, traj)) + "\n")
    return EXIT_OK


def verify(cfg: RunConfig, samples: int = 200, seed: int = 0) -> dict:
    """Oracle and invariant audit of the configured system at random points."""
    h, d, fd = build_system(cfg)
    kind = cfg.kind
    rng = np.random.default_rng(seed)
    pts = [StatePoint(kind, cfg.initial)] + [random_physical_point(kind, rng) for _ in range(samples)]
    oracle = max(float(np.max(np.abs(fd.gamma(p) - oracle_velocity(h, d, p, fd.hbar)))) for p in pts)
    split = max(float(np.max(np.abs(fd.gamma(p) - fd.gamma_sum(p)))) for p in pts)
    ham = max(abs(lie_derivative_purity(fd.X_H, p, fd.hbar)) for p in pts if np.any(p.coords != 0.0))
    scale = 1.0 + float(np.max(np.abs(fd.A))) + float(np.max(np.abs(fd.c)))
    checks = {
        "oracle_max_residual": (oracle, 1e-9 * scale),
        "decomposition_max_residual": (split, 1e-10 * scale),
        "cancellation_residual": (fd.cancellation_residual, 1e-9 * scale),
        "hamiltonian_purity_derivative": (ham, 1e-12 * scale * 100.0),
    }
    summary = {k: {"value": v, "tolerance": tol, "ok": bool(v <= tol)} for k, (v, tol) in checks.items()}
    summary["ok"] = all(item["ok"] for item in summary.values())
    return summary


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gkls", description="GKLS dynamics of q-bits and Gaussian states.")
    ap.add_argument("--version", action="version", version=f"gkls {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="integrate a configuration and write its outputs")
    p_run.add_argument("config")
    p_field = sub.add_parser("field", help="sample the vector field on the configured grid")
    p_field.add_argument("config")
    p_sc = sub.add_parser("scenarios", help="built-in scenarios")
    p_sc.add_argument("action", choices=["list"])
    p_ver = sub.add_parser("verify", help="oracle and invariant audit only")
    p_ver.add_argument("config")
    p_ver.add_argument("--samples", type=int, default=200)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "scenarios":
            for name, system, desc in list_scenarios():
                print(f"{name:<16} {system:<9} {desc}")
            return EXIT_OK
        cfg = load_config(args.config)
        if args.command == "run":
            return run(cfg)
        if args.command == "field":
            text = _csv_text(GRID_HEADER, sample_field_grid(cfg))
            if cfg.outputs.field_grid_csv:
                _write(cfg.outputs.field_grid_csv, text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        summary = verify(cfg, samples=args.samples)
        print(dumps(summary))
        return EXIT_OK if summary["ok"] else EXIT_DRIFT
    except ConfigError as exc:
        print(f"gkls: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DriftError as exc:
        print(f"gkls: drift error: {exc}", file=sys.stderr)
        return EXIT_DRIFT
    except OSError as exc:
        print(f"gkls: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
