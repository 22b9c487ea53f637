"""Trajectories: fixed-step RK4, exact affine integration, invariant monitoring."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .algebra import AlgebraKind
from .state_space import NonPhysicalError, StatePoint, check_physical, constraint_residual

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "DriftError",
    "NonFiniteStateError",
    "integrate_rk4",
    "integrate_exact_affine",
    "expm",
    "scenario_solution",
]


class DriftError(RuntimeError):
    """The integrated state left the physical manifold by more than drift_tol."""

    def __init__(self, message: str, t: float = float("nan"), coords=None, residual: float = float("nan")):
        super().__init__(message)
        self.t = t
        self.coords = None if coords is None else np.asarray(coords, dtype=float)
        self.residual = residual


class NonFiniteStateError(DriftError):
    """The integrated state became infinite or NaN."""


@dataclass(frozen=True)
class IntegratorConfig:
    t0: float = 0.0
    t1: float = 1.0
    dt: float = 1e-3
    monitor_every: int = 10
    drift_tol: float = 1e-8

    def __post_init__(self):
        for name in ("t0", "t1", "dt", "drift_tol"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.t1 > self.t0:
            raise ValueError("t1 must be greater than t0")
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if self.dt > (self.t1 - self.t0) * (1.0 + 1e-12):
            raise ValueError("dt must not exceed t1 - t0")
        if int(self.monitor_every) != self.monitor_every or self.monitor_every < 1:
            raise ValueError("monitor_every must be a positive integer")
        if self.drift_tol < 0.0:
            raise ValueError("drift_tol must be non-negative")

    def steps(self) -> tuple[int, float]:
        """(number of full dt steps, length of a final partial step or 0)."""
        span = self.t1 - self.t0
        n = int(math.floor(span / self.dt + 1e-9))
        rem = span - n * self.dt
        if rem <= 1e-9 * self.dt:
            return n, 0.0
        return n, rem


def _purity_array(kind: AlgebraKind, pts: np.ndarray) -> np.ndarray:
    if kind is AlgebraKind.QBIT:
        return np.sqrt(np.sum(pts * pts, axis=-1))
    return np.sqrt(np.maximum(pts[:, 0] ** 2 - pts[:, 1] ** 2 - pts[:, 2] ** 2, 0.0))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Stored samples of an integral curve with their invariant logs."""

    kind: AlgebraKind
    times: np.ndarray
    coords: np.ndarray
    purity: np.ndarray
    residuals: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if not (self.coords.shape == (n, 3) and len(self.purity) == n and len(self.residuals) == n):
            raise ValueError("trajectory arrays must have equal lengths")
        for arr in (self.times, self.coords, self.purity, self.residuals):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def points(self) -> list[StatePoint]:
        return [StatePoint(self.kind, c) for c in self.coords]

    @property
    def final(self) -> StatePoint:
        return StatePoint(self.kind, self.coords[-1])

    @classmethod
    def from_arrays(cls, kind: AlgebraKind, times, coords) -> "Trajectory":
        times = np.array(times, dtype=float)
        coords = np.array(coords, dtype=float).reshape(-1, 3)
        res = np.asarray(constraint_residual(kind, coords), dtype=float).reshape(-1)
        return cls(kind, times, coords, _purity_array(kind, coords), res)


def _raise_drift(kind, t, coords, residual, drift_tol):
    if not np.all(np.isfinite(coords)):
        raise NonFiniteStateError(f"non-finite state at t = {t:.17g}", t, coords, residual)
    raise DriftError(
        f"physicality residual {residual:.3e} below -{drift_tol:.1e} at t = {t:.17g}, state {np.asarray(coords).tolist()}",
        t,
        coords,
        residual,
    )


def _kind_code(kind: AlgebraKind) -> int:
    return 0 if kind is AlgebraKind.QBIT else 1


def integrate_rk4(field, p0: StatePoint, cfg: IntegratorConfig, use_kernel: bool = True) -> Trajectory:
    """Fixed-step classical RK4.

    ``field`` is either an object with an ``affine`` attribute ``(A, c)`` (a
    :class:`gkls.dynamics.Field`), in which case the compiled kernel is used,
    or any callable mapping a coordinate array to a velocity.  Samples are
    stored at the start, every ``cfg.monitor_every`` steps and at the end.
    """
    rep = check_physical(p0, cfg.drift_tol)
    if not rep.ok:
        raise NonPhysicalError(f"initial state is not physical: {rep.message}")
    kind = p0.kind
    n_full, last = cfg.steps()
    affine = getattr(field, "affine", None)
    if use_kernel and affine is not None:
        A, c = affine
        times, pts, res, fail = kernels.rk4_affine(
            np.ascontiguousarray(A, dtype=float),
            np.ascontiguousarray(c, dtype=float),
            p0.coords,
            cfg.t0,
            cfg.dt,
            n_full,
            last,
            int(cfg.monitor_every),
            _kind_code(kind),
            cfg.drift_tol,
        )
        times, pts, res = np.array(times), np.array(pts), np.array(res)
        if fail >= 0:
            _raise_drift(kind, times[fail], pts[fail], res[fail], cfg.drift_tol)
        return Trajectory(kind, times, pts, _purity_array(kind, pts), res)
    return _rk4_generic(field, p0, cfg, n_full, last)


def _rk4_generic(f: Callable, p0: StatePoint, cfg: IntegratorConfig, n_full: int, last: float) -> Trajectory:
    kind = p0.kind
    x = p0.coords.astype(float).copy()
    n_steps = n_full + (1 if last > 0.0 else 0)
    t_end = cfg.t0 + n_full * cfg.dt + last
    times = [cfg.t0]
    pts = [x.copy()]
    for k in range(1, n_steps + 1):
        h = cfg.dt if k <= n_full else last
        k1 = np.asarray(f(x), dtype=float)
        k2 = np.asarray(f(x + 0.5 * h * k1), dtype=float)
        k3 = np.asarray(f(x + 0.5 * h * k2), dtype=float)
        k4 = np.asarray(f(x + h * k3), dtype=float)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k % cfg.monitor_every == 0 or k == n_steps:
            t = t_end if k == n_steps else cfg.t0 + k * cfg.dt
            r = constraint_residual(kind, x)
            if not (r >= -cfg.drift_tol) or not np.all(np.isfinite(x)):
                _raise_drift(kind, t, x, r, cfg.drift_tol)
            times.append(t)
            pts.append(x.copy())
    return Trajectory.from_arrays(kind, times, pts)


# ---------------------------------------------------------------------------
# Matrix exponential: scaling and squaring with a degree-13 Pade approximant
# ---------------------------------------------------------------------------

_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


def expm(M) -> np.ndarray:
    """Matrix exponential by scaling and squaring with the [13/13] Pade approximant."""
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix exponential of a non-finite matrix")
    n = M.shape[0]
    norm = float(np.max(np.sum(np.abs(M), axis=0))) if n else 0.0
    s = 0
    if norm > _THETA13:
        s = int(math.ceil(math.log2(norm / _THETA13)))
        M = M / (2.0**s)
    b = _PADE13
    ident = np.eye(n)
    M2 = M @ M
    M4 = M2 @ M2
    M6 = M4 @ M2
    U = M @ (M6 @ (b[13] * M6 + b[11] * M4 + b[9] * M2) + b[7] * M6 + b[5] * M4 + b[3] * M2 + b[1] * ident)
    V = M6 @ (b[12] * M6 + b[10] * M4 + b[8] * M2) + b[6] * M6 + b[4] * M4 + b[2] * M2 + b[0] * ident
    E = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        E = E @ E
    return E


def integrate_exact_affine(A, c, p0: StatePoint, times) -> Trajectory:
    """Exact solution of p' = A p + c with p(0) = p0, sampled at ``times``.

    The inhomogeneity is absorbed by the 4x4 augmented matrix [[A, c], [0, 0]].
    """
    A = np.asarray(A, dtype=float)
    c = np.asarray(c, dtype=float)
    times = np.asarray(times, dtype=float).reshape(-1)
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(c)) and np.all(np.isfinite(times))):
        raise ValueError("non-finite entries in the affine system")
    if len(times) and (times[0] < 0.0 or np.any(np.diff(times) < 0.0)):
        raise ValueError("times must be sorted and non-negative")
    M = np.zeros((4, 4))
    M[:3, :3] = A
    M[:3, 3] = c
    z0 = np.append(p0.coords, 1.0)
    out = np.empty((len(times), 3))
    for i, t in enumerate(times):
        out[i] = (expm(M * t) @ z0)[:3]
    return Trajectory.from_arrays(p0.kind, times, out)


def scenario_solution(scenario, p0: StatePoint, t, nu: float | None = None, gamma: float | None = None) -> StatePoint:
    """Closed-form solution of a built-in scenario (see :mod:`gkls.scenarios`)."""
    from .scenarios import closed_form

    return closed_form(scenario, p0, t, nu=nu, gamma=gamma)
