"""Physical parameter manifolds, charts, second moments and Wigner functions.

q-bit states live in the Bloch ball |x| <= 1, foliated by spheres of radius r.
Gaussian states (zero first moments) live in the solid hyperboloid
(y1)^2 - (y2)^2 - (y3)^2 >= 1, y1 > 0, foliated by hyperboloids of "radius" r.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .algebra import AlgebraKind
from .config import resolve_hbar

__all__ = [
    "StatePoint",
    "SecondMoments",
    "StereoNorth",
    "StereoSouth",
    "Siegel",
    "Squeezing",
    "ChartValue",
    "Chart",
    "PhysicalityReport",
    "NonPhysicalError",
    "ChartSingularityError",
    "state_point",
    "constraint_residual",
    "check_physical",
    "purity_r",
    "purity_trace",
    "moments_to_point",
    "point_to_moments",
    "to_chart",
    "from_chart",
    "apply_squeezing",
    "density_matrix_qbit",
    "laguerre",
    "wigner",
    "wigner_laguerre",
    "wigner_normalization",
    "random_physical_point",
]


class NonPhysicalError(ValueError):
    """A point lies outside the Bloch ball or the solid hyperboloid."""


class ChartSingularityError(ValueError):
    """A chart is evaluated at a pole, at r = 0, or outside its domain."""


@dataclass(frozen=True, eq=False)
class StatePoint:
    """Cartesian coordinates (x or y) of a state, tagged with the algebra kind."""

    kind: AlgebraKind
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if c.shape != (3,):
            raise ValueError(f"a state point needs 3 coordinates, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "kind", AlgebraKind.parse(self.kind))
        object.__setattr__(self, "coords", c)

    @property
    def r(self) -> float:
        return purity_r(self)

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self) -> str:
        return f"StatePoint({self.kind.value}, {self.coords.tolist()})"


def state_point(kind, coords) -> StatePoint:
    """Shorthand constructor."""
    return StatePoint(AlgebraKind.parse(kind), coords)


@dataclass(frozen=True)
class SecondMoments:
    """Position variance, momentum variance and symmetrized correlation."""

    sq2: float
    sp2: float
    sqp: float = 0.0

    def determinant(self) -> float:
        return self.sq2 * self.sp2 - self.sqp**2


# ---------------------------------------------------------------------------
# Physicality and purity
# ---------------------------------------------------------------------------


def constraint_residual(kind, coords) -> np.ndarray | float:
    """Signed physicality residual; non-negative means physical.

    q-bit: 1 - |x|^2.  Gaussian: (y1)^2 - (y2)^2 - (y3)^2 - 1 on the forward
    sheet; points with y1 <= 0 get the more negative of that value and y1.
    Works on arrays of shape (..., 3).
    """
    kind = AlgebraKind.parse(kind)
    c = np.asarray(coords, dtype=float)
    if kind is AlgebraKind.QBIT:
        res = 1.0 - np.sum(c * c, axis=-1)
    else:
        q = c[..., 0] ** 2 - c[..., 1] ** 2 - c[..., 2] ** 2 - 1.0
        res = np.where(c[..., 0] > 0.0, q, np.minimum(q, c[..., 0]))
    return float(res) if np.ndim(res) == 0 else res


@dataclass(frozen=True)
class PhysicalityReport:
    ok: bool
    residual: float
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_physical(p: StatePoint, tol: float = 0.0) -> PhysicalityReport:
    """Report the signed constraint residual; ``ok`` iff residual >= -tol."""
    res = constraint_residual(p.kind, p.coords)
    if not np.isfinite(res):
        return PhysicalityReport(False, float("nan"), "non-finite coordinates")
    if res >= -tol:
        return PhysicalityReport(True, res)
    where = "Bloch ball" if p.kind is AlgebraKind.QBIT else "solid hyperboloid"
    return PhysicalityReport(False, res, f"state outside {where} (residual {res:.3g})")


def _require_physical(p: StatePoint, tol: float) -> None:
    rep = check_physical(p, tol)
    if not rep.ok:
        raise NonPhysicalError(rep.message)


def purity_r(p: StatePoint, tol: float = 1e-9) -> float:
    """Leaf label r of a physical point.

    q-bit: r = |x| in [0, 1].  Gaussian: r = sqrt(y1^2 - y2^2 - y3^2) >= 1.
    Points within ``tol`` of the boundary (round-off) are accepted.
    """
    _require_physical(p, tol)
    c = p.coords
    if p.kind is AlgebraKind.QBIT:
        return float(math.sqrt(c @ c))
    return float(math.sqrt(max(c[0] ** 2 - c[1] ** 2 - c[2] ** 2, 0.0)))


def purity_trace(p: StatePoint) -> float:
    """Tr(rho^2): (1 + r^2)/2 for q-bits and 1/r for Gaussian states."""
    r = purity_r(p)
    return 0.5 * (1.0 + r * r) if p.kind is AlgebraKind.QBIT else 1.0 / r


# ---------------------------------------------------------------------------
# Second moments
# ---------------------------------------------------------------------------


def moments_to_point(m: SecondMoments, hbar: float | None = None) -> StatePoint:
    """y1 = (sp2 + sq2)/hbar, y2 = 2 sqp/hbar, y3 = (sp2 - sq2)/hbar."""
    hbar = resolve_hbar(hbar)
    if not (m.sq2 > 0.0 and m.sp2 > 0.0):
        raise NonPhysicalError("variances must be positive")
    if m.determinant() < hbar**2 / 4.0 * (1.0 - 1e-12):
        raise NonPhysicalError("Robertson-Schroedinger inequality violated")
    return StatePoint(
        AlgebraKind.GAUSSIAN,
        [(m.sp2 + m.sq2) / hbar, 2.0 * m.sqp / hbar, (m.sp2 - m.sq2) / hbar],
    )


def point_to_moments(p: StatePoint, hbar: float | None = None) -> SecondMoments:
    """Inverse of :func:`moments_to_point`."""
    hbar = resolve_hbar(hbar)
    if p.kind is not AlgebraKind.GAUSSIAN:
        raise ValueError("second moments are defined for Gaussian points only")
    y1, y2, y3 = p.coords
    if not y1 > abs(y3):
        raise NonPhysicalError("cannot invert moments: y1 <= |y3|")
    return SecondMoments(sq2=0.5 * hbar * (y1 - y3), sp2=0.5 * hbar * (y1 + y3), sqp=0.5 * hbar * y2)


def apply_squeezing(fiducial: SecondMoments, tau: float, phi: float, r: float, hbar: float | None = None) -> SecondMoments:
    """Action of the squeezing parameters (tau, phi) on an uncorrelated fiducial."""
    hbar = resolve_hbar(hbar)
    if fiducial.sqp != 0.0:
        raise ValueError("fiducial moments must have zero correlation")
    if tau < 0.0:
        raise ValueError("tau must be non-negative")
    if r < 1.0:
        raise ValueError("r must be at least 1")
    ch, sh = math.cosh(tau), math.sinh(tau)
    return SecondMoments(
        sq2=fiducial.sq2 * (ch - math.cos(phi) * sh),
        sp2=fiducial.sp2 * (ch + math.cos(phi) * sh),
        sqp=-0.5 * hbar * r * math.sin(phi) * sh,
    )


# ---------------------------------------------------------------------------
# Charts
# ---------------------------------------------------------------------------


class Chart(enum.Enum):
    NORTH = "north"
    SOUTH = "south"
    SIEGEL = "siegel"
    SQUEEZING = "squeezing"


@dataclass(frozen=True)
class StereoNorth:
    """z = (x1 - i x2) / (r - x3) on the q-bit sphere of radius r."""

    z: complex
    r: float
    chart = Chart.NORTH


@dataclass(frozen=True)
class StereoSouth:
    """zeta = (x1 + i x2) / (r + x3); on the overlap zeta = 1/z."""

    zeta: complex
    r: float
    chart = Chart.SOUTH


@dataclass(frozen=True)
class Siegel:
    """Upper half-plane coordinate C (Im C > 0) on the hyperboloid h_r."""

    C: complex
    r: float
    chart = Chart.SIEGEL


@dataclass(frozen=True)
class Squeezing:
    """Hyperbolic coordinates: y = r (cosh tau, sinh tau cos phi, sinh tau sin phi)."""

    tau: float
    phi: float
    r: float
    chart = Chart.SQUEEZING


ChartValue = Union[StereoNorth, StereoSouth, Siegel, Squeezing]

_QBIT_CHARTS = (Chart.NORTH, Chart.SOUTH)
_GAUSS_CHARTS = (Chart.SIEGEL, Chart.SQUEEZING)


def to_chart(p: StatePoint, chart) -> ChartValue:
    """Local coordinates of ``p`` in the requested chart of its leaf."""
    chart = Chart(chart) if not isinstance(chart, Chart) else chart
    r = purity_r(p)
    c = p.coords
    if p.kind is AlgebraKind.QBIT:
        if chart not in _QBIT_CHARTS:
            raise ValueError(f"chart {chart.value} is not a q-bit chart")
        if r == 0.0:
            raise ChartSingularityError("r = 0: the origin is a singular leaf")
        if chart is Chart.NORTH:
            den = r - c[2]
            if abs(den) <= 1e-14 * r:
                raise ChartSingularityError("north chart undefined at x3 = r")
            return StereoNorth(complex(c[0], -c[1]) / den, r)
        den = r + c[2]
        if abs(den) <= 1e-14 * r:
            raise ChartSingularityError("south chart undefined at x3 = -r")
        return StereoSouth(complex(c[0], c[1]) / den, r)
    if chart not in _GAUSS_CHARTS:
        raise ValueError(f"chart {chart.value} is not a Gaussian chart")
    if chart is Chart.SIEGEL:
        return Siegel(complex(c[1], r) / (c[0] - c[2]), r)
    rho = math.hypot(c[1], c[2])
    tau = math.asinh(rho / r)
    phi = math.atan2(c[2], c[1]) if rho > 0.0 else 0.0
    return Squeezing(tau, phi, r)


def from_chart(cv: ChartValue) -> StatePoint:
    """Cartesian point of a chart value (inverse of :func:`to_chart`)."""
    r = float(cv.r)
    if isinstance(cv, (StereoNorth, StereoSouth)):
        if not 0.0 < r <= 1.0:
            raise ChartSingularityError(f"q-bit leaf radius must be in (0, 1], got {r}")
        if isinstance(cv, StereoNorth):
            z = complex(cv.z)
            d = 1.0 + abs(z) ** 2
            return StatePoint(AlgebraKind.QBIT, [2 * r * z.real / d, -2 * r * z.imag / d, r * (abs(z) ** 2 - 1) / d])
        w = complex(cv.zeta)
        d = 1.0 + abs(w) ** 2
        return StatePoint(AlgebraKind.QBIT, [2 * r * w.real / d, 2 * r * w.imag / d, r * (1 - abs(w) ** 2) / d])
    if r < 1.0:
        raise ChartSingularityError(f"Gaussian leaf label must be >= 1, got {r}")
    if isinstance(cv, Siegel):
        C = complex(cv.C)
        if not C.imag > 0.0:
            raise ChartSingularityError("Siegel coordinate requires Im C > 0")
        n2 = abs(C) ** 2
        return StatePoint(
            AlgebraKind.GAUSSIAN,
            [r * (1 + n2) / (2 * C.imag), r * C.real / C.imag, r * (n2 - 1) / (2 * C.imag)],
        )
    if cv.tau < 0.0:
        raise ChartSingularityError("squeezing parameter tau must be non-negative")
    sh = math.sinh(cv.tau)
    return StatePoint(
        AlgebraKind.GAUSSIAN,
        [r * math.cosh(cv.tau), r * sh * math.cos(cv.phi), r * sh * math.sin(cv.phi)],
    )


def density_matrix_qbit(z: complex, r: float) -> np.ndarray:
    """q-bit density matrix in the north stereographic chart of the leaf r."""
    if not 0.0 < r <= 1.0:
        raise ValueError(f"r must lie in (0, 1], got {r}")
    z = complex(z)
    n2 = abs(z) ** 2
    m = np.array(
        [
            [0.5 * (1 - r) + 0.5 * (1 + r) * n2, r * z],
            [r * z.conjugate(), 0.5 * (1 + r) + 0.5 * (1 - r) * n2],
        ],
        dtype=complex,
    )
    return m / (1.0 + n2)


# ---------------------------------------------------------------------------
# Wigner functions
# ---------------------------------------------------------------------------

LAGUERRE_MAX_N = 50


def laguerre(n: int, x):
    """Laguerre polynomial L_n(x) by the three-term recurrence."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def _wigner_setup(m: SecondMoments, r: float | None, hbar: float):
    det = m.determinant()
    if not (m.sq2 > 0 and m.sp2 > 0 and det > 0):
        raise NonPhysicalError("moments are not physical")
    r_m = 2.0 * math.sqrt(det) / hbar
    if r is None:
        r = r_m
    elif abs(r - r_m) > 1e-9 * r_m:
        raise ValueError(f"r = {r} inconsistent with the moments (expected {r_m})")
    return float(r)


def _quadratic_form(q, p, m: SecondMoments, r: float, hbar: float):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    return (4.0 / (hbar**2 * r**2)) * (m.sp2 * q * q - 2.0 * m.sqp * q * p + m.sq2 * p * p)


def wigner(q, p, m: SecondMoments, r: float | None = None, hbar: float | None = None):
    """Gaussian Wigner function with zero first moments."""
    hbar = resolve_hbar(hbar)
    r = _wigner_setup(m, r, hbar)
    I = _quadratic_form(q, p, m, r, hbar)
    out = np.exp(-0.5 * I) / (math.pi * hbar * r)
    return float(out) if out.ndim == 0 else out


def wigner_laguerre(q, p, m: SecondMoments, r: float | None = None, n: int = 0, hbar: float | None = None):
    """Laguerre family W_n = ((-1)^n / (pi hbar r)) exp(-I/2) L_n(I)."""
    if n > LAGUERRE_MAX_N:
        raise ValueError(f"n must be <= {LAGUERRE_MAX_N}")
    hbar = resolve_hbar(hbar)
    r = _wigner_setup(m, r, hbar)
    I = _quadratic_form(q, p, m, r, hbar)
    out = ((-1) ** n / (math.pi * hbar * r)) * np.exp(-0.5 * I) * laguerre(n, I)
    return float(out) if out.ndim == 0 else out


def wigner_normalization(m: SecondMoments, n: int = 0, nodes: int = 200, width: float = 8.0, hbar: float | None = None) -> float:
    """Integral of W_n over a +-width standard-deviation box (Gauss-Legendre)."""
    hbar = resolve_hbar(hbar)
    x, w = np.polynomial.legendre.leggauss(nodes)
    aq, ap = width * math.sqrt(m.sq2), width * math.sqrt(m.sp2)
    Q, P = np.meshgrid(aq * x, ap * x, indexing="ij")
    W = wigner_laguerre(Q, P, m, n=n, hbar=hbar)
    return float(aq * ap * (w @ W @ w))


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def random_physical_point(kind, rng: np.random.Generator, r_max: float = 4.0, tau_max: float = 2.0) -> StatePoint:
    """Draw a physical point.

    q-bit: uniform in the unit ball.  Gaussian: r uniform in [1, r_max],
    tau uniform in [0, tau_max], phi uniform in [0, 2 pi), mapped through the
    hyperbolic coordinates.
    """
    kind = AlgebraKind.parse(kind)
    if kind is AlgebraKind.QBIT:
        v = rng.normal(size=3)
        v *= rng.uniform() ** (1.0 / 3.0) / np.linalg.norm(v)
        return StatePoint(kind, v)
    r = rng.uniform(1.0, r_max)
    return from_chart(Squeezing(rng.uniform(0.0, tau_max), rng.uniform(0.0, 2 * math.pi), r))
