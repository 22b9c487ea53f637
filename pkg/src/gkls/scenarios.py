"""The four built-in damping scenarios.

=================  ========  ======================================  ==================
name               system    Hamiltonian                             jump operator
=================  ========  ======================================  ==================
qbit_dephasing     q-bit     (hbar nu / 2) sigma^3                   sqrt(gamma/2) sigma^3
qbit_raising       q-bit     (hbar nu / 2) sigma^3                   sqrt(2 gamma) sigma_+
osc_L1             Gaussian  2 omega L^1                             (sqrt(gamma)/hbar) L^1
osc_Kplus          Gaussian  2 omega L^1                             sqrt(gamma) K_+
=================  ========  ======================================  ==================

The q-bit Hamiltonian coefficient H_3 = hbar nu / 2 makes nu the rotation
rate of X_H about the x^3 axis.  omega is fixed at 1 in the built-ins.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraElement, AlgebraKind
from .config import resolve_hbar
from .dynamics import DissipatorSet, HamiltonianSpec
from .state_space import StatePoint

__all__ = [
    "SCENARIOS",
    "Scenario",
    "AttractorSet",
    "UnknownScenarioError",
    "build_scenario",
    "closed_form",
    "list_scenarios",
    "sigma_plus",
    "k_plus",
]


class UnknownScenarioError(KeyError):
    pass


SCENARIOS = {
    "qbit_dephasing": ("qbit", "q-bit rotation with pure dephasing; attracted to the x3 axis"),
    "qbit_raising": ("qbit", "q-bit rotation with a sigma_+ jump; attracted to (0, 0, 1)"),
    "osc_L1": ("gaussian", "oscillator with an L1 jump; attracted to the line (y1, 0, 0)"),
    "osc_Kplus": ("gaussian", "oscillator with a K_+ jump; attracted to (2, 0, 0)"),
}


def sigma_plus() -> AlgebraElement:
    """sigma_+ = (sigma^1 + i sigma^2) / 2."""
    return AlgebraElement(AlgebraKind.QBIT, [0.0, 0.5, 0.5j, 0.0])


def k_plus(hbar: float | None = None) -> AlgebraElement:
    """K_+ = (L^3 + i L^2) / (i hbar)."""
    hbar = resolve_hbar(hbar)
    return AlgebraElement(AlgebraKind.GAUSSIAN, [0.0, 0.0, 1.0 / hbar, -1j / hbar])


@dataclass(frozen=True, eq=False)
class AttractorSet:
    """A point, or the line through ``point`` along ``direction``."""

    point: np.ndarray
    direction: np.ndarray | None = None

    def distance(self, coords) -> np.ndarray | float:
        x = np.asarray(coords, dtype=float) - self.point
        if self.direction is not None:
            u = self.direction / np.linalg.norm(self.direction)
            x = x - np.multiply.outer(x @ u, u)
        d = np.linalg.norm(x, axis=-1)
        return float(d) if np.ndim(d) == 0 else d


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    kind: AlgebraKind
    h: HamiltonianSpec
    d: DissipatorSet
    params: dict
    expected_affine: tuple
    fixed_points: tuple
    attractor: AttractorSet
    description: str = ""
    hbar: float = field(default=1.0)


def _expected(name: str, nu: float, gamma: float, omega: float):
    A = np.zeros((3, 3))
    c = np.zeros(3)
    if name.startswith("qbit"):
        A[:2, :2] = [[-gamma, -nu], [nu, -gamma]]
        if name == "qbit_raising":
            A[2, 2] = -2.0 * gamma
            c[2] = 2.0 * gamma
    else:
        A[1:, 1:] = [[-0.5 * gamma, 2.0 * omega], [-2.0 * omega, -0.5 * gamma]]
        if name == "osc_Kplus":
            A[0, 0] = -gamma
            c[0] = 2.0 * gamma
    return A, c


def build_scenario(name: str, nu: float = 2.0, gamma: float = 1.0, omega: float = 1.0, hbar: float | None = None) -> Scenario:
    """Assemble one of the built-in scenarios with the given parameters."""
    if name not in SCENARIOS:
        raise UnknownScenarioError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    if gamma < 0.0:
        raise ValueError("gamma must be non-negative")
    hbar = resolve_hbar(hbar)
    kind = AlgebraKind.parse(SCENARIOS[name][0])
    if kind is AlgebraKind.QBIT:
        h = HamiltonianSpec(kind, [0.0, 0.0, 0.0, 0.5 * hbar * nu])
        if name == "qbit_dephasing":
            v = AlgebraElement(kind, [0.0, 0.0, 0.0, math.sqrt(gamma / 2.0)])
            fixed = tuple(StatePoint(kind, [0.0, 0.0, z]) for z in (-1.0, -0.5, 0.0, 0.5, 1.0))
            attractor = AttractorSet(np.zeros(3), np.array([0.0, 0.0, 1.0]))
        else:
            v = math.sqrt(2.0 * gamma) * sigma_plus()
            fixed = (StatePoint(kind, [0.0, 0.0, 1.0]),)
            attractor = AttractorSet(np.array([0.0, 0.0, 1.0]))
    else:
        h = HamiltonianSpec(kind, [0.0, 2.0 * omega, 0.0, 0.0])
        if name == "osc_L1":
            v = AlgebraElement(kind, [0.0, math.sqrt(gamma) / hbar, 0.0, 0.0])
            fixed = tuple(StatePoint(kind, [y, 0.0, 0.0]) for y in (1.0, 1.5, 2.0, 5.0))
            attractor = AttractorSet(np.zeros(3), np.array([1.0, 0.0, 0.0]))
        else:
            v = math.sqrt(gamma) * k_plus(hbar)
            fixed = (StatePoint(kind, [2.0, 0.0, 0.0]),)
            attractor = AttractorSet(np.array([2.0, 0.0, 0.0]))
    d = DissipatorSet(kind, (v,) if gamma > 0.0 else (), hbar)
    return Scenario(
        name=name,
        kind=kind,
        h=h,
        d=d,
        params={"nu": float(nu), "gamma": float(gamma), "omega": float(omega)},
        expected_affine=_expected(name, nu, gamma, omega),
        fixed_points=fixed,
        attractor=attractor,
        description=SCENARIOS[name][1],
        hbar=hbar,
    )


def list_scenarios() -> list[tuple[str, str, str]]:
    """(name, system, description) for every built-in scenario."""
    return [(k, v[0], v[1]) for k, v in SCENARIOS.items()]


def closed_form(scenario, p0: StatePoint, t, nu: float | None = None, gamma: float | None = None) -> StatePoint:
    """Closed-form state at time t (``t = inf`` gives the limit point).

    ``scenario`` is a :class:`Scenario` or a name; with a name, ``nu`` and
    ``gamma`` default to 2 and 1.
    """
    if isinstance(scenario, Scenario):
        name = scenario.name
        nu = scenario.params["nu"] if nu is None else nu
        gamma = scenario.params["gamma"] if gamma is None else gamma
        omega = scenario.params["omega"]
    else:
        name = scenario
        if name not in SCENARIOS:
            raise UnknownScenarioError(f"unknown scenario {name!r}")
        nu = 2.0 if nu is None else nu
        gamma = 1.0 if gamma is None else gamma
        omega = 1.0
    kind = AlgebraKind.parse(SCENARIOS[name][0])
    if p0.kind is not kind:
        raise ValueError(f"scenario {name} needs a {kind.value} initial point")
    a, b, c = p0.coords
    t = float(t)
    if kind is AlgebraKind.QBIT:
        if math.isinf(t) and gamma > 0.0:
            x1 = x2 = 0.0
        else:
            e = math.exp(-gamma * t)
            co, si = math.cos(nu * t), math.sin(nu * t)
            x1 = e * (a * co - b * si)
            x2 = e * (b * co + a * si)
        if name == "qbit_dephasing":
            x3 = c
        else:
            x3 = 1.0 + (c - 1.0) * math.exp(-2.0 * gamma * t)
        return StatePoint(kind, [x1, x2, x3])
    if math.isinf(t) and gamma > 0.0:
        y2 = y3 = 0.0
    else:
        e = math.exp(-0.5 * gamma * t)
        co, si = math.cos(2.0 * omega * t), math.sin(2.0 * omega * t)
        y2 = e * (b * co + c * si)
        y3 = e * (c * co - b * si)
    y1 = a if name == "osc_L1" else (a - 2.0) * math.exp(-gamma * t) + 2.0
    return StatePoint(kind, [y1, y2, y3])
