"""GKLS vector fields on the Bloch ball and on the solid hyperboloid.

The generator L(xi) = -(i/hbar)[H, xi] - 1/2 {V, xi} + sum_j v_j xi v_j^dagger,
V = sum_j v_j^dagger v_j, induces an affine vector field Gamma on the state
coordinates.  Gamma is assembled from three parts that are each quadratic or
linear on their own:

* X_H  Hamiltonian (linear, tangent to the leaves of constant purity),
* Y_b  gradient-like (quadratic), built from b = -(hbar/2) V for q-bits and
  b = -hbar V for Gaussian states,
* Z_K  Choi-Kraus (quadratic), built from the jump map K(xi) = sum v xi v^dagger.

The quadratic pieces of Y_b and Z_K cancel; this is checked numerically on
construction.  :func:`oracle_velocity` recomputes the velocity directly from
2x2 matrix arithmetic and serves as the reference implementation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    AlgebraKind,
    KindMismatchError,
    basis_matrices,
    dagger,
    element_matrix,
    is_observable,
    jordan_product,
    lie_product,
    metric,
    project_to_basis,
)
from .config import resolve_hbar
from .state_space import (
    ChartSingularityError,
    Chart,
    Siegel,
    StatePoint,
    StereoNorth,
    StereoSouth,
    from_chart,
    purity_r,
    to_chart,
)

__all__ = [
    "HamiltonianSpec",
    "DissipatorSet",
    "KrausMatrix",
    "Field",
    "FieldDecomposition",
    "ConventionError",
    "TracePreservationError",
    "hamiltonian_from_quadratic",
    "quadratic_form_coefficients",
    "hamiltonian_field",
    "leaf_hamiltonian_field",
    "gradient_like_field",
    "kraus_matrix",
    "choi_kraus_field",
    "gkls_field",
    "oracle_velocity",
    "riccati_rhs",
    "riccati_gradient_rhs",
    "BracketValues",
    "leaf_brackets",
    "expectation",
    "casimir",
    "lie_derivative_purity",
    "random_dissipator",
]


class ConventionError(RuntimeError):
    """Raised when the quadratic parts of Y_b and Z_K fail to cancel."""


class TracePreservationError(RuntimeError):
    """Raised when the oracle generator does not preserve the trace."""


# ---------------------------------------------------------------------------
# Specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """Real coefficients H_mu of the Hamiltonian over the basis of ``kind``."""

    kind: AlgebraKind
    H: np.ndarray

    def __post_init__(self):
        h = np.array(self.H, dtype=float).reshape(-1)
        if h.shape != (4,) or not np.all(np.isfinite(h)):
            raise ValueError("Hamiltonian needs 4 finite real coefficients")
        h.setflags(write=False)
        object.__setattr__(self, "kind", AlgebraKind.parse(self.kind))
        object.__setattr__(self, "H", h)

    def element(self) -> AlgebraElement:
        return AlgebraElement(self.kind, self.H)


def hamiltonian_from_quadratic(H1: float, V: float, H2: float) -> HamiltonianSpec:
    """Gaussian Hamiltonian (1/2)[H1 p^2 + V(qp + pq) + H2 q^2] in the L basis.

    The L coefficients are (H1 + H2, 2 V, H1 - H2).
    """
    return HamiltonianSpec(AlgebraKind.GAUSSIAN, [0.0, H1 + H2, 2.0 * V, H1 - H2])


def quadratic_form_coefficients(h: HamiltonianSpec) -> tuple[float, float, float]:
    """Inverse of :func:`hamiltonian_from_quadratic`: returns (H1, V, H2)."""
    if h.kind is not AlgebraKind.GAUSSIAN:
        raise ValueError("quadratic-form coefficients exist for Gaussian Hamiltonians only")
    _, a1, a2, a3 = h.H
    return 0.5 * (a1 + a3), 0.5 * a2, 0.5 * (a1 - a3)


@dataclass(frozen=True, eq=False)
class DissipatorSet:
    """Jump operators v_j (complex coefficients allowed)."""

    kind: AlgebraKind
    vs: tuple = ()
    hbar: float | None = None

    def __post_init__(self):
        kind = AlgebraKind.parse(self.kind)
        vs = tuple(v if isinstance(v, AlgebraElement) else AlgebraElement(kind, v) for v in self.vs)
        for v in vs:
            if v.kind is not kind:
                raise KindMismatchError("dissipator kind does not match the set")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "vs", vs)
        object.__setattr__(self, "hbar", resolve_hbar(self.hbar))
        V = self._compute_V()
        if not is_observable(V, tol=1e-12 * max(1.0, float(np.max(np.abs(V.coeffs))))):
            raise ValueError("V = sum v^dagger v is not self-adjoint; dissipators are inconsistent")
        object.__setattr__(self, "_V", AlgebraElement(kind, V.coeffs.real))

    def _compute_V(self) -> AlgebraElement:
        total = np.zeros((2, 2), dtype=complex)
        for v in self.vs:
            m = element_matrix(v, self.hbar)
            total += m.conj().T @ m
        return AlgebraElement(self.kind, project_to_basis(total, self.kind, self.hbar))

    @property
    def V(self) -> AlgebraElement:
        return self._V

    def matrices(self) -> np.ndarray:
        if not self.vs:
            return np.zeros((0, 2, 2), dtype=complex)
        return np.stack([element_matrix(v, self.hbar) for v in self.vs])


@dataclass(frozen=True, eq=False)
class KrausMatrix:
    """Coefficient table of the jump map.

    q-bit: K[eta, k] = Tr(K(sigma^eta) sigma^k).
    Gaussian: K[mu, k] = (1/2 hbar) sum_alpha Tr(v L^alpha v^dagger L^k) g_{alpha mu}.
    """

    kind: AlgebraKind
    K: np.ndarray
    hbar: float


def kraus_matrix(d: DissipatorSet) -> KrausMatrix:
    """Tabulate the Kraus coefficients from 2x2 matrix traces."""
    hbar = d.hbar
    basis = basis_matrices(d.kind, hbar)
    vm = d.matrices()
    if len(vm) == 0:
        return KrausMatrix(d.kind, np.zeros((4, 4)), hbar)
    # T[a, k] = sum_j Tr(v_j e^a v_j^dagger e^k)
    T = np.einsum("jpq,aqr,jsr,ksp->ak", vm, basis, vm.conj(), basis, optimize=True)
    if d.kind is AlgebraKind.QBIT:
        K = T
    else:
        K = (metric(d.kind)[:, None] * T) / (2.0 * hbar)
    scale = max(1.0, float(np.max(np.abs(K))))
    if float(np.max(np.abs(K.imag))) > 1e-10 * scale:
        raise ValueError(
            "Kraus coefficients have an imaginary part; the dissipators do not induce a real vector field"
        )
    K = np.ascontiguousarray(K.real)
    K.setflags(write=False)
    return KrausMatrix(d.kind, K, hbar)


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------


def _coords(p) -> np.ndarray:
    if isinstance(p, StatePoint):
        return p.coords
    return np.asarray(p, dtype=float)


class Field:
    """A vector field on R^3 evaluable on a StatePoint or an array (..., 3).

    ``affine`` is set to ``(A, c)`` when the field is known to be affine; the
    field is then evaluated as A p + c.
    """

    def __init__(self, kind, fn: Callable[[np.ndarray], np.ndarray] | None = None, affine=None, name: str = "field"):
        self.kind = AlgebraKind.parse(kind)
        self.name = name
        if affine is not None:
            A = np.array(affine[0], dtype=float)
            c = np.array(affine[1], dtype=float)
            A.setflags(write=False)
            c.setflags(write=False)
            self.affine = (A, c)
        else:
            self.affine = None
        if fn is None:
            if self.affine is None:
                raise ValueError("a field needs a function or an affine form")
            A, c = self.affine
            fn = lambda x: x @ A.T + c  # noqa: E731
        self._fn = fn

    def __call__(self, p) -> np.ndarray:
        return self._fn(_coords(p))

    def __add__(self, other: "Field") -> "Field":
        if other.kind is not self.kind:
            raise KindMismatchError("cannot add fields of different kinds")
        f, g = self._fn, other._fn
        affine = None
        if self.affine is not None and other.affine is not None:
            affine = (self.affine[0] + other.affine[0], self.affine[1] + other.affine[1])
        return Field(self.kind, lambda x: f(x) + g(x), affine, f"{self.name}+{other.name}")

    def scaled(self, factor_fn: Callable[[np.ndarray], np.ndarray], name: str | None = None) -> "Field":
        """Pointwise rescaling by a scalar function of the coordinates."""
        f = self._fn
        return Field(self.kind, lambda x: f(x) * np.asarray(factor_fn(x))[..., None], None, name or self.name)

    def __repr__(self) -> str:
        return f"Field({self.kind.value}, {self.name!r}, affine={self.affine is not None})"


def _levi_contract(H3: np.ndarray) -> np.ndarray:
    """M[j, l] = sum_k eps^{k j l} H_k, so that M x = x cross H."""
    h1, h2, h3 = H3
    return np.array([[0.0, h3, -h2], [-h3, 0.0, h1], [h2, -h1, 0.0]])


def _hamiltonian_matrix(h: HamiltonianSpec, hbar: float) -> np.ndarray:
    H = h.H
    if h.kind is AlgebraKind.QBIT:
        # X^j = -(2/hbar) eps^{k j l} H_k x^l
        return -(2.0 / hbar) * _levi_contract(H[1:])
    _, h1, h2, h3 = H
    # X = -(y3 H2 - y2 H3) d1 + (y1 H3 + y3 H1) d2 - (y1 H2 + y2 H1) d3
    return np.array([[0.0, h3, -h2], [h3, 0.0, h1], [-h2, -h1, 0.0]])


def hamiltonian_field(h: HamiltonianSpec, hbar: float | None = None) -> Field:
    """Linear Hamiltonian vector field X_H (independent of H_0)."""
    hbar = resolve_hbar(hbar)
    return Field(h.kind, affine=(_hamiltonian_matrix(h, hbar), np.zeros(3)), name="X_H")


def leaf_hamiltonian_field(h: HamiltonianSpec, hbar: float | None = None) -> Field:
    """X_H / r: the Hamiltonian field normalized by the leaf label.

    This is the field whose chart components are the Riccati equations.
    """
    X = hamiltonian_field(h, hbar)
    if h.kind is AlgebraKind.QBIT:
        return X.scaled(lambda x: 1.0 / np.sqrt(np.sum(x * x, axis=-1)), "X_H/r")
    return X.scaled(lambda x: 1.0 / np.sqrt(x[..., 0] ** 2 - x[..., 1] ** 2 - x[..., 2] ** 2), "X_H/r")


def gradient_like_field(kind, b, hbar: float | None = None) -> Field:
    """Gradient-like field Y_b for real b = (b_0, b_1, b_2, b_3).

    q-bit: Y^l = (2/hbar)(delta^{kl} - x^k x^l) b_k.
    Gaussian: Y^j = (g^{kj} - y^k y^j) b_k.
    """
    kind = AlgebraKind.parse(kind)
    hbar = resolve_hbar(hbar)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if b.shape != (4,):
        raise ValueError("b needs 4 coefficients")
    if np.any(np.abs(b.imag) > 1e-12 * max(1.0, float(np.max(np.abs(b))))):
        raise ValueError("b must be real")
    bs = b.real[1:].copy()
    if kind is AlgebraKind.QBIT:
        pref = 2.0 / hbar
        lin = pref * bs

        def fn(x):
            return pref * (bs - x * (x @ bs)[..., None])

    else:
        lin = metric(kind)[1:] * bs

        def fn(x):
            return lin - x * (x @ bs)[..., None]

    return Field(kind, fn, name="Y_b")


def choi_kraus_field(d: DissipatorSet, kraus: KrausMatrix | None = None) -> Field:
    """Choi-Kraus field Z_K.

    q-bit: Z^k = (1/2) K^{mu k} x^mu - (V_0 + V.x) x^k, with x^0 = 1.
    Gaussian: Z^k = (4/hbar) K_mu^k y^mu - hbar (V_0/2 + V.y) y^k, with y^0 = 2.
    """
    hbar = d.hbar
    K = (kraus or kraus_matrix(d)).K
    V = d.V.coeffs.real
    Vs = V[1:].copy()
    if d.kind is AlgebraKind.QBIT:
        M = 0.5 * K[1:, 1:].T.copy()
        k0 = 0.5 * K[0, 1:].copy()

        def fn(x):
            return x @ M.T + k0 - x * (V[0] + x @ Vs)[..., None]

    else:
        M = (4.0 / hbar) * K[1:, 1:].T.copy()
        k0 = (4.0 / hbar) * 2.0 * K[0, 1:].copy()

        def fn(x):
            return x @ M.T + k0 - hbar * x * (0.5 * V[0] + x @ Vs)[..., None]

    return Field(d.kind, fn, name="Z_K")


@dataclass(frozen=True, eq=False)
class FieldDecomposition:
    """Hamiltonian, gradient-like and Choi-Kraus parts plus their affine sum."""

    kind: AlgebraKind
    X_H: Field
    Y_b: Field
    Z_K: Field
    A: np.ndarray
    c: np.ndarray
    b: np.ndarray
    V: AlgebraElement
    kraus: KrausMatrix
    hbar: float
    cancellation_residual: float = 0.0
    gamma: Field = dc_field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "gamma", Field(self.kind, affine=(self.A, self.c), name="Gamma"))

    @property
    def Gamma_affine(self) -> tuple[np.ndarray, np.ndarray]:
        return self.A, self.c

    def gamma_sum(self, p) -> np.ndarray:
        """X_H(p) + Y_b(p) + Z_K(p) evaluated part by part."""
        x = _coords(p)
        return self.X_H(x) + self.Y_b(x) + self.Z_K(x)

    def __call__(self, p) -> np.ndarray:
        return self.gamma(p)


_AFFINITY_RNG_SEED = 20240531


def gkls_field(h: HamiltonianSpec, d: DissipatorSet, hbar: float | None = None, check_points: int = 20) -> FieldDecomposition:
    """Build X_H, Y_b, Z_K and extract the affine form of their sum.

    The affine pair (A, c) is read off from the evaluations at the origin and
    at the three unit vectors; the sum is then compared with A p + c at
    ``check_points`` pseudo-random points.
    """
    if h.kind is not d.kind:
        raise KindMismatchError("Hamiltonian and dissipators belong to different algebras")
    hbar = resolve_hbar(hbar if hbar is not None else d.hbar)
    if d.hbar != hbar:
        d = DissipatorSet(d.kind, d.vs, hbar)
    kind = h.kind
    V = d.V.coeffs.real
    b = (-0.5 * hbar if kind is AlgebraKind.QBIT else -hbar) * V
    kraus = kraus_matrix(d)
    X = hamiltonian_field(h, hbar)
    Y = gradient_like_field(kind, b, hbar)
    Z = choi_kraus_field(d, kraus)

    def total(x):
        return X(x) + Y(x) + Z(x)

    probes = np.vstack([np.zeros(3), np.eye(3)])
    vals = total(probes)
    c = vals[0]
    A = (vals[1:] - c).T
    rng = np.random.default_rng(_AFFINITY_RNG_SEED)
    pts = rng.uniform(-2.0, 2.0, size=(check_points, 3))
    diff = total(pts) - (pts @ A.T + c)
    scale = 1.0 + float(np.max(np.abs(A))) + float(np.max(np.abs(c)))
    residual = float(np.max(np.abs(diff))) if check_points else 0.0
    if residual > 1e-9 * scale:
        raise ConventionError(f"quadratic parts of Y_b and Z_K do not cancel (residual {residual:.3e})")
    return FieldDecomposition(kind, X, Y, Z, A, c, b, AlgebraElement(kind, V), kraus, hbar, residual)


# ---------------------------------------------------------------------------
# Matrix-arithmetic oracle
# ---------------------------------------------------------------------------


def _state_matrix(kind: AlgebraKind, coords: np.ndarray, hbar: float) -> np.ndarray:
    basis = basis_matrices(kind, hbar)
    if kind is AlgebraKind.QBIT:
        x = np.concatenate([[1.0], coords])
        return 0.5 * np.tensordot(x, basis, axes=1)
    y = np.concatenate([[2.0], coords])
    return np.tensordot(y * metric(kind), basis, axes=1) / (2.0 * hbar)


def oracle_velocity(h: HamiltonianSpec, d: DissipatorSet, p, hbar: float | None = None) -> np.ndarray:
    """Coordinate velocity of the GKLS generator by explicit 2x2 arithmetic.

    Raises :class:`TracePreservationError` if Tr L(xi) is not zero to 1e-12
    (relative to the size of the generator).
    """
    hbar = resolve_hbar(hbar if hbar is not None else d.hbar)
    if h.kind is not d.kind:
        raise KindMismatchError("Hamiltonian and dissipators belong to different algebras")
    kind = h.kind
    coords = _coords(p)
    basis = basis_matrices(kind, hbar)
    xi = _state_matrix(kind, coords, hbar)
    Hm = np.tensordot(h.H.astype(complex), basis, axes=1)
    out = -(1j / hbar) * (Hm @ xi - xi @ Hm)
    Vm = np.zeros((2, 2), dtype=complex)
    jump = np.zeros((2, 2), dtype=complex)
    for v in d.vs:
        vm = element_matrix(v, hbar)
        vd = vm.conj().T
        Vm += vd @ vm
        jump += vm @ xi @ vd
    out = out - 0.5 * (Vm @ xi + xi @ Vm) + jump
    if kind is AlgebraKind.QBIT:
        vel = np.einsum("kij,ji->k", basis, out)
    else:
        vel = (4.0 / hbar) * np.einsum("kij,ji->k", basis, out)
    scale = 1.0 + float(np.max(np.abs(Hm))) / hbar + float(np.max(np.abs(Vm)))
    scale *= 1.0 + float(np.max(np.abs(coords)))
    if abs(vel[0]) > 1e-12 * scale:
        raise TracePreservationError(f"trace not preserved: {abs(vel[0]):.3e}")
    if float(np.max(np.abs(vel[1:].imag))) > 1e-9 * scale:
        raise ValueError("oracle velocity is not real; the dissipators do not preserve the state manifold")
    return vel[1:].real.copy()


def oracle_trace_velocity(h: HamiltonianSpec, d: DissipatorSet, p, hbar: float | None = None) -> complex:
    """The identity-component pairing of L(xi); zero for any generator."""
    hbar = resolve_hbar(hbar if hbar is not None else d.hbar)
    coords = _coords(p)
    basis = basis_matrices(h.kind, hbar)
    xi = _state_matrix(h.kind, coords, hbar)
    Hm = np.tensordot(h.H.astype(complex), basis, axes=1)
    out = -(1j / hbar) * (Hm @ xi - xi @ Hm)
    for v in d.vs:
        vm = element_matrix(v, hbar)
        vd = vm.conj().T
        out += vm @ xi @ vd - 0.5 * (vd @ vm @ xi + xi @ vd @ vm)
    return complex(np.trace(out))


__all__.append("oracle_trace_velocity")


def random_dissipator(kind, rng: np.random.Generator, scale: float = 1.0, hbar: float | None = None) -> AlgebraElement:
    """A random jump operator that induces a real field.

    q-bit: any complex combination of the Pauli matrices.  Gaussian: a
    complex combination of (L^0, L^1) or of (L^2, L^3), picked at random;
    mixed combinations produce complex Kraus coefficients.
    """
    kind = AlgebraKind.parse(kind)
    z = scale * (rng.normal(size=4) + 1j * rng.normal(size=4))
    if kind is AlgebraKind.GAUSSIAN:
        hbar = resolve_hbar(hbar)
        z = z / hbar
        if rng.uniform() < 0.5:
            z[2:] = 0.0
        else:
            z[:2] = 0.0
    return AlgebraElement(kind, z)


# ---------------------------------------------------------------------------
# Chart dynamics
# ---------------------------------------------------------------------------


def riccati_rhs(h: HamiltonianSpec, cv, hbar: float | None = None) -> complex:
    """Chart velocity of the leaf Hamiltonian flow.

    q-bit, north chart: zdot = (i/(r hbar)) [(H1 + i H2) z^2 - 2 H3 z - (H1 - i H2)].
    Gaussian, Siegel chart: Cdot = -(1/r) [H1 C^2 + 2 V C + H2] with the
    quadratic-form coefficients of :func:`quadratic_form_coefficients`.
    """
    hbar = resolve_hbar(hbar)
    if h.kind is AlgebraKind.QBIT:
        if not isinstance(cv, StereoNorth):
            raise ValueError("q-bit Riccati dynamics is written in the north stereographic chart")
        if cv.r <= 0.0:
            raise ChartSingularityError("r must be positive")
        _, H1, H2, H3 = h.H
        z = complex(cv.z)
        return (1j / (cv.r * hbar)) * (complex(H1, H2) * z * z - 2.0 * H3 * z - complex(H1, -H2))
    if not isinstance(cv, Siegel):
        raise ValueError("Gaussian Riccati dynamics is written in the Siegel chart")
    H1, V, H2 = quadratic_form_coefficients(h)
    C = complex(cv.C)
    return -(H1 * C * C + 2.0 * V * C + H2) / cv.r


def riccati_gradient_rhs(h: HamiltonianSpec, cv, hbar: float | None = None) -> complex:
    """Chart component of the gradient field Y_H = J(X_H), equal to -i times :func:`riccati_rhs`."""
    return -1j * riccati_rhs(h, cv, hbar)


# ---------------------------------------------------------------------------
# Brackets on a leaf
# ---------------------------------------------------------------------------


def expectation(kind, a, coords, hbar: float | None = None):
    """f_a = Tr(rho a): a_0 + a.x (q-bit) or (hbar/2) a_0 + (hbar/4) a.y (Gaussian)."""
    kind = AlgebraKind.parse(kind)
    a = np.asarray(a)
    x = np.asarray(coords, dtype=float)
    if kind is AlgebraKind.QBIT:
        return a[0] + x @ a[1:]
    hbar = resolve_hbar(hbar)
    return 0.5 * hbar * a[0] + 0.25 * hbar * (x @ a[1:])


@dataclass(frozen=True)
class BracketValues:
    """Algebraic side of the leaf bracket identities and the chart residuals."""

    poisson: float
    jordan: float
    poisson_residual: float
    jordan_residual: float

    def __iter__(self):
        return iter((self.poisson, self.jordan))


def _wirtinger(f: Callable[[complex], float], w: complex) -> tuple[complex, complex]:
    """(df/dw, df/dwbar) by central differences."""
    step = 1e-6 * max(1.0, abs(w))
    fx = (f(w + step) - f(w - step)) / (2 * step)
    fy = (f(w + 1j * step) - f(w - 1j * step)) / (2 * step)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def leaf_brackets(kind, a, b, p, hbar: float | None = None) -> BracketValues:
    """Poisson and Jordan brackets of f_a, f_b on the leaf through ``p``.

    The returned values are the algebraic sides:

    * q-bit: {f_a, f_b} = -(1/r) f_[[a,b]],
      (f_a, f_b) = -f_{a.b} + (2/(hbar r^2)) f_a f_b;
    * Gaussian: {f_a, f_b} = (1/r) f_[[a,b]],
      (f_a, f_b) = (1/2) f_{a.b} - (4/(hbar r^2)) f_a f_b.

    The Jordan identities hold for the traceless parts of a and b, which is
    what is used here (the chart side only sees the traceless part).  The
    chart side is evaluated from the leaf bivectors with finite-difference
    differentials; the differences are reported as residuals.
    """
    kind = AlgebraKind.parse(kind)
    hbar = resolve_hbar(hbar)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not isinstance(p, StatePoint):
        p = StatePoint(kind, p)
    r = purity_r(p)
    a0 = np.concatenate([[0.0], a[1:]])
    b0 = np.concatenate([[0.0], b[1:]])
    ea = AlgebraElement(kind, a0)
    eb = AlgebraElement(kind, b0)
    fa = float(expectation(kind, a0, p.coords, hbar))
    fb = float(expectation(kind, b0, p.coords, hbar))
    f_lie = float(expectation(kind, lie_product(ea, eb, hbar).coeffs.real, p.coords, hbar))
    f_jor = float(expectation(kind, jordan_product(ea, eb, hbar).coeffs.real, p.coords, hbar))

    if kind is AlgebraKind.QBIT:
        if r == 0.0:
            raise ChartSingularityError("brackets on the singular leaf r = 0 are undefined")
        chart = Chart.NORTH if p.coords[2] <= 0.0 else Chart.SOUTH
        cv = to_chart(p, chart)
        w = complex(cv.z if chart is Chart.NORTH else cv.zeta)
        make = (lambda u: StereoNorth(u, r)) if chart is Chart.NORTH else (lambda u: StereoSouth(u, r))

        def f_of(coef):
            return lambda u: float(expectation(kind, coef, from_chart(make(u)).coords, hbar))

        da, dab = _wirtinger(f_of(a0), w)
        db, dbb = _wirtinger(f_of(b0), w)
        n = (1.0 + abs(w) ** 2) ** 2
        # Contraction in the argument order of the footnoted convention {f, g} = Lambda(dg, df).
        poisson_chart = (-1j / (r * r * hbar)) * n * (dbb * da - db * dab)
        jordan_chart = -(1.0 / (r * r * hbar)) * n * (dab * db + da * dbb)
        poisson = -f_lie / r
        jordan = -f_jor + (2.0 / (hbar * r * r)) * fa * fb
    else:
        cv = to_chart(p, Chart.SIEGEL)
        w = complex(cv.C)

        def f_of(coef):
            return lambda u: float(expectation(kind, coef, from_chart(Siegel(u, r)).coords, hbar))

        da, dab = _wirtinger(f_of(a0), w)
        db, dbb = _wirtinger(f_of(b0), w)
        pref = (2.0 / hbar) * (w - w.conjugate()) ** 2 / (r * r)
        poisson_chart = 1j * pref * (dab * db - da * dbb)
        jordan_chart = pref * (dab * db + da * dbb)
        poisson = f_lie / r
        jordan = 0.5 * f_jor - (4.0 / (hbar * r * r)) * fa * fb
    return BracketValues(
        poisson=poisson,
        jordan=jordan,
        poisson_residual=abs(complex(poisson_chart) - poisson),
        jordan_residual=abs(complex(jordan_chart) - jordan),
    )


# ---------------------------------------------------------------------------
# Purity / Casimir transport
# ---------------------------------------------------------------------------


def casimir(p, hbar: float | None = None) -> float:
    """Casimir function (hbar^2/4)(y1^2 - y2^2 - y3^2) of a Gaussian point.

    The normalization is chosen so that its derivative along Y_b equals
    (hbar^2/2)(1 - r^2) b.y.
    """
    hbar = resolve_hbar(hbar)
    y = _coords(p)
    return 0.25 * hbar**2 * (y[..., 0] ** 2 - y[..., 1] ** 2 - y[..., 2] ** 2)


def lie_derivative_purity(fld, p: StatePoint, hbar: float | None = None) -> float:
    """Derivative of r (q-bit) or of the Casimir (Gaussian) along ``fld`` at ``p``."""
    hbar = resolve_hbar(hbar)
    x = p.coords
    F = np.asarray(fld(p), dtype=float)
    if p.kind is AlgebraKind.QBIT:
        r = math.sqrt(float(x @ x))
        if r == 0.0:
            raise ChartSingularityError("the purity r is not differentiable at the origin")
        return float(x @ F) / r
    return 0.5 * hbar**2 * float(x[0] * F[0] - x[1] * F[1] - x[2] * F[2])
