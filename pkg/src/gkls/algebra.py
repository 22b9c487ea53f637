"""Four-dimensional operator algebras realized by 2x2 complex matrices.

Two bases are supported:

* ``AlgebraKind.QBIT``: the Pauli basis sigma^0..sigma^3 (sigma^0 = identity).
* ``AlgebraKind.GAUSSIAN``: the non-unitary realization L^0..L^3 of the
  quadratic operators (p^2, qp + pq, q^2 combinations), scaled by hbar.

Products are evaluated on matrices and projected back onto the basis.  The
tabulated structure constants are kept as an independent cross-check.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import resolve_hbar

__all__ = [
    "AlgebraKind",
    "AlgebraElement",
    "StructureConstants",
    "KindMismatchError",
    "basis_matrices",
    "metric",
    "element",
    "element_matrix",
    "project_to_basis",
    "lie_product",
    "jordan_product",
    "dagger",
    "trace_pair",
    "is_observable",
    "structure_constants",
    "contract",
]


class AlgebraKind(enum.Enum):
    """Which of the two 2x2 bases an element is expanded in."""

    QBIT = "qbit"
    GAUSSIAN = "gaussian"

    @classmethod
    def parse(cls, value) -> "AlgebraKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown algebra kind {value!r}") from None


class KindMismatchError(ValueError):
    """Raised when two elements of different algebras are combined."""


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Complex coefficient vector a_mu over the basis of ``kind``.

    The represented operator is sum_mu a_mu e^mu.  Coefficients are stored as
    a read-only complex array of length 4.
    """

    kind: AlgebraKind
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.shape != (4,):
            raise ValueError(f"expected 4 coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "kind", AlgebraKind.parse(self.kind))
        object.__setattr__(self, "coeffs", c)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_kinds(self, other)
        return AlgebraElement(self.kind, self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_kinds(self, other)
        return AlgebraElement(self.kind, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(self.kind, self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.kind, -self.coeffs)

    def allclose(self, other: "AlgebraElement", atol: float = 1e-12) -> bool:
        """Coefficient-wise comparison with an absolute tolerance."""
        return self.kind is other.kind and bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"AlgebraElement({self.kind.value}, {np.array2string(self.coeffs, precision=6)})"


def element(kind, coeffs) -> AlgebraElement:
    """Shorthand constructor."""
    return AlgebraElement(AlgebraKind.parse(kind), coeffs)


def _check_kinds(a: AlgebraElement, b: AlgebraElement) -> None:
    if a.kind is not b.kind:
        raise KindMismatchError(f"kind mismatch: {a.kind.value} vs {b.kind.value}")


@lru_cache(maxsize=64)
def _basis(kind: AlgebraKind, hbar: float) -> np.ndarray:
    if kind is AlgebraKind.QBIT:
        m = np.array(
            [
                [[1, 0], [0, 1]],
                [[0, 1], [1, 0]],
                [[0, -1j], [1j, 0]],
                [[1, 0], [0, -1]],
            ],
            dtype=complex,
        )
    else:
        h2 = 0.5 * hbar
        m = np.array(
            [
                [[h2, 0], [0, h2]],
                [[0, 1j * h2], [-1j * h2, 0]],
                [[1j * h2, 0], [0, -1j * h2]],
                [[0, 1j * h2], [1j * h2, 0]],
            ],
            dtype=complex,
        )
    m.setflags(write=False)
    return m


def basis_matrices(kind, hbar: float | None = None) -> np.ndarray:
    """Return the four basis matrices as an array of shape (4, 2, 2).

    The Gaussian basis carries the factor hbar/2 (L^0 = (hbar/2) I); the
    Pauli basis is hbar independent.
    """
    return _basis(AlgebraKind.parse(kind), resolve_hbar(hbar))


def metric(kind) -> np.ndarray:
    """Diagonal of the metric g: all ones for q-bits, (1, 1, -1, -1) otherwise."""
    if AlgebraKind.parse(kind) is AlgebraKind.QBIT:
        return np.ones(4)
    return np.array([1.0, 1.0, -1.0, -1.0])


def element_matrix(a: AlgebraElement, hbar: float | None = None) -> np.ndarray:
    """The 2x2 matrix sum_mu a_mu e^mu."""
    return np.tensordot(a.coeffs, basis_matrices(a.kind, hbar), axes=1)


def project_to_basis(m, kind, hbar: float | None = None) -> np.ndarray:
    """Coefficients a_mu with sum_mu a_mu e^mu == m.

    Uses trace orthogonality: Tr(s^mu s^nu) = 2 delta for the Pauli basis and
    Tr(L^mu L^nu) = (hbar^2 / 2) g^{mu nu} for the Gaussian basis.  Accepts a
    stack of matrices with shape (..., 2, 2).
    """
    kind = AlgebraKind.parse(kind)
    hbar = resolve_hbar(hbar)
    m = np.asarray(m, dtype=complex)
    basis = basis_matrices(kind, hbar)
    tr = np.einsum("...ij,mji->...m", m, basis)
    if kind is AlgebraKind.QBIT:
        return 0.5 * tr
    return (2.0 / hbar**2) * metric(kind) * tr


def _from_matrix(m, kind, hbar) -> AlgebraElement:
    return AlgebraElement(kind, project_to_basis(m, kind, hbar))


def lie_product(a: AlgebraElement, b: AlgebraElement, hbar: float | None = None) -> AlgebraElement:
    """[[a, b]] = (i/hbar)(ab - ba), projected onto the basis."""
    _check_kinds(a, b)
    hbar = resolve_hbar(hbar)
    ma, mb = element_matrix(a, hbar), element_matrix(b, hbar)
    return _from_matrix((1j / hbar) * (ma @ mb - mb @ ma), a.kind, hbar)


def jordan_product(a: AlgebraElement, b: AlgebraElement, hbar: float | None = None) -> AlgebraElement:
    """a (.) b = (1/hbar)(ab + ba), projected onto the basis."""
    _check_kinds(a, b)
    hbar = resolve_hbar(hbar)
    ma, mb = element_matrix(a, hbar), element_matrix(b, hbar)
    return _from_matrix((ma @ mb + mb @ ma) / hbar, a.kind, hbar)


def dagger(a: AlgebraElement, hbar: float | None = None) -> AlgebraElement:
    """Matrix-level conjugate transpose, projected back to coefficients.

    For the Pauli basis this conjugates the coefficients.  The Gaussian basis
    is anti-Hermitian in L^1..L^3, so the map on coefficients is different.
    """
    hbar = resolve_hbar(hbar)
    m = element_matrix(a, hbar)
    return _from_matrix(m.conj().T, a.kind, hbar)


def is_observable(a: AlgebraElement, tol: float = 1e-12, hbar: float | None = None) -> bool:
    """True iff ``a`` represents a self-adjoint operator.

    For q-bits this is dagger(a) == a.  The Gaussian matrices L^2, L^3 are
    anti-Hermitian as 2x2 matrices although the quadratic operators they
    realize are self-adjoint, so there the test is that all coefficients
    are real.
    """
    if a.kind is AlgebraKind.QBIT:
        return dagger(a, hbar).allclose(a, atol=tol)
    return bool(np.all(np.abs(a.coeffs.imag) <= tol))


def trace_pair(a: AlgebraElement, b: AlgebraElement, hbar: float | None = None) -> complex:
    """Tr(ab) without conjugation (the pairing used for state coordinates)."""
    _check_kinds(a, b)
    hbar = resolve_hbar(hbar)
    return complex(np.trace(element_matrix(a, hbar) @ element_matrix(b, hbar)))


@dataclass(frozen=True)
class StructureConstants:
    """Tabulated c^{mu nu}_sigma (Lie) and d^{mu nu}_sigma (Jordan)."""

    c: np.ndarray
    d: np.ndarray


_LEVI = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI[_i, _j, _k] = 1.0
    _LEVI[_j, _i, _k] = -1.0


def structure_constants(kind, hbar: float | None = None) -> StructureConstants:
    """Structure constants written down from their closed forms.

    These are not derived from the matrices; tests compare the two routes.
    Index order is ``[mu, nu, sigma]`` with ``sigma`` the output component.
    """
    kind = AlgebraKind.parse(kind)
    hbar = resolve_hbar(hbar)
    c = np.zeros((4, 4, 4))
    d = np.zeros((4, 4, 4))
    if kind is AlgebraKind.QBIT:
        c[1:, 1:, 1:] = -(2.0 / hbar) * _LEVI
        for mu in range(4):
            d[mu, mu, 0] = 2.0 / hbar
            d[mu, 0, mu] = 2.0 / hbar
            d[0, mu, mu] = 2.0 / hbar
    else:
        c[1, 2, 3], c[2, 1, 3] = 1.0, -1.0
        c[2, 3, 1], c[3, 2, 1] = -1.0, 1.0
        c[1, 3, 2], c[3, 1, 2] = -1.0, 1.0
        g = metric(kind)
        for mu in range(4):
            d[mu, mu, 0] = g[mu]
            d[mu, 0, mu] = 1.0
            d[0, mu, mu] = 1.0
    c.setflags(write=False)
    d.setflags(write=False)
    return StructureConstants(c, d)


def contract(table: np.ndarray, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """sum_{mu nu} table[mu, nu, sigma] a_mu b_nu."""
    _check_kinds(a, b)
    return AlgebraElement(a.kind, np.einsum("mns,m,n->s", table, a.coeffs, b.coeffs))
