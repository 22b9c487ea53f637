"""GKLS dynamics of q-bits and single-mode Gaussian states as affine flows.

Submodules
----------
algebra      2x2 matrix realizations, Lie and Jordan products.
state_space  Bloch ball, solid hyperboloid, charts, moments, Wigner functions.
dynamics     X_H, Y_b, Z_K, the affine GKLS field and the matrix oracle.
integrator   RK4 and exact affine integration with invariant monitoring.
scenarios    The four worked damping examples.
cli          Command line front end (``gkls``).
"""
from .algebra import AlgebraElement, AlgebraKind
from .config import get_hbar, hbar_scope, set_hbar
from .dynamics import DissipatorSet, HamiltonianSpec, gkls_field, oracle_velocity
from .state_space import SecondMoments, StatePoint

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "AlgebraKind",
    "DissipatorSet",
    "HamiltonianSpec",
    "SecondMoments",
    "StatePoint",
    "get_hbar",
    "gkls_field",
    "hbar_scope",
    "oracle_velocity",
    "set_hbar",
]
