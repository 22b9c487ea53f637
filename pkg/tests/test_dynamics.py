import math

import numpy as np
import pytest

from gkls.algebra import AlgebraElement, AlgebraKind
from gkls.dynamics import (
    DissipatorSet,
    HamiltonianSpec,
    casimir,
    choi_kraus_field,
    expectation,
    gkls_field,
    gradient_like_field,
    hamiltonian_field,
    hamiltonian_from_quadratic,
    kraus_matrix,
    leaf_brackets,
    leaf_hamiltonian_field,
    lie_derivative_purity,
    oracle_trace_velocity,
    oracle_velocity,
    quadratic_form_coefficients,
    random_dissipator,
    riccati_gradient_rhs,
    riccati_rhs,
)
from gkls.scenarios import build_scenario, k_plus, sigma_plus
from gkls.state_space import (
    ChartSingularityError,
    Siegel,
    StatePoint,
    StereoNorth,
    from_chart,
    purity_r,
    random_physical_point,
    to_chart,
)

Q, G = AlgebraKind.QBIT, AlgebraKind.GAUSSIAN
ZERO_H = {k: HamiltonianSpec(k, np.zeros(4)) for k in (Q, G)}
EMPTY = {k: DissipatorSet(k, ()) for k in (Q, G)}


def random_system(kind, rng, hbar=1.0):
    h = HamiltonianSpec(kind, rng.normal(size=4))
    vs = tuple(random_dissipator(kind, rng, 0.7, hbar) for _ in range(rng.integers(1, 4)))
    return h, DissipatorSet(kind, vs, hbar)


class TestHamiltonianField:
    def test_qbit_rotation(self):
        h = HamiltonianSpec(Q, [0, 0, 0, 1.0])
        assert np.allclose(hamiltonian_field(h, 1.0)(StatePoint(Q, [1, 0, 0])), [0, 2, 0], atol=1e-15)

    def test_gaussian_oscillator(self):
        h = HamiltonianSpec(G, [0, 2.0, 0, 0])
        assert np.allclose(hamiltonian_field(h, 1.0)(StatePoint(G, [0, 0, 1])), [0, 2, 0], atol=1e-15)
        x = np.array([1.4, 0.3, -0.7])
        assert np.allclose(hamiltonian_field(h, 1.0)(x), [0, 2 * x[2], -2 * x[1]])

    def test_zero_and_h0_independence(self):
        for k in (Q, G):
            assert np.all(hamiltonian_field(ZERO_H[k])(np.ones(3)) == 0)
            a = hamiltonian_field(HamiltonianSpec(k, [0, 1, 2, 3]))(np.array([0.1, 0.2, 0.3]))
            b = hamiltonian_field(HamiltonianSpec(k, [5, 1, 2, 3]))(np.array([0.1, 0.2, 0.3]))
            assert np.array_equal(a, b)

    def test_quadratic_form_round_trip(self):
        h = hamiltonian_from_quadratic(1.5, -0.25, 0.5)
        assert np.allclose(quadratic_form_coefficients(h), (1.5, -0.25, 0.5))


class TestGradientLikeField:
    def test_zero_b(self):
        for k in (Q, G):
            assert np.all(gradient_like_field(k, np.zeros(4))(np.array([0.3, 0.1, 0.2])) == 0)

    def test_qbit_boundary_tangency_example(self):
        assert np.allclose(gradient_like_field(Q, [0, 0.8, 0, 0])(StatePoint(Q, [1, 0, 0])), 0, atol=0)

    def test_gaussian_example(self):
        for hbar, gamma in ((1.0, 1.0), (0.5, 2.0)):
            V = np.array([gamma / hbar, -gamma / hbar, 0, 0])
            Y = gradient_like_field(G, V, hbar)
            y = np.array([1.7, 0.4, -0.9])
            expected = (gamma / hbar) * np.array([y[0] ** 2 - 1, y[0] * y[1], y[0] * y[2]])
            assert np.allclose(Y(y), expected, atol=1e-14)

    def test_rejects_complex_b(self):
        with pytest.raises(ValueError):
            gradient_like_field(Q, [0, 1j, 0, 0])


class TestKraus:
    def test_dephasing_jump_contribution(self):
        gamma = 0.8
        d = DissipatorSet(Q, (AlgebraElement(Q, [0, 0, 0, math.sqrt(gamma / 2)]),))
        K = kraus_matrix(d).K
        x = np.array([0.3, -0.5, 0.6])
        jump = 0.5 * (K[1:, 1:].T @ x + K[0, 1:])
        assert np.allclose(jump, gamma * np.array([0, 0, x[2]]) - 0.5 * gamma * x, atol=1e-15)

    def test_raising_jump_contribution(self):
        gamma = 1.3
        K = kraus_matrix(DissipatorSet(Q, (math.sqrt(2 * gamma) * sigma_plus(),))).K
        x = np.array([0.3, -0.5, 0.6])
        jump = 0.5 * (K[1:, 1:].T @ x + K[0, 1:])
        assert np.allclose(jump, [0, 0, gamma * (1 - x[2])], atol=1e-15)

    def test_non_physical_gaussian_dissipator(self):
        with pytest.raises(ValueError):
            kraus_matrix(DissipatorSet(G, (AlgebraElement(G, [0, 1.0, 1.0, 0]),)))


class TestChoiKrausField:
    def test_qbit_dephasing_example(self):
        d = DissipatorSet(Q, (AlgebraElement(Q, [0, 0, 0, math.sqrt(0.5)]),))
        assert np.allclose(choi_kraus_field(d)(np.array([1.0, 1.0, 0.0])), [-1, -1, 0], atol=1e-15)

    def test_osc_l1(self):
        for hbar, gamma in ((1.0, 1.0), (0.6, 2.5)):
            d = DissipatorSet(G, (AlgebraElement(G, [0, math.sqrt(gamma) / hbar, 0, 0]),), hbar)
            y = np.array([1.9, 0.5, -0.8])
            assert np.allclose(choi_kraus_field(d)(y), -0.5 * gamma * np.array([0, y[1], y[2]]), atol=1e-14)

    def test_osc_kplus(self):
        for hbar, gamma in ((1.0, 1.0), (0.6, 2.5)):
            d = DissipatorSet(G, (math.sqrt(gamma) * k_plus(hbar),), hbar)
            Z = choi_kraus_field(d)
            assert np.allclose(Z(np.array([1.0, 0, 0])), [gamma, 0, 0], atol=1e-14)
            y1, y2, y3 = 1.9, 0.5, -0.8
            expected = gamma * np.array([y1 * y1 - y1 + 1, y1 * y2 - y2 / 2, y1 * y3 - y3 / 2])
            assert np.allclose(Z(np.array([y1, y2, y3])), expected, atol=1e-13)

    def test_empty(self):
        for k in (Q, G):
            assert np.all(choi_kraus_field(EMPTY[k])(np.array([0.2, 0.1, 0.3])) == 0)


class TestGklsField:
    def test_dephasing_example(self):
        s = build_scenario("qbit_dephasing", 2.0, 1.0)
        fd = gkls_field(s.h, s.d)
        x = np.array([0.3, -0.4, 0.5])
        assert np.allclose(fd(x), [-2 * x[1] - x[0], 2 * x[0] - x[1], 0], atol=1e-15)
        assert np.allclose(fd(StatePoint(Q, [1, 0, 0])), [-1, 2, 0], atol=1e-15)

    def test_fixed_point_examples(self):
        s = build_scenario("qbit_raising", 2.0, 1.0)
        assert np.allclose(gkls_field(s.h, s.d)(StatePoint(Q, [0, 0, 1])), 0, atol=1e-15)
        s = build_scenario("osc_Kplus", gamma=1.0)
        assert np.allclose(gkls_field(s.h, s.d)(StatePoint(G, [2, 0, 0])), 0, atol=1e-15)

    def test_parts_sum_to_gamma(self):
        rng = np.random.default_rng(10)
        for k in (Q, G):
            h, d = random_system(k, rng)
            fd = gkls_field(h, d)
            x = rng.uniform(-2, 2, size=(50, 3))
            assert np.allclose(fd.gamma_sum(x), fd(x), atol=1e-10)

    def test_kind_mismatch(self):
        with pytest.raises(ValueError):
            gkls_field(ZERO_H[Q], EMPTY[G])


class TestOracle:
    def test_examples(self):
        s = build_scenario("qbit_dephasing", 2.0, 1.0)
        assert np.allclose(oracle_velocity(s.h, s.d, StatePoint(Q, [1, 0, 0])), [-1, 2, 0], atol=1e-15)
        assert np.all(oracle_velocity(ZERO_H[Q], EMPTY[Q], StatePoint(Q, [0.1, 0, 0])) == 0)
        s = build_scenario("osc_Kplus")
        assert np.allclose(oracle_velocity(s.h, s.d, StatePoint(G, [2, 0, 0])), 0, atol=1e-14)

    @pytest.mark.parametrize("kind", [Q, G])
    @pytest.mark.parametrize("hbar", [1.0, 0.45, 1.8])
    def test_agrees_with_gkls_field(self, kind, hbar):
        rng = np.random.default_rng(12)
        for _ in range(100):
            h, d = random_system(kind, rng, hbar)
            fd = gkls_field(h, d, hbar)
            p = random_physical_point(kind, rng)
            o = oracle_velocity(h, d, p, hbar)
            assert np.allclose(fd(p), o, rtol=0, atol=1e-9 * (1 + np.max(np.abs(o))))
            assert abs(oracle_trace_velocity(h, d, p, hbar)) < 1e-12 * (1 + np.max(np.abs(o)))


class TestRiccati:
    def test_examples(self):
        h = hamiltonian_from_quadratic(1.0, 0.0, 1.0)
        assert riccati_rhs(h, Siegel(1j, 1.0)) == 0
        assert riccati_rhs(HamiltonianSpec(Q, [0, 0, 0, 1.0]), StereoNorth(1.0, 1.0), 1.0) == -2j
        assert riccati_rhs(ZERO_H[Q], StereoNorth(0.3 + 0.2j, 0.5)) == 0

    def test_wrong_chart(self):
        with pytest.raises(ValueError):
            riccati_rhs(ZERO_H[Q], Siegel(1j, 1.0))
        with pytest.raises(ValueError):
            riccati_rhs(ZERO_H[G], StereoNorth(0.1, 1.0))

    @staticmethod
    def _pushforward(fld, to_w, point, eps=1e-6):
        F = fld(point)
        x = point.coords
        return (to_w(StatePoint(point.kind, x + eps * F)) - to_w(StatePoint(point.kind, x - eps * F))) / (2 * eps)

    @pytest.mark.parametrize("hbar", [1.0, 0.7])
    def test_qbit_matches_pushforward(self, hbar):
        rng = np.random.default_rng(13)
        for _ in range(100):
            h = HamiltonianSpec(Q, rng.normal(size=4))
            z = complex(*rng.uniform(-1.5, 1.5, size=2))
            p = from_chart(StereoNorth(z, rng.uniform(0.2, 1.0)))
            fd = self._pushforward(leaf_hamiltonian_field(h, hbar), lambda q: to_chart(q, "north").z, p)
            assert abs(fd - riccati_rhs(h, to_chart(p, "north"), hbar)) < 1e-6

    def test_gaussian_matches_pushforward(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            h = HamiltonianSpec(G, rng.normal(size=4))
            p = random_physical_point(G, rng)
            fd = self._pushforward(leaf_hamiltonian_field(h), lambda q: to_chart(q, "siegel").C, p)
            assert abs(fd - riccati_rhs(h, to_chart(p, "siegel"))) < 1e-6

    def test_gradient_is_minus_i(self):
        h = HamiltonianSpec(Q, [0, 0.3, -1.0, 0.2])
        cv = StereoNorth(0.4 + 0.1j, 0.9)
        assert riccati_gradient_rhs(h, cv) == -1j * riccati_rhs(h, cv)


class TestBrackets:
    def test_antisymmetry(self):
        a = np.array([0, 0.3, -0.2, 0.9])
        assert leaf_brackets(Q, a, a, StatePoint(Q, [0.2, 0.3, -0.1])).poisson == 0

    def test_qbit_example(self):
        for hbar in (1.0, 0.5):
            bv = leaf_brackets(Q, [0, 1, 0, 0], [0, 0, 1, 0], StatePoint(Q, [0, 0, 1]), hbar)
            assert bv.poisson == pytest.approx(2.0 / hbar)
            assert bv.poisson_residual < 1e-6

    def test_gaussian_example(self):
        p = StatePoint(G, [2.5, 0.4, -1.1])
        r = purity_r(p)
        poisson, _ = leaf_brackets(G, [0, 1, 0, 0], [0, 0, 1, 0], p)
        assert poisson == pytest.approx(expectation(G, [0, 0, 0, 1], p.coords) / r)

    @pytest.mark.parametrize("kind", [Q, G])
    def test_chart_side_agrees(self, kind):
        rng = np.random.default_rng(15)
        for _ in range(50):
            p = random_physical_point(kind, rng)
            if kind is Q and purity_r(p) < 0.2:
                continue
            bv = leaf_brackets(kind, rng.normal(size=4), rng.normal(size=4), p)
            assert bv.poisson_residual < 1e-6 * (1 + abs(bv.poisson))
            assert bv.jordan_residual < 1e-6 * (1 + abs(bv.jordan))

    def test_singular_leaf(self):
        with pytest.raises(ChartSingularityError):
            leaf_brackets(Q, [0, 1, 0, 0], [0, 0, 1, 0], StatePoint(Q, [0, 0, 0]))


class TestPurityTransport:
    def test_hamiltonian_conserves(self):
        rng = np.random.default_rng(16)
        for kind in (Q, G):
            for _ in range(200):
                h = HamiltonianSpec(kind, rng.normal(size=4))
                p = random_physical_point(kind, rng)
                assert abs(lie_derivative_purity(hamiltonian_field(h), p)) < 1e-12 * (1 + np.sum(p.coords**2))

    def test_qbit_closed_form(self):
        rng = np.random.default_rng(17)
        for hbar in (1.0, 0.3):
            for _ in range(100):
                b = rng.normal(size=4)
                p = random_physical_point(Q, rng)
                r = purity_r(p)
                if r < 1e-3:
                    continue
                got = lie_derivative_purity(gradient_like_field(Q, b, hbar), p, hbar)
                assert got == pytest.approx((2 / (hbar * r)) * (1 - r * r) * (b[1:] @ p.coords), abs=1e-12 / r)

    def test_gaussian_closed_form_and_example(self):
        for hbar in (1.0, 0.3):
            Y = gradient_like_field(G, [0, 1, 0, 0], hbar)
            assert lie_derivative_purity(Y, StatePoint(G, [2, 0, 0]), hbar) == pytest.approx(-3 * hbar**2, abs=1e-14)
        rng = np.random.default_rng(18)
        for _ in range(100):
            b = rng.normal(size=4)
            p = random_physical_point(G, rng)
            r = purity_r(p)
            got = lie_derivative_purity(gradient_like_field(G, b), p)
            expected = 0.5 * (1 - r * r) * (b[1:] @ p.coords)
            assert got == pytest.approx(expected, abs=1e-12 * (1 + abs(expected)))

    def test_boundary_tangency(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            u = rng.normal(size=3)
            p = StatePoint(Q, u / np.linalg.norm(u))
            assert abs(lie_derivative_purity(gradient_like_field(Q, rng.normal(size=4)), p)) < 1e-12
            tau, phi = rng.uniform(0, 1.5), rng.uniform(0, 6.28)
            g = StatePoint(G, [math.cosh(tau), math.sinh(tau) * math.cos(phi), math.sinh(tau) * math.sin(phi)])
            assert abs(lie_derivative_purity(gradient_like_field(G, rng.normal(size=4)), g)) < 1e-12 * math.cosh(tau) ** 2

    def test_casimir_normalization(self):
        assert casimir(StatePoint(G, [2, 0, 0]), 1.0) == 1.0
        assert casimir(StatePoint(G, [1, 0, 0]), 2.0) == 1.0

    def test_origin_singular(self):
        with pytest.raises(ChartSingularityError):
            lie_derivative_purity(hamiltonian_field(ZERO_H[Q]), StatePoint(Q, [0, 0, 0]))
