import numpy as np
import pytest

from birkhoff import (
    BirkhoffSystem,
    EvaluationError,
    PhasePoint,
    RegularityError,
    SystemKind,
    k_from_f,
    oscillator_system,
    regularity,
    vector_field,
)

NU = 0.5


class TestPhasePoint:
    def test_stores_vector_and_time(self):
        p = PhasePoint([1.0, 2.0], 0.5)
        assert p.n == 1
        assert p.t == 0.5
        np.testing.assert_array_equal(p.z, [1.0, 2.0])

    def test_rejects_odd_length(self):
        with pytest.raises(ValueError):
            PhasePoint([1.0, 2.0, 3.0])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            PhasePoint([])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            PhasePoint([np.nan, 0.0])
        with pytest.raises(ValueError):
            PhasePoint([1.0, 0.0], np.inf)


class TestSystemValidation:
    def test_rejects_nonpositive_n(self):
        with pytest.raises(ValueError):
            BirkhoffSystem(n=0, F=lambda z, t: z, B=lambda z, t: 0.0)

    def test_kind_accepts_strings(self):
        sys1 = BirkhoffSystem(
            n=1, F=lambda z, t: 0.0 * z, B=lambda z, t: 0.0, kind="semi-autonomous"
        )
        assert sys1.kind is SystemKind.SEMI_AUTONOMOUS


class TestKFromF:
    def test_damped_oscillator_at_time_zero(self, osc_system):
        k = k_from_f(osc_system, PhasePoint([1.0, 2.0], 0.0))
        np.testing.assert_allclose(k, [[0.0, -1.0], [1.0, 0.0]], atol=1e-8)

    def test_zero_functions_give_zero_matrix(self):
        sys1 = BirkhoffSystem(n=1, F=lambda z, t: np.zeros(2), B=lambda z, t: 0.0)
        k = k_from_f(sys1, PhasePoint([0.3, -0.7]))
        np.testing.assert_array_equal(k, np.zeros((2, 2)))

    def test_quadratic_component_functions(self):
        # F = (z2^2, 0): dF1/dz2 = 2 z2, so K12 = -2 z2 at z2 = 1
        sys1 = BirkhoffSystem(
            n=1, F=lambda z, t: np.array([z[1] ** 2, 0.0]), B=lambda z, t: 0.0
        )
        k = k_from_f(sys1, PhasePoint([1.0, 1.0]))
        np.testing.assert_allclose(k, [[0.0, -2.0], [2.0, 0.0]], atol=1e-8)

    def test_output_exactly_antisymmetric(self, rng):
        sys1 = BirkhoffSystem(
            n=2,
            F=lambda z, t: np.array(
                [z[1] * z[2], np.sin(z[0]) + t * z[3], z[0] ** 2, np.cos(z[1] * z[2])]
            ),
            B=lambda z, t: 0.0,
        )
        for _ in range(10):
            k = k_from_f(sys1, PhasePoint(rng.uniform(-2, 2, 4), rng.uniform(0, 1)))
            np.testing.assert_array_equal(k.T, -k)

    def test_matches_analytic_structure_matrix(self, osc_system, rng):
        for _ in range(20):
            p = PhasePoint(rng.uniform(-2, 2, 2), rng.uniform(0, 1))
            derived = k_from_f(osc_system, p)
            analytic = osc_system.k_at(p.z, p.t)
            assert np.max(np.abs(derived - analytic)) <= 1e-6

    def test_nonfinite_component_functions_rejected(self):
        sys1 = BirkhoffSystem(
            n=1, F=lambda z, t: np.array([np.nan, 0.0]), B=lambda z, t: 0.0
        )
        with pytest.raises(EvaluationError):
            k_from_f(sys1, PhasePoint([1.0, 0.0]))


class TestRegularity:
    def test_oscillator_at_time_zero(self, osc_system):
        det, regular = regularity(osc_system, PhasePoint([1.0, 0.0], 0.0))
        assert regular
        assert det == pytest.approx(1.0, abs=1e-14)

    def test_determinant_grows_with_the_time_scaling(self, osc_system, rng):
        # det of the scaled canonical pair is the squared scaling factor
        for _ in range(5):
            t = rng.uniform(0, 2)
            det, regular = regularity(osc_system, PhasePoint([0.2, -1.0], t))
            assert regular
            assert det == pytest.approx(np.exp(2 * NU * t), rel=1e-12)

    def test_zero_matrix_not_regular(self):
        sys1 = BirkhoffSystem(
            n=1, F=lambda z, t: np.zeros(2), B=lambda z, t: 0.0, K=lambda z, t: np.zeros((2, 2))
        )
        det, regular = regularity(sys1, PhasePoint([1.0, 1.0]))
        assert det == 0.0
        assert not regular


class TestVectorField:
    def test_reduces_to_damped_oscillator_equations(self, osc_system):
        v = vector_field(osc_system, PhasePoint([1.0, 0.0], 0.0))
        np.testing.assert_allclose(v, [0.0, -1.0], atol=1e-12)

    def test_equilibrium(self, osc_system):
        v = vector_field(osc_system, PhasePoint([0.0, 0.0], 0.7))
        np.testing.assert_allclose(v, [0.0, 0.0], atol=1e-14)

    def test_unit_momentum(self, osc_system):
        v = vector_field(osc_system, PhasePoint([0.0, 1.0], 0.0))
        np.testing.assert_allclose(v, [1.0, -NU], atol=1e-12)

    def test_independent_of_time_for_the_oscillator(self, osc_system, rng):
        # the exponential factors cancel between K^{-1} and the right side
        for _ in range(10):
            z = rng.uniform(-2, 2, 2)
            t1, t2 = rng.uniform(0, 3, 2)
            v1 = vector_field(osc_system, PhasePoint(z, t1))
            v2 = vector_field(osc_system, PhasePoint(z, t2))
            assert np.max(np.abs(v1 - v2)) <= 1e-10

    def test_singular_structure_matrix_raises(self):
        sys1 = BirkhoffSystem(
            n=1,
            F=lambda z, t: np.zeros(2),
            B=lambda z, t: float(z[0]),
            K=lambda z, t: np.zeros((2, 2)),
        )
        with pytest.raises(RegularityError):
            vector_field(sys1, PhasePoint([1.0, 0.0]))

    def test_finite_difference_fallbacks_match_analytic_data(self, rng):
        # same oscillator but with only (F, B, K) given: grad B and dF/dt
        # come from central differences
        full = oscillator_system(NU)
        bare = BirkhoffSystem(n=1, F=full.F, B=full.B, K=full.K, kind=full.kind)
        for _ in range(5):
            p = PhasePoint(rng.uniform(-2, 2, 2), rng.uniform(0, 1))
            np.testing.assert_allclose(
                vector_field(bare, p), vector_field(full, p), atol=1e-7
            )
            np.testing.assert_allclose(bare.d_at(p.z, p.t), full.d_at(p.z, p.t), atol=1e-7)
