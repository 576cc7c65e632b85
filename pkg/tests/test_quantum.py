import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontolab.errors import ConsistencyError, DimensionError
from ontolab.quantum import (
    ALGEBRAIC_BOUND,
    CHSH_ZX_SETTING,
    KET_MINUS,
    KET_ONE,
    KET_PLUS,
    KET_ZERO,
    LOCAL_BOUND,
    PHI_PLUS,
    TSIRELSON_BOUND,
    X_MEASUREMENT,
    Z_MEASUREMENT,
    ChshSetting,
    ProjectiveMeasurement,
    QuantumState,
    bloch_observable,
    bloch_vector,
    born_distribution,
    born_probability,
    chsh_expectation,
    chsh_operator,
    chsh_optimal_value,
    clone_output,
    correlation_matrix,
    ket,
    measurement_from_bloch,
    quantum_overlap,
    schmidt_pair_state,
    state_from_bloch,
)

SQRT2 = math.sqrt(2.0)

unit_vectors = st.builds(
    lambda v: v / np.linalg.norm(v),
    st.tuples(
        st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)
    ).map(np.array).filter(lambda v: np.linalg.norm(v) > 1e-3),
)


class TestStates:
    def test_constants(self):
        assert LOCAL_BOUND == 2.0
        assert TSIRELSON_BOUND == pytest.approx(2 * SQRT2, abs=1e-15)
        assert ALGEBRAIC_BOUND == 4.0

    def test_normalization_enforced(self):
        with pytest.raises(ValueError):
            ket(1.0, 1.0)
        with pytest.raises((ValueError, DimensionError)):
            ket(1.0, 0.0, 0.0)

    def test_amplitudes_write_protected(self):
        with pytest.raises(ValueError):
            KET_ZERO.amplitudes[0] = 5.0

    def test_overlap_values(self):
        assert quantum_overlap(KET_ZERO, KET_ONE) == pytest.approx(0.0, abs=1e-15)
        assert quantum_overlap(KET_ZERO, KET_PLUS) == pytest.approx(0.5, abs=1e-12)
        assert quantum_overlap(KET_PLUS, KET_PLUS) == pytest.approx(1.0, abs=1e-12)

    def test_tensor_dimension(self):
        joint = KET_ZERO.tensor(KET_ONE)
        assert joint.dimension == 4
        assert joint.amplitudes[1] == pytest.approx(1.0)
        with pytest.raises(DimensionError):
            joint.tensor(joint)

    @given(unit_vectors)
    @settings(deadline=None)
    def test_bloch_round_trip(self, n):
        state = state_from_bloch(n)
        assert np.allclose(bloch_vector(state), n, atol=1e-9)

    def test_bloch_of_basis_states(self):
        assert np.allclose(bloch_vector(KET_ZERO), [0, 0, 1])
        assert np.allclose(bloch_vector(KET_PLUS), [1, 0, 0])


class TestMeasurements:
    def test_orthonormality_enforced(self):
        with pytest.raises(ValueError):
            ProjectiveMeasurement(basis=(KET_ZERO, KET_PLUS), labels=("0", "1"))

    def test_unique_labels(self):
        with pytest.raises(ValueError):
            ProjectiveMeasurement(basis=(KET_ZERO, KET_ONE), labels=("0", "0"))

    def test_born_values(self):
        assert born_probability(KET_PLUS, Z_MEASUREMENT, "0") == pytest.approx(0.5)
        assert born_probability(KET_ZERO, Z_MEASUREMENT, "0") == pytest.approx(1.0)
        assert born_probability(KET_ZERO, Z_MEASUREMENT, "1") == pytest.approx(0.0)

    @given(unit_vectors, unit_vectors)
    @settings(deadline=None)
    def test_distribution_sums_to_one(self, n, m):
        state = state_from_bloch(n)
        meas = measurement_from_bloch(m)
        dist = born_distribution(state, meas)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
        assert all(-1e-12 <= p <= 1 + 1e-12 for p in dist.values())

    def test_measurement_from_bloch_matches_alignment(self):
        meas = measurement_from_bloch(np.array([0.0, 0.0, 1.0]))
        assert quantum_overlap(meas.basis[0], KET_ZERO) == pytest.approx(1.0)


class TestChsh:
    def test_operator_is_hermitian(self):
        op = chsh_operator(CHSH_ZX_SETTING)
        assert np.allclose(op, op.conj().T)

    def test_phi_plus_hits_tsirelson(self):
        assert chsh_expectation(PHI_PLUS, CHSH_ZX_SETTING) == pytest.approx(
            TSIRELSON_BOUND, abs=1e-12
        )

    def test_product_state_stays_local_at_zx(self):
        product = KET_ZERO.tensor(KET_ZERO)
        assert chsh_expectation(product, CHSH_ZX_SETTING) == pytest.approx(SQRT2, abs=1e-12)

    def test_optimal_value_closed_form(self):
        for alpha_sq in (0.5, 0.8, 0.999, 0.3):
            state = schmidt_pair_state(alpha_sq)
            value, setting = chsh_optimal_value(state)
            expected = 2 * math.sqrt(1 + 4 * alpha_sq * (1 - alpha_sq))
            assert value == pytest.approx(expected, abs=1e-9)
            assert chsh_expectation(state, setting) == pytest.approx(expected, abs=1e-7)

    def test_optimal_value_at_point_eight(self):
        value, _ = chsh_optimal_value(schmidt_pair_state(0.8))
        assert value == pytest.approx(2 * math.sqrt(1.64), abs=1e-12)

    def test_relative_phase_does_not_change_optimum(self):
        value, _ = chsh_optimal_value(schmidt_pair_state(0.5, rel_phase=1.1))
        assert value == pytest.approx(TSIRELSON_BOUND, abs=1e-9)

    def test_product_state_optimum_is_local_bound(self):
        value, _ = chsh_optimal_value(KET_ZERO.tensor(KET_ZERO))
        assert value == pytest.approx(2.0, abs=1e-9)

    @given(st.floats(0.01, 0.99))
    @settings(deadline=None, max_examples=25)
    def test_optimum_between_local_and_tsirelson(self, alpha_sq):
        value, _ = chsh_optimal_value(schmidt_pair_state(alpha_sq))
        assert 2.0 - 1e-9 <= value <= TSIRELSON_BOUND + 1e-9

    def test_correlation_matrix_of_phi_plus(self):
        t = correlation_matrix(PHI_PLUS)
        assert np.allclose(np.diag(t), [1.0, -1.0, 1.0], atol=1e-12)

    def test_setting_requires_unit_vectors(self):
        z = np.array([0.0, 0.0, 1.0])
        with pytest.raises(ValueError):
            ChshSetting(alice=(z, 2 * z), bob=(z, z))


class TestCloneOutput:
    def test_plus_input_on_z_machine_gives_maximal_entanglement(self):
        out = clone_output((KET_ZERO, KET_ONE), KET_PLUS)
        assert quantum_overlap(out, PHI_PLUS) == pytest.approx(1.0, abs=1e-12)

    def test_zero_input_on_x_machine_gives_maximal_entanglement(self):
        out = clone_output((KET_PLUS, KET_MINUS), KET_ZERO)
        assert np.allclose(
            out.amplitudes, [1 / SQRT2, 0, 0, 1 / SQRT2], atol=1e-12
        )
        value, _ = chsh_optimal_value(out)
        assert value == pytest.approx(TSIRELSON_BOUND, abs=1e-9)

    def test_basis_state_input_clones_exactly(self):
        out = clone_output((KET_ZERO, KET_ONE), KET_ZERO)
        assert quantum_overlap(out, KET_ZERO.tensor(KET_ZERO)) == pytest.approx(1.0)

    def test_machine_basis_must_be_orthogonal(self):
        with pytest.raises(ValueError):
            clone_output((KET_ZERO, KET_PLUS), KET_ONE)

    @given(st.floats(0.05, 0.95))
    @settings(deadline=None, max_examples=25)
    def test_output_chsh_matches_schmidt_closed_form(self, alpha_sq):
        # amplitude alpha on the machine axis carries over to the clone pair
        psi = state_from_bloch(
            np.array(
                [2 * math.sqrt(alpha_sq * (1 - alpha_sq)), 0.0, 2 * alpha_sq - 1.0]
            )
        )
        out = clone_output((KET_ZERO, KET_ONE), psi)
        value, _ = chsh_optimal_value(out)
        assert value == pytest.approx(
            2 * math.sqrt(1 + 4 * alpha_sq * (1 - alpha_sq)), abs=1e-9
        )


class TestGuards:
    def test_expectation_rejects_qubit_state(self):
        with pytest.raises(DimensionError):
            chsh_expectation(KET_ZERO, CHSH_ZX_SETTING)

    def test_bloch_observable_squares_to_identity(self):
        n = np.array([3.0, 4.0, 12.0]) / 13.0
        obs = bloch_observable(n)
        assert np.allclose(obs @ obs, np.eye(2), atol=1e-12)

    def test_internal_cross_check_guards_tsirelson(self):
        # chsh_expectation re-checks its value against Tsirelson; a tampered
        # setting cannot push it beyond without raising
        state = QuantumState(np.array([1 / SQRT2, 0, 0, 1 / SQRT2], dtype=complex))
        value = chsh_expectation(state, CHSH_ZX_SETTING)
        assert value <= TSIRELSON_BOUND + 1e-9
