import numpy as np
import pytest
from helpers import haar_state, haar_unitary, random_cptp

from irbench.errors import (
    DataParseError,
    DimensionMismatch,
    InvalidEffect,
    InvalidState,
    NonUnitaryInput,
    NotTracePreserving,
)
from irbench.cliffords import enumerate_group
from irbench.noise import depolarizing
from irbench.paulis import (
    PauliVector,
    SuperOperator,
    apply,
    average_fidelity,
    basis_effect,
    basis_state,
    compose,
    maximally_mixed,
    pauli_labels,
    ptm_from_unitary,
    rotation_unitary,
    survival_probability,
    twirl,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)


class TestPtmFromUnitary:
    def test_identity(self):
        rep = ptm_from_unitary(np.eye(2))
        assert np.array_equal(rep.matrix, np.eye(4))

    def test_bit_flip_signature(self):
        rep = ptm_from_unitary(X)
        assert np.allclose(rep.matrix, np.diag([1, 1, -1, -1]), atol=1e-12)

    def test_small_overrotation_fidelity(self):
        eps = np.pi / 10
        rep = ptm_from_unitary(rotation_unitary("X", eps))
        expected = 1.0 - 2.0 * (1.0 - np.cos(eps / 2) ** 2) / 3.0
        assert abs(average_fidelity(rep).average_fidelity - expected) < 1e-12
        assert abs(average_fidelity(rep).gate_error - 0.016) < 1e-3

    def test_rejects_non_unitary(self):
        with pytest.raises(NonUnitaryInput):
            ptm_from_unitary(np.array([[1.0, 0.0], [0.0, 0.5]]))

    def test_rejects_bad_shape(self):
        with pytest.raises(DimensionMismatch):
            ptm_from_unitary(np.eye(3))

    def test_unitary_transfer_matrices_are_orthogonal(self, rng):
        for n in (1, 2):
            rep = ptm_from_unitary(haar_unitary(2**n, rng))
            assert np.max(np.abs(rep.matrix.T @ rep.matrix - np.eye(4**n))) < 1e-10

    def test_trace_preserving_row_exact(self, rng):
        rep = ptm_from_unitary(haar_unitary(2, rng))
        assert rep.matrix[0, 0] == 1.0
        assert not rep.matrix[0, 1:].any()


class TestCompose:
    def test_identity_neutral(self, rng):
        channel = random_cptp(rng)
        eye = SuperOperator.identity(1)
        assert compose(eye, channel) == channel
        assert compose(channel, eye) == channel

    def test_inverse_rotation_cancels(self):
        plus = ptm_from_unitary(rotation_unitary("X", np.pi / 2))
        minus = ptm_from_unitary(rotation_unitary("X", -np.pi / 2))
        assert np.allclose(compose(plus, minus).matrix, np.eye(4), atol=1e-12)

    def test_depolarizing_parameters_multiply(self):
        # Oracle: plain matrix product of explicitly constructed diagonals.
        left, right = np.diag([1, 0.9, 0.9, 0.9]), np.diag([1, 0.8, 0.8, 0.8])
        got = compose(depolarizing(0.9), depolarizing(0.8))
        assert np.allclose(got.matrix, left @ right, atol=0)
        assert np.allclose(got.matrix, depolarizing(0.72).matrix, atol=1e-15)

    def test_matches_unitary_product(self, rng):
        for n in (1, 2):
            for _ in range(10):
                u, v = haar_unitary(2**n, rng), haar_unitary(2**n, rng)
                direct = ptm_from_unitary(u @ v).matrix
                composed = compose(ptm_from_unitary(u), ptm_from_unitary(v)).matrix
                assert np.max(np.abs(direct - composed)) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            compose(SuperOperator.identity(1), SuperOperator.identity(2))


class TestApply:
    def test_identity(self):
        state = basis_state(1)
        assert apply(SuperOperator.identity(1), state) == state

    def test_full_depolarization(self):
        out = apply(depolarizing(0.0), basis_state(1))
        assert np.allclose(out.coefficients, maximally_mixed(1).coefficients, atol=1e-15)

    def test_bit_flip_moves_population(self):
        out = apply(ptm_from_unitary(X), basis_state(1, 0))
        assert np.allclose(out.coefficients, basis_state(1, 1).coefficients, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            apply(SuperOperator.identity(2), basis_state(1))


class TestSurvivalProbability:
    def test_identity_channel(self):
        value = survival_probability(
            SuperOperator.identity(1), basis_state(1), basis_effect(1)
        )
        assert abs(value - 1.0) < 1e-15

    def test_bit_flip_channel(self):
        value = survival_probability(
            ptm_from_unitary(X), basis_state(1), basis_effect(1)
        )
        assert abs(value) < 1e-12

    def test_depolarizing_closed_form_and_matrix_oracle(self):
        p = 0.73
        value = survival_probability(depolarizing(p), basis_state(1), basis_effect(1))
        assert abs(value - (1 + p) / 2) < 1e-12
        # Dense-matrix oracle evaluated without transfer matrices.
        rho = np.array([[1, 0], [0, 0]], dtype=complex)
        out = p * rho + (1 - p) * np.eye(2) / 2
        assert abs(value - np.real(np.trace(rho @ out))) < 1e-12

    def test_affine_in_state_and_effect(self, rng):
        channel = random_cptp(rng)
        s1, s2 = basis_state(1, 0), basis_state(1, 1)
        e1, e2 = basis_effect(1, 0), basis_effect(1, 1)
        alpha = 0.3
        mix_state = PauliVector(alpha * s1.coefficients + (1 - alpha) * s2.coefficients)
        mix_effect = PauliVector(alpha * e1.coefficients + (1 - alpha) * e2.coefficients)
        lhs = survival_probability(channel, mix_state, e1)
        rhs = alpha * survival_probability(channel, s1, e1) + (
            1 - alpha
        ) * survival_probability(channel, s2, e1)
        assert abs(lhs - rhs) < 1e-12
        lhs = survival_probability(channel, s1, mix_effect)
        rhs = alpha * survival_probability(channel, s1, e1) + (
            1 - alpha
        ) * survival_probability(channel, s1, e2)
        assert abs(lhs - rhs) < 1e-12

    def test_bounded_for_physical_inputs(self, rng):
        for _ in range(50):
            channel = random_cptp(rng)
            u = haar_unitary(2, rng)
            state = PauliVector.from_matrix(u @ np.diag([1.0, 0.0]) @ u.conj().T)
            effect = PauliVector.from_matrix(u @ np.diag([0.0, 1.0]) @ u.conj().T)
            value = survival_probability(channel, state, effect, validate=True)
            assert -1e-9 <= value <= 1 + 1e-9

    def test_rejects_traceless_state(self):
        bogus = PauliVector(np.array([0.0, 1.0, 0.0, 0.0]))
        with pytest.raises(InvalidState):
            survival_probability(SuperOperator.identity(1), bogus, basis_effect(1))

    def test_rejects_non_psd_state_when_validating(self):
        coeffs = np.array([1.0, 2.0, 0.0, 0.0]) / np.sqrt(2)
        with pytest.raises(InvalidState):
            survival_probability(
                SuperOperator.identity(1), PauliVector(coeffs), basis_effect(1),
                validate=True,
            )

    def test_rejects_oversized_effect_when_validating(self):
        big = PauliVector(2.5 * basis_effect(1).coefficients)
        with pytest.raises(InvalidEffect):
            survival_probability(
                SuperOperator.identity(1), basis_state(1), big, validate=True
            )


class TestAverageFidelity:
    def test_identity(self):
        summary = average_fidelity(SuperOperator.identity(1))
        assert summary.average_fidelity == 1.0
        assert summary.depolarizing_parameter == 1.0
        assert summary.gate_error == 0.0

    def test_depolarizing_value(self):
        summary = average_fidelity(depolarizing(0.984))
        assert abs(summary.gate_error - 0.008) < 1e-12

    def test_requires_trace_preservation(self):
        broken = np.eye(4)
        broken[0, 1] = 0.1
        with pytest.raises(NotTracePreserving):
            average_fidelity(SuperOperator(broken))

    def test_monte_carlo_haar_oracle(self, rng):
        u = haar_unitary(2, rng)
        summary = average_fidelity(ptm_from_unitary(u))
        samples = 100_000
        fidelities = np.empty(samples)
        for i in range(samples):
            psi = haar_state(2, rng)
            fidelities[i] = np.abs(psi.conj() @ u @ psi) ** 2
        stderr = fidelities.std(ddof=1) / np.sqrt(samples)
        assert abs(fidelities.mean() - summary.average_fidelity) < 3 * stderr + 1e-6


class TestTwirl:
    def test_depolarizing_fixed_point(self):
        channel = depolarizing(0.9)
        twirled = twirl(channel, enumerate_group(1))
        assert np.max(np.abs(twirled.matrix - channel.matrix)) < 1e-12

    def test_overrotation_becomes_depolarizing(self):
        channel = ptm_from_unitary(rotation_unitary("X", np.pi / 10))
        twirled = twirl(channel, enumerate_group(1))
        off = twirled.matrix - np.diag(np.diag(twirled.matrix))
        assert np.max(np.abs(off)) < 1e-12
        diag = np.diag(twirled.matrix)
        assert np.max(np.abs(diag[1:] - diag[1])) < 1e-12

    def test_preserves_average_fidelity(self, rng):
        for _ in range(20):
            channel = random_cptp(rng)
            twirled = twirl(channel, enumerate_group(1))
            before = average_fidelity(channel).average_fidelity
            after = average_fidelity(twirled).average_fidelity
            assert abs(before - after) < 1e-12

    def test_trace_preserving_non_cp_maps_also_collapse(self, rng):
        matrix = rng.normal(size=(4, 4))
        matrix[0] = [1.0, 0.0, 0.0, 0.0]
        twirled = twirl(SuperOperator(matrix), enumerate_group(1))
        off = twirled.matrix - np.diag(np.diag(twirled.matrix))
        assert np.max(np.abs(off)) < 1e-12

    def test_accepts_superoperator_groups(self):
        group = [element.to_superoperator() for element in enumerate_group(1)]
        channel = depolarizing(0.7)
        assert np.allclose(twirl(channel, group).matrix, channel.matrix, atol=1e-12)


class TestSerialization:
    def test_json_round_trip(self, rng):
        channel = random_cptp(rng)
        back = SuperOperator.from_json(channel.to_json())
        assert back == channel

    def test_rejects_malformed_payloads(self):
        with pytest.raises(DataParseError):
            SuperOperator.from_json("{not json")
        with pytest.raises(DataParseError):
            SuperOperator.from_json('{"dimension": 2, "matrix": [[1, 0], [0, 1]]}')


class TestVectors:
    def test_state_convention(self):
        state = basis_state(1)
        assert abs(state.coefficients[0] - 1 / np.sqrt(2)) < 1e-15
        assert abs(state.trace() - 1.0) < 1e-15

    def test_matrix_round_trip(self, rng):
        u = haar_unitary(2, rng)
        rho = u @ np.diag([0.7, 0.3]) @ u.conj().T
        vec = PauliVector.from_matrix(rho)
        assert np.max(np.abs(vec.to_matrix() - rho)) < 1e-12

    def test_from_matrix_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            PauliVector.from_matrix(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_labels_order(self):
        assert pauli_labels(1) == ("I", "X", "Y", "Z")
        assert pauli_labels(2)[:5] == ("II", "IX", "IY", "IZ", "XI")

    def test_two_qubit_state(self):
        state = basis_state(2, 0b01)
        assert abs(state.trace() - 1.0) < 1e-15
        rho = state.to_matrix()
        expected = np.zeros((4, 4))
        expected[1, 1] = 1.0
        assert np.max(np.abs(rho - expected)) < 1e-12
