import numpy as np
import pytest

from irbench.cliffords import enumerate_group, named_gate
from irbench.errors import (
    ConfigError,
    DimensionMismatch,
    InvalidDistribution,
    InvalidState,
    NotTracePreserving,
    OutOfRange,
    UnphysicalParameters,
)
from irbench.noise import (
    GammaDiagnostic,
    NoiseModel,
    channel_from_config,
    damping,
    depolarizing,
    gamma_variation,
    overrotation,
    pauli_channel,
    spam_pair,
)
from irbench.paulis import (
    SuperOperator,
    apply,
    average_fidelity,
    basis_effect,
    basis_state,
    compose,
    maximally_mixed,
    survival_probability,
)


class TestDepolarizing:
    def test_unit_parameter_is_identity(self):
        assert depolarizing(1.0) == SuperOperator.identity(1)

    def test_zero_parameter_fully_mixes(self):
        out = apply(depolarizing(0.0), basis_state(1))
        assert np.allclose(out.coefficients, maximally_mixed(1).coefficients)

    def test_average_fidelity_relation(self):
        for d in (2, 4):
            summary = average_fidelity(depolarizing(0.9, d))
            assert abs(summary.average_fidelity - (0.9 + 0.1 / d)) < 1e-15

    def test_cp_range_enforced(self):
        with pytest.raises(OutOfRange):
            depolarizing(1.0001)
        with pytest.raises(OutOfRange):
            depolarizing(-0.4)  # below -1/(d^2-1) for d = 2
        assert depolarizing(-1.0 / 3.0).is_completely_positive()

    def test_dimension_must_be_power_of_two(self):
        with pytest.raises(DimensionMismatch):
            depolarizing(0.9, 3)


class TestPauliChannel:
    def test_identity_distribution(self):
        assert pauli_channel([1, 0, 0, 0]) == SuperOperator.identity(1)

    def test_bit_flip_eigenvalues(self):
        q = 0.1
        channel = pauli_channel([1 - q, q, 0, 0])
        assert np.allclose(channel.matrix, np.diag([1, 1, 1 - 2 * q, 1 - 2 * q]))
        # Conjugation oracle: rho -> (1-q) rho + q X rho X evaluated densely.
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        rho = np.array([[0.75, 0.2 + 0.1j], [0.2 - 0.1j, 0.25]])
        direct = (1 - q) * rho + q * x @ rho @ x
        from irbench.paulis import PauliVector

        got = apply(channel, PauliVector.from_matrix(rho)).to_matrix()
        assert np.max(np.abs(got - direct)) < 1e-12

    def test_equal_weights_match_depolarizing(self):
        p = 0.8
        weights = np.full(4, (1 - p) / 4)
        weights[0] += p
        assert np.allclose(pauli_channel(weights).matrix, depolarizing(p).matrix)

    def test_rejects_bad_distributions(self):
        with pytest.raises(InvalidDistribution):
            pauli_channel([0.5, 0.6, 0.0, 0.0])
        with pytest.raises(InvalidDistribution):
            pauli_channel([1.1, -0.1, 0.0, 0.0])
        with pytest.raises(InvalidDistribution):
            pauli_channel([0.5, 0.5])

    def test_commutes_with_depolarizing(self):
        pauli = pauli_channel([0.7, 0.1, 0.1, 0.1])
        depol = depolarizing(0.9)
        assert compose(pauli, depol) == compose(depol, pauli)

    def test_two_qubit_channel(self):
        probs = np.zeros(16)
        probs[0], probs[5] = 0.9, 0.1  # XX with weight 0.1
        channel = pauli_channel(probs)
        assert channel.is_trace_preserving(0)
        assert channel.is_completely_positive()


class TestOverrotation:
    def test_zero_angle_identity(self):
        assert np.allclose(overrotation("X", 0.0).matrix, np.eye(4))

    def test_predicted_errors(self):
        assert round(average_fidelity(overrotation("X", np.pi / 20)).gate_error, 3) == 0.004
        assert round(average_fidelity(overrotation("X", np.pi / 10)).gate_error, 3) == 0.016

    def test_opposite_rotations_cancel(self):
        eps = 0.37
        assert np.allclose(
            compose(overrotation("X", eps), overrotation("X", -eps)).matrix,
            np.eye(4),
            atol=1e-12,
        )

    def test_error_formula_on_grid(self):
        for eps in np.linspace(-np.pi, np.pi, 41):
            for axis in ("X", "Y", "Z"):
                got = average_fidelity(overrotation(axis, eps)).gate_error
                expected = 2.0 * (1.0 - np.cos(eps / 2.0) ** 2) / 3.0
                assert abs(got - expected) < 1e-12


class TestDamping:
    def test_zero_duration_is_identity(self):
        assert np.allclose(damping(5e-6, 3.2e-6, 0.0).matrix, np.eye(4))

    def test_clifford_scale_error_level(self):
        channel = damping(5e-6, 3.2e-6, 1.875 * 20e-9)
        error = average_fidelity(channel).gate_error
        assert 0.004 <= error <= 0.008

    def test_trace_preserving_row_exact(self):
        channel = damping(5e-6, 3.2e-6, 40e-9)
        assert channel.matrix[0, 0] == 1.0
        assert not channel.matrix[0, 1:].any()

    def test_channel_is_cp(self):
        assert damping(5e-6, 3.2e-6, 100e-9).is_completely_positive()
        assert damping(1.0, 2.0, 0.5).is_completely_positive()

    def test_ground_state_is_fixed_point(self):
        channel = damping(5e-6, 3.2e-6, 1e-6)
        out = apply(channel, basis_state(1, 0))
        assert np.allclose(out.coefficients, basis_state(1, 0).coefficients, atol=1e-12)

    def test_rejects_unphysical_parameters(self):
        with pytest.raises(UnphysicalParameters):
            damping(1e-6, 2.5e-6, 1e-9)  # T2 > 2 T1
        with pytest.raises(UnphysicalParameters):
            damping(-1e-6, 1e-6, 1e-9)
        with pytest.raises(UnphysicalParameters):
            damping(1e-6, 1e-6, -1e-9)


class TestSpam:
    def test_identity_errors_keep_ideal_pair(self):
        eye = SuperOperator.identity(1)
        prep, meas = spam_pair(eye, eye)
        assert prep == basis_state(1)
        assert meas == basis_effect(1)

    def test_depolarized_preparation_scales_bloch_vector(self):
        prep, _ = spam_pair(depolarizing(0.9), SuperOperator.identity(1))
        ideal = basis_state(1).coefficients
        assert abs(prep.coefficients[0] - ideal[0]) < 1e-15
        assert abs(prep.coefficients[3] - 0.9 * ideal[3]) < 1e-15

    def test_measurement_error_acts_in_heisenberg_picture(self):
        eye = SuperOperator.identity(1)
        channel = depolarizing(0.8)
        _, meas = spam_pair(eye, channel)
        # Contracting the noisy effect with a state equals measuring the
        # ideal effect after the channel acts on that state.
        state = basis_state(1, 1)
        direct = survival_probability(channel, state, basis_effect(1))
        via_effect = survival_probability(eye, state, meas)
        assert abs(direct - via_effect) < 1e-15

    def test_rejects_trace_breaking_prep(self):
        broken = np.eye(4)
        broken[0, 0] = 0.9
        with pytest.raises((InvalidState, NotTracePreserving)):
            spam_pair(SuperOperator(broken), SuperOperator.identity(1))


class TestNoiseModel:
    def test_defaults_are_ideal(self):
        model = NoiseModel.ideal(1)
        assert model.gate_error == SuperOperator.identity(1)
        assert model.interleaved_error == SuperOperator.identity(1)
        assert model.prep == basis_state(1)

    def test_per_gate_overrides(self):
        special = named_gate("X90")
        model = NoiseModel(
            1,
            gate_error=depolarizing(0.99),
            per_gate={special: depolarizing(0.9)},
        )
        assert model.error_for(special) == depolarizing(0.9)
        assert model.error_for(named_gate("Y90")) == depolarizing(0.99)

    def test_rejects_non_tp_channels(self):
        broken = np.eye(4)
        broken[0, 2] = 0.05
        with pytest.raises(NotTracePreserving):
            NoiseModel(1, gate_error=SuperOperator(broken))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            NoiseModel(2, gate_error=depolarizing(0.9, 2))

    def test_with_interleaved_error(self):
        model = NoiseModel.uniform(depolarizing(0.99))
        swapped = model.with_interleaved_error(depolarizing(0.9))
        assert swapped.interleaved_error == depolarizing(0.9)
        assert swapped.gate_error == model.gate_error


class TestGamma:
    def test_gate_independent_noise_has_zero_gamma(self):
        model = NoiseModel.uniform(depolarizing(0.97))
        diagnostic = gamma_variation(model, enumerate_group(1))
        assert diagnostic.gamma == 0.0
        assert diagnostic.max_valid_m is None
        assert diagnostic.is_valid_for(10**6)

    def test_two_gate_model_matches_hand_computation(self):
        group = enumerate_group(1)
        model = NoiseModel(
            1,
            gate_error=depolarizing(0.98),
            per_gate={group[1]: depolarizing(0.99), group[2]: depolarizing(0.97)},
        )
        diagnostic = gamma_variation(model, group)
        expected = 2.0 * (np.sqrt(3.0) * 0.01) / 24.0
        assert abs(diagnostic.gamma - expected) < 1e-15

    def test_scaling_deviations_doubles_gamma(self):
        group = enumerate_group(1)
        base = NoiseModel(
            1,
            gate_error=depolarizing(0.98),
            per_gate={group[1]: depolarizing(0.99), group[2]: depolarizing(0.97)},
        )
        doubled = NoiseModel(
            1,
            gate_error=depolarizing(0.98),
            per_gate={group[1]: depolarizing(1.0), group[2]: depolarizing(0.96)},
        )
        one = gamma_variation(base, group).gamma
        two = gamma_variation(doubled, group).gamma
        assert abs(two - 2.0 * one) < 1e-14

    def test_max_valid_m_consistent_with_inequality(self):
        group = enumerate_group(1)
        model = NoiseModel(
            1,
            gate_error=depolarizing(0.98),
            per_gate={group[i]: depolarizing(0.9) for i in range(4)},
        )
        diagnostic = gamma_variation(model, group)
        limit = diagnostic.max_valid_m
        assert limit is not None and limit >= 1
        assert diagnostic.gamma**2 < 2.0 / (limit * (limit + 1))
        assert not diagnostic.gamma**2 < 2.0 / ((limit + 1) * (limit + 2))

    def test_huge_gamma_invalidates_all_lengths(self):
        diagnostic = GammaDiagnostic(gamma=2.0, max_valid_m=0)
        assert not diagnostic.is_valid_for(1)


class TestChannelConfig:
    def test_all_constructor_types(self):
        assert channel_from_config({"type": "identity"}, 1) == SuperOperator.identity(1)
        assert channel_from_config({"type": "depolarizing", "p": 0.9}, 1) == depolarizing(0.9)
        assert channel_from_config(
            {"type": "pauli", "probabilities": [0.9, 0.1, 0, 0]}, 1
        ) == pauli_channel([0.9, 0.1, 0, 0])
        assert channel_from_config(
            {"type": "overrotation", "axis": "x", "epsilon": 0.157}, 1
        ) == overrotation("X", 0.157)
        assert channel_from_config(
            {"type": "damping", "t1": 5e-6, "t2": 3.2e-6, "t_gate": 2e-8}, 1
        ) == damping(5e-6, 3.2e-6, 2e-8)

    def test_compose_applies_in_listed_order(self):
        spec = {
            "type": "compose",
            "channels": [
                {"type": "overrotation", "axis": "X", "epsilon": 0.3},
                {"type": "depolarizing", "p": 0.9},
            ],
        }
        built = channel_from_config(spec, 1)
        expected = compose(depolarizing(0.9), overrotation("X", 0.3))
        assert built == expected

    def test_errors(self):
        with pytest.raises(ConfigError):
            channel_from_config({"type": "unknown"}, 1)
        with pytest.raises(ConfigError):
            channel_from_config({"type": "depolarizing"}, 1)
        with pytest.raises(ConfigError):
            channel_from_config({}, 1)
        with pytest.raises(ConfigError):
            channel_from_config({"type": "overrotation", "axis": "X", "epsilon": 0.1}, 2)
