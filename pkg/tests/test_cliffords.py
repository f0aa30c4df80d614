import time

import numpy as np
import pytest
from helpers import haar_unitary
from scipy.stats import chi2

import irbench.cliffords as cliffords
from irbench.cliffords import (
    CliffordElement,
    PulseSequence,
    compose_clifford,
    decompose_minimal,
    decomposition_length_histogram,
    enumerate_group,
    identity,
    inverse,
    named_gate,
    sample_uniform,
    symplectic_form,
)
from irbench.errors import DataParseError, DimensionMismatch, UnsupportedDimension
from irbench.paulis import ptm_from_unitary, rotation_unitary


def is_symplectic(tableau):
    n = tableau.shape[0] // 2
    omega = symplectic_form(n).astype(int)
    return np.array_equal((tableau.astype(int) @ omega @ tableau.T.astype(int)) % 2, omega)


class TestGroupAxioms:
    def test_inverse_of_identity(self):
        for n in (1, 2, 3):
            assert inverse(identity(n)) == identity(n)

    def test_rotation_inverse_matches_opposite_rotation(self):
        assert inverse(named_gate("X90")) == named_gate("X-90")
        assert inverse(named_gate("S")) == named_gate("SDG")

    def test_compose_with_inverse_cancels(self, rng):
        for n in (1, 2, 3, 4):
            for _ in range(25):
                element = sample_uniform(n, rng)
                assert compose_clifford(inverse(element), element).is_identity()
                assert compose_clifford(element, inverse(element)).is_identity()

    def test_long_product_inverts_on_eight_qubits(self, rng):
        composite = identity(8)
        for _ in range(1000):
            composite = compose_clifford(sample_uniform(8, rng), composite)
        assert compose_clifford(inverse(composite), composite).is_identity()

    def test_associativity(self, rng):
        a, b, c = (sample_uniform(2, rng) for _ in range(3))
        left = compose_clifford(compose_clifford(a, b), c)
        right = compose_clifford(a, compose_clifford(b, c))
        assert left == right

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            compose_clifford(sample_uniform(1, rng), sample_uniform(2, rng))


class TestSuperoperatorBridge:
    def test_identity_maps_to_identity(self):
        assert np.array_equal(identity(1).to_superoperator().matrix, np.eye(4))

    def test_hadamard_action(self):
        rep = named_gate("H").to_superoperator().matrix
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        expected[1, 3] = 1.0  # Z -> X
        expected[3, 1] = 1.0  # X -> Z
        expected[2, 2] = -1.0  # Y -> -Y
        assert np.array_equal(rep, expected)

    def test_homomorphism_on_random_pairs(self, rng):
        for n, trials in ((1, 1000), (2, 50)):
            for _ in range(trials):
                a, b = sample_uniform(n, rng), sample_uniform(n, rng)
                product = compose_clifford(a, b).to_superoperator().matrix
                stacked = a.to_superoperator().matrix @ b.to_superoperator().matrix
                assert np.array_equal(product, stacked)

    def test_matches_unitary_conjugation(self):
        for axis in ("X", "Y"):
            for angle, suffix in ((np.pi / 2, "90"), (np.pi, "180")):
                via_unitary = ptm_from_unitary(rotation_unitary(axis, angle)).matrix
                via_tableau = named_gate(f"{axis}{suffix}").to_superoperator().matrix
                assert np.max(np.abs(via_tableau - via_unitary)) < 1e-12

    def test_from_unitary_tracks_products(self):
        hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        phase = np.diag([1.0, 1.0j])
        product = CliffordElement.from_unitary(hadamard @ phase)
        stacked = compose_clifford(named_gate("H"), named_gate("S"))
        assert product == stacked

    def test_rejects_large_n(self, rng):
        with pytest.raises(UnsupportedDimension):
            sample_uniform(4, rng).to_superoperator()

    def test_from_unitary_rejects_non_clifford(self):
        with pytest.raises(ValueError):
            CliffordElement.from_unitary(rotation_unitary("X", 0.3))


class TestEnumeration:
    def test_group_orders(self):
        assert len(enumerate_group(1)) == 24
        assert len(enumerate_group(2)) == 11520

    def test_no_duplicates(self):
        group = enumerate_group(2)
        assert len({element.key() for element in group}) == len(group)

    def test_closed_under_composition(self, rng):
        group = set(enumerate_group(1))
        members = list(group)
        for _ in range(100):
            a, b = rng.choice(len(members), size=2)
            assert compose_clifford(members[a], members[b]) in group

    def test_two_qubit_closure_under_composition(self, rng):
        group = set(enumerate_group(2))
        members = enumerate_group(2)
        for _ in range(50):
            a, b = rng.integers(len(members), size=2)
            assert compose_clifford(members[a], members[b]) in group

    def test_rejects_unsupported(self):
        with pytest.raises(UnsupportedDimension):
            enumerate_group(3)


class TestSampling:
    def test_single_qubit_uniformity_chi_square(self):
        rng = np.random.default_rng(1234)
        table = enumerate_group(1)
        index = {element: i for i, element in enumerate(table)}
        draws = 100_000
        counts = np.zeros(24)
        for _ in range(draws):
            counts[index[sample_uniform(1, rng)]] += 1
        expected = draws / 24
        statistic = float(np.sum((counts - expected) ** 2 / expected))
        assert statistic < chi2.ppf(0.999, 23)

    def test_two_qubit_samples_lie_in_group(self, rng):
        group = set(enumerate_group(2))
        for _ in range(300):
            assert sample_uniform(2, rng) in group

    def test_sampled_tableaus_are_symplectic(self, rng):
        for n in (3, 4, 6):
            for _ in range(20):
                assert is_symplectic(sample_uniform(n, rng).tableau)

    def test_deterministic_given_seed(self):
        first = [sample_uniform(3, np.random.default_rng(99)) for _ in range(20)]
        second = [sample_uniform(3, np.random.default_rng(99)) for _ in range(20)]
        assert first == second

    def test_canonical_index_bijection_matches_closure(self):
        # Every canonical index yields a distinct symplectic matrix and the
        # collection reproduces the exhaustive closure, for n = 1 and 2.
        for n, order in ((1, 6), (2, 720)):
            built = {
                cliffords._directsum_to_standard(
                    cliffords._symplectic_from_index(i, n)
                ).astype(np.uint8).tobytes()
                for i in range(order)
            }
            closure = {mat.tobytes() for mat in cliffords._symplectic_closure(n)}
            assert built == closure

    def test_group_order_formula(self):
        assert cliffords.clifford_group_order(1) == 24
        assert cliffords.clifford_group_order(2) == 11520


class TestValidation:
    def test_compose_and_inverse_preserve_symplectic_invariant(self, rng):
        cliffords.VALIDATE = True
        try:
            for n in (1, 2, 4):
                a, b = sample_uniform(n, rng), sample_uniform(n, rng)
                compose_clifford(a, b)
                inverse(a)
        finally:
            cliffords.VALIDATE = False

    def test_validate_rejects_bad_tableau(self):
        cliffords.VALIDATE = True
        try:
            with pytest.raises(ValueError):
                CliffordElement(np.ones((2, 2), dtype=np.uint8), np.zeros(2, np.uint8))
        finally:
            cliffords.VALIDATE = False

    def test_inversion_time_scales_polynomially(self, rng):
        small = sample_uniform(2, rng)
        large = sample_uniform(16, rng)

        def best_time(element):
            times = []
            for _ in range(50):
                start = time.perf_counter()
                inverse(element)
                times.append(time.perf_counter() - start)
            return min(times)

        assert best_time(large) < 100 * best_time(small)


class TestDecomposition:
    def test_identity_is_single_pulse(self, rng):
        sequence = decompose_minimal(identity(1), rng)
        assert sequence.pulses == ("I",)

    def test_length_histogram_and_mean(self):
        histogram = decomposition_length_histogram()
        assert histogram == {1: 7, 2: 13, 3: 4}
        total = sum(length * count for length, count in histogram.items())
        assert total / 24 == 1.875

    def test_round_trip_recomposition(self, rng):
        for element in enumerate_group(1):
            for _ in range(3):
                sequence = decompose_minimal(element, rng)
                assert sequence.to_element() == element

    def test_tie_breaks_are_seeded_and_cover_options(self):
        target = compose_clifford(named_gate("Y180"), named_gate("X180"))  # Z180
        picks = {
            decompose_minimal(target, np.random.default_rng(seed)).pulses
            for seed in range(40)
        }
        assert len(picks) > 1
        repeat = [
            decompose_minimal(target, np.random.default_rng(7)).pulses
            for _ in range(3)
        ]
        assert len(set(repeat)) == 1

    def test_rejects_multi_qubit(self, rng):
        with pytest.raises(UnsupportedDimension):
            decompose_minimal(sample_uniform(2, rng), rng)

    def test_pulse_sequence_length(self):
        assert len(PulseSequence(("X90", "Y90"))) == 2


class TestSerialization:
    def test_text_round_trip(self, rng):
        for n in (1, 2, 3):
            element = sample_uniform(n, rng)
            assert CliffordElement.from_text(element.to_text()) == element

    def test_rejects_malformed_text(self):
        with pytest.raises(DataParseError):
            CliffordElement.from_text("nonsense")
        with pytest.raises(DataParseError):
            CliffordElement.from_text("c1:1:0")
        with pytest.raises(DataParseError):
            CliffordElement.from_text("c1:3,3:0")  # rows not symplectic

    def test_named_gate_unknown(self):
        with pytest.raises(KeyError):
            named_gate("T")
