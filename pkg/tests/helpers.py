"""Shared test oracles: Haar sampling, random CPTP channels, and exhaustive
sequence averages computed by direct enumeration."""

import itertools
import math

import numpy as np

from irbench.cliffords import compose_clifford, enumerate_group, inverse
from irbench.paulis import SuperOperator, pauli_matrices
from irbench.protocol import simulate_sequence


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def haar_state(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return psi / np.linalg.norm(psi)


def random_cptp(rng: np.random.Generator, n: int = 1, kraus: int = 2) -> SuperOperator:
    """Random CPTP channel from a Haar-ish isometry split into Kraus blocks."""
    d = 2**n
    z = rng.normal(size=(kraus * d, d)) + 1j * rng.normal(size=(kraus * d, d))
    isometry, _ = np.linalg.qr(z)
    ops = [isometry[r * d : (r + 1) * d, :] for r in range(kraus)]
    basis = pauli_matrices(n)
    matrix = np.zeros((d * d, d * d))
    for op in ops:
        conj = np.einsum("ab,jbc,dc->jad", op, basis, op.conj())
        matrix += np.real(np.einsum("iab,jba->ij", basis, conj)) / d
    return SuperOperator(matrix)


def exhaustive_standard_average(m: int, noise) -> float:
    """Mean survival over every standard sequence of length ``m``."""
    group = enumerate_group(noise.num_qubits)
    total = []
    for picks in itertools.product(group, repeat=m):
        composite = picks[0]
        for gate in picks[1:]:
            composite = compose_clifford(gate, composite)
        gates = list(picks) + [inverse(composite)]
        total.append(simulate_sequence(gates, noise))
    return math.fsum(total) / len(total)


def exhaustive_interleaved_average(m: int, target, noise) -> float:
    """Mean survival over every interleaved sequence of length ``m``."""
    group = enumerate_group(noise.num_qubits)
    total = []
    for picks in itertools.product(group, repeat=m):
        gates = []
        composite = None
        for gate in picks:
            gates.extend((gate, target))
            step = compose_clifford(target, gate)
            composite = step if composite is None else compose_clifford(step, composite)
        gates.append(inverse(composite))
        total.append(simulate_sequence(gates, noise, interleaved=True))
    return math.fsum(total) / len(total)
