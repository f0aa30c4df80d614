"""Physical error channels, gate-error assignment, SPAM and the first-order
validity diagnostic.

All constructors return trace-preserving transfer matrices with the first
row exactly ``(1, 0, ..., 0)``.  Complete positivity is not enforced on
every call; use ``SuperOperator.is_completely_positive`` where needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import paulis
from .cliffords import CliffordElement
from .errors import (
    ConfigError,
    DimensionMismatch,
    InvalidDistribution,
    InvalidEffect,
    InvalidState,
    OutOfRange,
    UnphysicalParameters,
)
from .paulis import PauliVector, SuperOperator


def depolarizing(p: float, d: int = 2) -> SuperOperator:
    """Channel ``rho -> p rho + (1 - p) I/d`` as ``diag(1, p, ..., p)``."""
    n = max(d.bit_length() - 1, 0)
    if d < 2 or 2**n != d:
        raise DimensionMismatch(f"dimension {d} is not 2^n")
    low = -1.0 / (d * d - 1.0)
    if not low <= p <= 1.0:
        raise OutOfRange(f"depolarizing parameter {p} outside CP range [{low:.6g}, 1]")
    diag = np.full(d * d, p)
    diag[0] = 1.0
    return SuperOperator(np.diag(diag))


def pauli_channel(probabilities) -> SuperOperator:
    """Channel applying each Pauli string with a fixed probability.

    The transfer matrix is diagonal with eigenvalues
    ``lambda_j = sum_k q_k (-1)^<j,k>`` where ``<j,k>`` is the symplectic
    product of the Pauli bit vectors (0 when the strings commute).
    """
    probs = np.asarray(probabilities, dtype=float)
    if probs.ndim != 1:
        raise InvalidDistribution("probabilities must be a flat vector")
    size = probs.size
    n = max((size.bit_length() - 1) // 2, 0)
    if size < 4 or 4**n != size:
        raise InvalidDistribution(f"length {size} is not d^2 for a qubit count")
    if probs.min() < 0.0:
        raise InvalidDistribution(f"negative probability {probs.min():.3e}")
    if abs(probs.sum() - 1.0) > 1e-12:
        raise InvalidDistribution(f"probabilities sum to {probs.sum():.15g}, not 1")
    bits = paulis.pauli_bits(n).astype(np.int64)
    x, z = bits[:, :n], bits[:, n:]
    anticommute = (x @ z.T + z @ x.T) % 2
    eigenvalues = (1.0 - 2.0 * anticommute) @ probs
    eigenvalues[0] = 1.0
    return SuperOperator(np.diag(eigenvalues))


def overrotation(axis: str, epsilon: float) -> SuperOperator:
    """Unitary miscalibration channel ``exp(-i epsilon sigma_axis / 2)``."""
    return paulis.ptm_from_unitary(paulis.rotation_unitary(axis, epsilon))


def damping(t1: float, t2: float, t_gate: float) -> SuperOperator:
    """Single-qubit amplitude plus phase damping over a gate of duration
    ``t_gate``: X/Y components decay as ``exp(-t/T2)``, the Z component as
    ``exp(-t/T1)`` with the population feeding toward the ground state."""
    if t1 <= 0.0 or t2 <= 0.0:
        raise UnphysicalParameters("T1 and T2 must be positive")
    if t2 > 2.0 * t1 + 1e-18:
        raise UnphysicalParameters(f"T2 = {t2:g} exceeds 2*T1 = {2 * t1:g}")
    if t_gate < 0.0:
        raise UnphysicalParameters("gate duration must be nonnegative")
    ex = math.exp(-t_gate / t2)
    ez = math.exp(-t_gate / t1)
    matrix = np.diag([1.0, ex, ex, ez])
    matrix[3, 0] = 1.0 - ez
    return SuperOperator(matrix)


def spam_pair(
    prep_error: SuperOperator,
    meas_error: SuperOperator,
    ideal_state: PauliVector | None = None,
    ideal_effect: PauliVector | None = None,
) -> tuple[PauliVector, PauliVector]:
    """Noisy preparation/measurement pair for given error channels.

    The state is the prepared ideal passed through ``prep_error``; the
    effect is the ideal effect pulled back through the adjoint of
    ``meas_error`` (Heisenberg picture), so survival probabilities computed
    with the pair match inserting the errors around an ideal experiment.
    """
    n = prep_error.n
    if meas_error.n != n:
        raise DimensionMismatch("preparation and measurement errors differ in size")
    if ideal_state is None:
        ideal_state = paulis.basis_state(n)
    if ideal_effect is None:
        ideal_effect = paulis.basis_effect(n)
    prep_error.require_trace_preserving()
    prep = paulis.apply(prep_error, ideal_state)
    meas = paulis.apply(meas_error.adjoint(), ideal_effect)
    if abs(prep.trace() - 1.0) > 1e-9:
        raise InvalidState("preparation error does not preserve the state trace")
    if meas.trace() < -1e-9 or meas.trace() > 2**n + 1e-9:
        raise InvalidEffect("measurement effect trace left [0, d]")
    return prep, meas


class NoiseModel:
    """Assignment of error channels to gates plus SPAM.

    ``gate_error`` is the default error attached to every Clifford;
    ``per_gate`` overrides it for specific elements, keyed by conjugation
    action.  ``interleaved_error`` is the error of the gate under test and
    is only consulted by interleaved sequences.  Instances are immutable
    and safe to share between simulation workers.
    """

    def __init__(
        self,
        num_qubits: int,
        gate_error: SuperOperator | None = None,
        interleaved_error: SuperOperator | None = None,
        prep: PauliVector | None = None,
        meas: PauliVector | None = None,
        per_gate: Mapping[CliffordElement, SuperOperator] | None = None,
    ) -> None:
        if num_qubits < 1:
            raise DimensionMismatch("noise model needs at least one qubit")
        self.num_qubits = num_qubits
        identity = SuperOperator.identity(num_qubits)
        self.gate_error = gate_error if gate_error is not None else identity
        self.interleaved_error = (
            interleaved_error if interleaved_error is not None else identity
        )
        self.prep = prep if prep is not None else paulis.basis_state(num_qubits)
        self.meas = meas if meas is not None else paulis.basis_effect(num_qubits)
        self.per_gate = dict(per_gate) if per_gate else {}

        for channel in (self.gate_error, self.interleaved_error, *self.per_gate.values()):
            if channel.n != num_qubits:
                raise DimensionMismatch("channel qubit count differs from model")
            channel.require_trace_preserving()
        for element in self.per_gate:
            if element.n != num_qubits:
                raise DimensionMismatch("per-gate key qubit count differs from model")
        if self.prep.n != num_qubits or self.meas.n != num_qubits:
            raise DimensionMismatch("SPAM vector qubit count differs from model")
        if abs(self.prep.trace() - 1.0) > 1e-9:
            raise InvalidState("preparation vector is not trace one")
        if self.meas.trace() < -1e-9 or self.meas.trace() > 2**num_qubits + 1e-9:
            raise InvalidEffect("measurement effect trace left [0, d]")

    @classmethod
    def ideal(cls, num_qubits: int = 1) -> "NoiseModel":
        return cls(num_qubits)

    @classmethod
    def uniform(
        cls,
        gate_error: SuperOperator,
        interleaved_error: SuperOperator | None = None,
        prep: PauliVector | None = None,
        meas: PauliVector | None = None,
    ) -> "NoiseModel":
        """Model with one error channel shared by all Cliffords."""
        return cls(
            gate_error.n,
            gate_error=gate_error,
            interleaved_error=interleaved_error,
            prep=prep,
            meas=meas,
        )

    def error_for(self, element: CliffordElement) -> SuperOperator:
        return self.per_gate.get(element, self.gate_error)

    def with_interleaved_error(self, channel: SuperOperator) -> "NoiseModel":
        return NoiseModel(
            self.num_qubits,
            gate_error=self.gate_error,
            interleaved_error=channel,
            prep=self.prep,
            meas=self.meas,
            per_gate=self.per_gate,
        )


@dataclass(frozen=True)
class GammaDiagnostic:
    """Average per-gate deviation from the mean error channel.

    ``max_valid_m`` is the largest sequence length satisfying
    ``gamma^2 < 2 / (m (m + 1))``; ``None`` means no finite limit.  The
    Frobenius norm of the transfer-matrix difference is used as a
    computable proxy norm, so the resulting validity range is advisory.
    """

    gamma: float
    max_valid_m: int | None

    def is_valid_for(self, m: int) -> bool:
        if m < 1:
            raise OutOfRange("sequence length must be at least 1")
        return self.gamma**2 < 2.0 / (m * (m + 1))


def gamma_variation(model: NoiseModel, group) -> GammaDiagnostic:
    """Mean Frobenius deviation of per-gate errors over a gate set."""
    matrices = [model.error_for(element).matrix for element in group]
    if not matrices:
        raise ValueError("gate set must be non-empty")
    if all(np.array_equal(m, matrices[0]) for m in matrices):
        return GammaDiagnostic(gamma=0.0, max_valid_m=None)
    mean = np.mean(matrices, axis=0)
    gamma = float(np.mean([np.linalg.norm(m - mean) for m in matrices]))
    if gamma <= 0.0:
        return GammaDiagnostic(gamma=0.0, max_valid_m=None)
    limit = int((-1.0 + math.sqrt(1.0 + 8.0 / gamma**2)) / 2.0)
    while limit >= 1 and not gamma**2 < 2.0 / (limit * (limit + 1)):
        limit -= 1
    while gamma**2 < 2.0 / ((limit + 1) * (limit + 2)):
        limit += 1
    return GammaDiagnostic(gamma=gamma, max_valid_m=max(limit, 0))


def channel_from_config(spec: Mapping, num_qubits: int) -> SuperOperator:
    """Build a channel from a configuration mapping.

    Supported forms::

        {"type": "identity"}
        {"type": "depolarizing", "p": 0.99}
        {"type": "pauli", "probabilities": [...]}
        {"type": "overrotation", "axis": "X", "epsilon": 0.157}
        {"type": "damping", "t1": 5e-6, "t2": 3.2e-6, "t_gate": 3.75e-8}
        {"type": "compose", "channels": [...]}  # applied first-to-last

    Raises ``ConfigError`` for unknown types or missing parameters.
    """
    try:
        kind = spec["type"]
    except (KeyError, TypeError) as exc:
        raise ConfigError("channel config needs a 'type' key") from exc
    d = 2**num_qubits
    try:
        if kind == "identity":
            return SuperOperator.identity(num_qubits)
        if kind == "depolarizing":
            return depolarizing(float(spec["p"]), d)
        if kind == "pauli":
            return pauli_channel(spec["probabilities"])
        if kind == "overrotation":
            if num_qubits != 1:
                raise ConfigError("overrotation channels are single qubit")
            return overrotation(str(spec["axis"]).upper(), float(spec["epsilon"]))
        if kind == "damping":
            if num_qubits != 1:
                raise ConfigError("damping channels are single qubit")
            return damping(float(spec["t1"]), float(spec["t2"]), float(spec["t_gate"]))
        if kind == "compose":
            parts = [channel_from_config(part, num_qubits) for part in spec["channels"]]
            if not parts:
                raise ConfigError("compose channel needs at least one part")
            result = parts[0]
            for part in parts[1:]:
                result = paulis.compose(part, result)
            return result
    except KeyError as exc:
        raise ConfigError(f"channel config {kind!r} is missing {exc}") from exc
    raise ConfigError(f"unknown channel type {kind!r}")
