"""Channel and state algebra in the normalized Pauli (Liouville) basis.

Hermitian operators are expanded over the orthonormal basis ``P_i / sqrt(d)``
where the ``d^2`` Pauli strings ``P_i`` are ordered lexicographically as
``(I, X, Y, Z)^(tensor n)`` and ``d = 2^n``.  In this convention a density
matrix has identity coefficient ``1/sqrt(d)``, channels are real
``d^2 x d^2`` matrices acting on coefficient vectors, and the Born rule
``Tr[E rho]`` is a plain dot product of the two coefficient vectors.

All types are immutable after construction and all operations are pure
functions, so values can be shared freely across threads.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from math import cos, sin

import numpy as np

from .errors import (
    DataParseError,
    DimensionMismatch,
    InvalidEffect,
    InvalidState,
    NonUnitaryInput,
    NotTracePreserving,
)

#: Tolerance for structural checks (trace preservation, unitarity).
STRUCTURAL_ATOL = 1e-10
#: Tolerance for exact-algebra assertions (twirl form, fidelity identities).
EXACT_ATOL = 1e-12

_EIG_ATOL = 1e-9

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# Axis digit of a single-qubit Pauli indexed by its (x, z) bits; the digit
# order (I, X, Y, Z) fixes the lexicographic basis ordering.
_AXIS_FROM_XZ = np.array([[0, 3], [1, 2]], dtype=np.int64)


def _qubits_from_basis_size(size: int) -> int:
    n = max((size.bit_length() - 1) // 2, 0)
    if size < 4 or 4**n != size:
        raise DimensionMismatch(f"basis size {size} is not 4^n for integer n >= 1")
    return n


@lru_cache(maxsize=None)
def pauli_labels(n: int) -> tuple[str, ...]:
    """Pauli-string labels for ``n`` qubits in lexicographic order."""
    return tuple("".join(t) for t in itertools.product("IXYZ", repeat=n))


@lru_cache(maxsize=None)
def pauli_matrices(n: int) -> np.ndarray:
    """All ``d^2`` unnormalized Pauli strings as a ``(d^2, d, d)`` array."""
    mats = []
    for label in pauli_labels(n):
        m = np.array([[1.0 + 0.0j]])
        for ch in label:
            m = np.kron(m, _SINGLE[ch])
        mats.append(m)
    out = np.array(mats)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def pauli_bits(n: int) -> np.ndarray:
    """Binary ``(x|z)`` representation of each Pauli string, ``(d^2, 2n)``."""
    out = np.zeros((4**n, 2 * n), dtype=np.uint8)
    for idx in range(4**n):
        rem = idx
        for q in range(n - 1, -1, -1):
            axis = rem % 4
            rem //= 4
            out[idx, q] = 1 if axis in (1, 2) else 0
            out[idx, n + q] = 1 if axis in (2, 3) else 0
    out.flags.writeable = False
    return out


def pauli_indices_from_bits(bits: np.ndarray) -> np.ndarray:
    """Lexicographic Pauli indices for rows of ``(x|z)`` bit vectors."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.int64))
    n = bits.shape[1] // 2
    digits = _AXIS_FROM_XZ[bits[:, :n], bits[:, n:]]
    powers = 4 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return digits @ powers


def rotation_unitary(axis: str, angle: float) -> np.ndarray:
    """Single-qubit rotation ``exp(-i * angle * sigma_axis / 2)``."""
    if axis not in ("X", "Y", "Z"):
        raise ValueError(f"unknown rotation axis {axis!r}")
    sigma = _SINGLE[axis]
    return cos(angle / 2.0) * np.eye(2) - 1.0j * sin(angle / 2.0) * sigma


def _freeze(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class PauliVector:
    """Real expansion coefficients of a Hermitian operator over ``P_i/sqrt(d)``."""

    coefficients: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.array(self.coefficients, dtype=float)
        if coeffs.ndim != 1:
            raise DimensionMismatch("coefficient vector must be one-dimensional")
        _qubits_from_basis_size(coeffs.size)
        object.__setattr__(self, "coefficients", _freeze(coeffs))

    @property
    def n(self) -> int:
        return _qubits_from_basis_size(self.coefficients.size)

    @property
    def dim(self) -> int:
        return 2**self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliVector):
            return NotImplemented
        return np.array_equal(self.coefficients, other.coefficients)

    @classmethod
    def from_matrix(cls, operator: np.ndarray) -> "PauliVector":
        """Expand a Hermitian matrix; raises ``ValueError`` if non-Hermitian."""
        op = np.asarray(operator, dtype=complex)
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise DimensionMismatch("operator must be a square matrix")
        d = op.shape[0]
        n = max(d.bit_length() - 1, 0)
        if d < 2 or 2**n != d:
            raise DimensionMismatch(f"operator dimension {d} is not 2^n")
        if not np.allclose(op, op.conj().T, atol=_EIG_ATOL):
            raise ValueError("operator is not Hermitian")
        basis = pauli_matrices(n)
        coeffs = np.real(np.einsum("iab,ba->i", basis, op)) / np.sqrt(d)
        return cls(coeffs)

    def to_matrix(self) -> np.ndarray:
        basis = pauli_matrices(self.n)
        return np.einsum("i,iab->ab", self.coefficients, basis) / np.sqrt(self.dim)

    def trace(self) -> float:
        return float(self.coefficients[0] * np.sqrt(self.dim))


def basis_state(n: int, bitstring: int = 0) -> PauliVector:
    """State vector of the computational basis projector ``|b><b|``."""
    bits = pauli_bits(n)
    x, z = bits[:, :n], bits[:, n:]
    b = np.array([(bitstring >> (n - 1 - q)) & 1 for q in range(n)], dtype=np.int64)
    coeffs = np.where(x.any(axis=1), 0.0, (-1.0) ** (z @ b)) / np.sqrt(2**n)
    return PauliVector(coeffs)


def basis_effect(n: int, bitstring: int = 0) -> PauliVector:
    """Measurement-effect vector of the projector ``|b><b|``."""
    return basis_state(n, bitstring)


def maximally_mixed(n: int) -> PauliVector:
    coeffs = np.zeros(4**n)
    coeffs[0] = 1.0 / np.sqrt(2**n)
    return PauliVector(coeffs)


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """A quantum channel as its real transfer matrix over ``P_i/sqrt(d)``.

    Unitary conjugations become orthogonal matrices, Clifford conjugations
    signed permutations, and trace-preserving maps have first row
    ``(1, 0, ..., 0)``.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch("transfer matrix must be square")
        _qubits_from_basis_size(mat.shape[0])
        object.__setattr__(self, "matrix", _freeze(mat))

    @property
    def n(self) -> int:
        return _qubits_from_basis_size(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return 2**self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SuperOperator):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    @classmethod
    def identity(cls, n: int) -> "SuperOperator":
        return cls(np.eye(4**n))

    def __matmul__(self, other: "SuperOperator") -> "SuperOperator":
        return compose(self, other)

    def apply(self, vector: PauliVector) -> PauliVector:
        return apply(self, vector)

    def adjoint(self) -> "SuperOperator":
        """Heisenberg-picture dual: ``Tr[E L(rho)] = Tr[L*(E) rho]``."""
        return SuperOperator(self.matrix.T)

    def is_trace_preserving(self, atol: float = STRUCTURAL_ATOL) -> bool:
        expected = np.zeros(self.matrix.shape[0])
        expected[0] = 1.0
        return bool(np.max(np.abs(self.matrix[0] - expected)) <= atol)

    def require_trace_preserving(self, atol: float = STRUCTURAL_ATOL) -> None:
        if not self.is_trace_preserving(atol):
            raise NotTracePreserving(
                "first transfer-matrix row deviates from (1, 0, ..., 0) "
                f"beyond {atol:g}"
            )

    def is_unital(self, atol: float = STRUCTURAL_ATOL) -> bool:
        expected = np.zeros(self.matrix.shape[0])
        expected[0] = 1.0
        return bool(np.max(np.abs(self.matrix[:, 0] - expected)) <= atol)

    def choi_matrix(self) -> np.ndarray:
        """Choi matrix ``(1/d) sum_ij R_ij P_j^T (x) P_i``; PSD iff CP."""
        d = self.dim
        basis = pauli_matrices(self.n)
        tensor = np.einsum("ij,jsr,iab->rasb", self.matrix, basis, basis)
        return tensor.reshape(d * d, d * d) / d

    def is_completely_positive(self, atol: float = _EIG_ATOL) -> bool:
        eigs = np.linalg.eigvalsh(self.choi_matrix())
        return bool(eigs.min() >= -atol)

    def to_json(self) -> str:
        return json.dumps(
            {"dimension": self.dim, "matrix": self.matrix.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "SuperOperator":
        try:
            payload = json.loads(text)
            d = int(payload["dimension"])
            matrix = np.array(payload["matrix"], dtype=float)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DataParseError(f"malformed transfer-matrix JSON: {exc}") from exc
        if matrix.shape != (d * d, d * d):
            raise DataParseError(
                f"matrix shape {matrix.shape} inconsistent with dimension {d}"
            )
        return cls(matrix)


@dataclass(frozen=True)
class FidelitySummary:
    """Consistent (average fidelity, depolarizing parameter, gate error) triple."""

    average_fidelity: float
    depolarizing_parameter: float
    gate_error: float

    @classmethod
    def from_depolarizing_parameter(cls, p: float, d: int) -> "FidelitySummary":
        fid = p + (1.0 - p) / d
        return cls(average_fidelity=fid, depolarizing_parameter=p, gate_error=1.0 - fid)


def ptm_from_unitary(unitary: np.ndarray) -> SuperOperator:
    """Transfer matrix of the conjugation channel ``rho -> U rho U+``."""
    u = np.asarray(unitary, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch("unitary must be a square matrix")
    d = u.shape[0]
    n = max(d.bit_length() - 1, 0)
    if d < 2 or 2**n != d:
        raise DimensionMismatch(f"unitary dimension {d} is not 2^n")
    deviation = np.max(np.abs(u.conj().T @ u - np.eye(d)))
    if deviation > STRUCTURAL_ATOL:
        raise NonUnitaryInput(f"U+U deviates from identity by {deviation:.3e}")
    basis = pauli_matrices(n)
    conjugated = np.einsum("ab,jbc,dc->jad", u, basis, u.conj())
    matrix = np.real(np.einsum("iab,jba->ij", basis, conjugated)) / d
    # Conjugation is exactly trace preserving; snap the float residue.
    matrix[0, :] = 0.0
    matrix[0, 0] = 1.0
    return SuperOperator(matrix)


def compose(outer: SuperOperator, inner: SuperOperator) -> SuperOperator:
    """Channel applying ``inner`` first, then ``outer``."""
    if outer.n != inner.n:
        raise DimensionMismatch(
            f"cannot compose channels on {outer.n} and {inner.n} qubits"
        )
    return SuperOperator(outer.matrix @ inner.matrix)


def apply(channel: SuperOperator, vector: PauliVector) -> PauliVector:
    if channel.n != vector.n:
        raise DimensionMismatch(
            f"channel on {channel.n} qubits cannot act on {vector.n}-qubit vector"
        )
    return PauliVector(channel.matrix @ vector.coefficients)


def _check_state(prep: PauliVector, validate: bool) -> None:
    if abs(prep.trace() - 1.0) > _EIG_ATOL:
        raise InvalidState(f"state trace {prep.trace():.6g} != 1")
    if validate:
        eigs = np.linalg.eigvalsh(prep.to_matrix())
        if eigs.min() < -_EIG_ATOL:
            raise InvalidState(f"state has negative eigenvalue {eigs.min():.3e}")


def _check_effect(meas: PauliVector, validate: bool) -> None:
    trace = meas.trace()
    if trace < -_EIG_ATOL or trace > meas.dim + _EIG_ATOL:
        raise InvalidEffect(f"effect trace {trace:.6g} outside [0, d]")
    if validate:
        eigs = np.linalg.eigvalsh(meas.to_matrix())
        if eigs.min() < -_EIG_ATOL or eigs.max() > 1.0 + _EIG_ATOL:
            raise InvalidEffect("effect eigenvalues outside [0, 1]")


def survival_probability(
    channel: SuperOperator,
    prep: PauliVector,
    meas: PauliVector,
    *,
    validate: bool = False,
) -> float:
    """Probability ``Tr[E S(rho)]`` that the measurement accepts the output.

    Cheap necessary conditions on ``prep`` and ``meas`` are always checked;
    the full eigenvalue validation is opt-in via ``validate`` to keep
    simulation loops fast.
    """
    if channel.n != prep.n or channel.n != meas.n:
        raise DimensionMismatch("channel, state and effect must share dimensions")
    _check_state(prep, validate)
    _check_effect(meas, validate)
    return float(meas.coefficients @ (channel.matrix @ prep.coefficients))


def average_fidelity(channel: SuperOperator) -> FidelitySummary:
    """Mean fidelity of output to input over Haar-random pure states.

    Uses the trace identity ``p = (Tr R - 1)/(d^2 - 1)`` valid for
    trace-preserving maps, from which the fidelity is ``p + (1 - p)/d``.
    """
    channel.require_trace_preserving()
    d = channel.dim
    p = (float(np.trace(channel.matrix)) - 1.0) / (d * d - 1.0)
    return FidelitySummary.from_depolarizing_parameter(p, d)


def twirl(channel: SuperOperator, group) -> SuperOperator:
    """Group-average ``mean_j C_j o channel o C_j+`` over a gate set.

    ``group`` may contain ``SuperOperator`` values or any objects exposing
    ``to_superoperator()`` (Clifford elements).  Over an exact unitary
    2-design the result is the depolarizing channel with the same average
    fidelity as the input.
    """
    members = list(group)
    if not members:
        raise ValueError("twirl group must be non-empty")
    acc = np.zeros_like(channel.matrix)
    for member in members:
        rep = member if isinstance(member, SuperOperator) else member.to_superoperator()
        if rep.n != channel.n:
            raise DimensionMismatch("group element dimension differs from channel")
        acc += rep.matrix @ channel.matrix @ rep.matrix.T
    return SuperOperator(acc / len(members))
