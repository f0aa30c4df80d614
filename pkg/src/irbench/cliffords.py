"""Exact Clifford-group arithmetic on binary symplectic tableaus.

An ``n``-qubit element is stored by its conjugation action on the ``2n``
Pauli generators ``X_0..X_{n-1}, Z_0..Z_{n-1}``: row ``k`` of ``tableau``
holds the ``(x|z)`` bit vector of the image of generator ``k`` and
``phases[k]`` its sign bit, i.e.

    U G_k U+  =  (-1)^phases[k] * P(tableau[k])

with ``P(v)`` the Hermitian Pauli string with bit vector ``v``.  Elements
are identified by their conjugation action, so global phases never enter.
Composition, inversion, enumeration and uniform sampling stay in integer
arithmetic throughout (composition and inversion cost ``O(n^3)`` bit
operations).

Tableaus are valid exactly when they are symplectic with respect to
``Omega = [[0, I], [I, 0]]`` over GF(2); any sign vector is then admissible,
giving group orders ``24`` for one qubit and ``11520`` for two.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import paulis
from .errors import DataParseError, DimensionMismatch, UnsupportedDimension
from .paulis import SuperOperator

#: When True, every compose/inverse re-verifies the symplectic invariant.
VALIDATE = False

#: Physical pulse generators: identity plus the six X/Y rotations.
PULSE_LABELS = ("I", "X90", "X-90", "X180", "Y90", "Y-90", "Y180")

_GROUP_ORDER = {1: 24, 2: 11520}


@lru_cache(maxsize=None)
def symplectic_form(n: int) -> np.ndarray:
    omega = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    omega[:n, n:] = np.eye(n, dtype=np.uint8)
    omega[n:, :n] = np.eye(n, dtype=np.uint8)
    omega.flags.writeable = False
    return omega


def _is_symplectic(tableau: np.ndarray) -> bool:
    n = tableau.shape[0] // 2
    omega = symplectic_form(n).astype(np.int64)
    t = tableau.astype(np.int64)
    return np.array_equal((t @ omega @ t.T) % 2, omega)


def _conjugate_rows(
    tableau: np.ndarray, phases: np.ndarray, rows: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Images of the Hermitian Paulis ``P(rows[k])`` under the conjugation.

    Returns ``(out_rows, signs)`` with ``signs[k]`` the sign bit of the
    ``k``-th image.  The phase bookkeeping tracks the i-power of the
    ``X^x Z^z`` word through the generator-image product and re-normalizes
    to the Hermitian convention ``P(v) = i^(x.z) X^x Z^z``.
    """
    t = tableau.astype(np.int64)
    v = np.atleast_2d(rows).astype(np.int64)
    n = t.shape[0] // 2
    out = (v @ t) % 2
    row_self = 2 * phases.astype(np.int64) + np.sum(t[:, :n] * t[:, n:], axis=1)
    # Commutation corrections from reordering Z parts past X parts when
    # multiplying the selected generator images in ascending order.
    cross = np.triu(t[:, n:] @ t[:, :n].T, 1)
    sigma = v @ row_self + 2 * np.einsum("kj,jl,kl->k", v, cross, v)
    tau = (
        np.sum(v[:, :n] * v[:, n:], axis=1)
        + sigma
        - np.sum(out[:, :n] * out[:, n:], axis=1)
    ) % 4
    assert not np.any(tau & 1), "conjugation produced a non-Hermitian image"
    return out.astype(np.uint8), (tau >> 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class CliffordElement:
    tableau: np.ndarray
    phases: np.ndarray

    def __post_init__(self) -> None:
        tableau = np.array(self.tableau, dtype=np.uint8) % 2
        phases = np.array(self.phases, dtype=np.uint8) % 2
        if tableau.ndim != 2 or tableau.shape[0] != tableau.shape[1]:
            raise DimensionMismatch("tableau must be a square matrix")
        size = tableau.shape[0]
        if size < 2 or size % 2:
            raise DimensionMismatch(f"tableau side {size} is not 2n")
        if phases.shape != (size,):
            raise DimensionMismatch("phase vector length must match tableau side")
        if VALIDATE and not _is_symplectic(tableau):
            raise ValueError("tableau is not symplectic over GF(2)")
        tableau.flags.writeable = False
        phases.flags.writeable = False
        object.__setattr__(self, "tableau", tableau)
        object.__setattr__(self, "phases", phases)

    @property
    def n(self) -> int:
        return self.tableau.shape[0] // 2

    def key(self) -> bytes:
        return self.tableau.tobytes() + self.phases.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"CliffordElement.from_text({self.to_text()!r})"

    @classmethod
    def identity(cls, n: int) -> "CliffordElement":
        return cls(np.eye(2 * n, dtype=np.uint8), np.zeros(2 * n, dtype=np.uint8))

    def is_identity(self) -> bool:
        return bool(
            np.array_equal(self.tableau, np.eye(2 * self.n, dtype=np.uint8))
            and not self.phases.any()
        )

    @classmethod
    def from_unitary(cls, unitary: np.ndarray) -> "CliffordElement":
        """Element with the same conjugation action as a Clifford unitary."""
        rep = paulis.ptm_from_unitary(unitary)
        n = rep.n
        if n > 3:
            raise UnsupportedDimension("dense conversion is limited to n <= 3")
        matrix = rep.matrix
        if np.max(np.abs(np.abs(matrix) - np.round(np.abs(matrix)))) > 1e-9:
            raise ValueError("unitary is not a Clifford operation")
        bits = paulis.pauli_bits(n)
        rows = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        signs = np.zeros(2 * n, dtype=np.uint8)
        for k in range(2 * n):
            gen = np.zeros(2 * n, dtype=np.uint8)
            gen[k] = 1
            col = int(paulis.pauli_indices_from_bits(gen)[0])
            image = matrix[:, col]
            hits = np.nonzero(np.abs(image) > 0.5)[0]
            if hits.size != 1 or abs(abs(image[hits[0]]) - 1.0) > 1e-9:
                raise ValueError("unitary is not a Clifford operation")
            rows[k] = bits[hits[0]]
            signs[k] = 1 if image[hits[0]] < 0 else 0
        return cls(rows, signs)

    def to_superoperator(self) -> SuperOperator:
        """Signed permutation transfer matrix of the conjugation channel."""
        n = self.n
        if n > 3:
            raise UnsupportedDimension("dense transfer matrices are limited to n <= 3")
        bits = paulis.pauli_bits(n)
        out_rows, signs = _conjugate_rows(self.tableau, self.phases, bits)
        out_idx = paulis.pauli_indices_from_bits(out_rows)
        matrix = np.zeros((4**n, 4**n))
        matrix[out_idx, np.arange(4**n)] = 1.0 - 2.0 * signs
        return SuperOperator(matrix)

    def to_text(self) -> str:
        """Hex text form ``c<n>:<row hex,...>:<phase hex>`` (LSB = column 0)."""
        rows = [
            format(int(sum(int(b) << j for j, b in enumerate(row))), "x")
            for row in self.tableau
        ]
        ph = format(int(sum(int(b) << j for j, b in enumerate(self.phases))), "x")
        return f"c{self.n}:{','.join(rows)}:{ph}"

    @classmethod
    def from_text(cls, text: str) -> "CliffordElement":
        try:
            head, row_part, ph_part = text.strip().split(":")
            if not head.startswith("c"):
                raise ValueError("missing 'c' prefix")
            n = int(head[1:])
            row_vals = [int(tok, 16) for tok in row_part.split(",")]
            ph_val = int(ph_part, 16)
        except ValueError as exc:
            raise DataParseError(f"malformed Clifford text {text!r}: {exc}") from exc
        if n < 1 or len(row_vals) != 2 * n:
            raise DataParseError(f"expected {2 * n} tableau rows in {text!r}")
        tableau = np.array(
            [[(val >> j) & 1 for j in range(2 * n)] for val in row_vals],
            dtype=np.uint8,
        )
        phases = np.array([(ph_val >> j) & 1 for j in range(2 * n)], dtype=np.uint8)
        if not _is_symplectic(tableau):
            raise DataParseError(f"tableau in {text!r} is not symplectic")
        return cls(tableau, phases)


def identity(n: int) -> CliffordElement:
    return CliffordElement.identity(n)


def compose_clifford(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    """Element implementing ``b`` first, then ``a`` (product ``U_a U_b``)."""
    if a.n != b.n:
        raise DimensionMismatch(f"cannot compose elements on {a.n} and {b.n} qubits")
    out_rows, signs = _conjugate_rows(a.tableau, a.phases, b.tableau)
    result = CliffordElement(out_rows, signs ^ b.phases)
    if VALIDATE and not _is_symplectic(result.tableau):
        raise ValueError("composition broke the symplectic invariant")
    return result


def inverse(a: CliffordElement) -> CliffordElement:
    """Group inverse; ``compose_clifford(inverse(a), a)`` is the identity."""
    omega = symplectic_form(a.n).astype(np.int64)
    t_inv = (omega @ a.tableau.T.astype(np.int64) @ omega) % 2
    candidate = CliffordElement(t_inv.astype(np.uint8), np.zeros(2 * a.n, np.uint8))
    # Residual signs of candidate o a are linear in the candidate's phase
    # bits through a's tableau; solve for the bits that cancel them.
    delta = compose_clifford(candidate, a).phases
    phases = (t_inv @ delta.astype(np.int64)) % 2
    result = CliffordElement(candidate.tableau, phases.astype(np.uint8))
    if VALIDATE and not compose_clifford(result, a).is_identity():
        raise ValueError("inversion failed to produce a group inverse")
    return result


# ---------------------------------------------------------------------------
# Enumeration for n <= 2


def _closure_generators(n: int) -> list[np.ndarray]:
    if n == 1:
        hadamard = np.array([[0, 1], [1, 0]], dtype=np.uint8)
        phase = np.array([[1, 1], [0, 1]], dtype=np.uint8)
        return [hadamard, phase]
    gens = []
    for q in range(2):
        h = np.eye(4, dtype=np.uint8)
        h[[q, q + 2]] = h[[q + 2, q]]
        gens.append(h)
        s = np.eye(4, dtype=np.uint8)
        s[q, q + 2] = 1
        gens.append(s)
    cnot = np.eye(4, dtype=np.uint8)
    cnot[0, 1] = 1  # X_0 -> X_0 X_1
    cnot[3, 2] = 1  # Z_1 -> Z_0 Z_1
    gens.append(cnot)
    return gens


@lru_cache(maxsize=None)
def _symplectic_closure(n: int) -> tuple[np.ndarray, ...]:
    gens = _closure_generators(n)
    seen = {}
    frontier = [np.eye(2 * n, dtype=np.uint8)]
    seen[frontier[0].tobytes()] = frontier[0]
    while frontier:
        nxt = []
        for mat in frontier:
            for gen in gens:
                prod = (mat.astype(np.int64) @ gen) % 2
                prod = prod.astype(np.uint8)
                key = prod.tobytes()
                if key not in seen:
                    seen[key] = prod
                    nxt.append(prod)
        frontier = nxt
    ordered = [seen[key] for key in sorted(seen)]
    expected = _symplectic_group_order(n)
    assert len(ordered) == expected, f"closure found {len(ordered)} != {expected}"
    for mat in ordered:
        mat.flags.writeable = False
    return tuple(ordered)


@lru_cache(maxsize=None)
def enumerate_group(n: int) -> tuple[CliffordElement, ...]:
    """The full group for ``n <= 2``, modulo global phase, in a fixed order."""
    if n not in (1, 2):
        raise UnsupportedDimension("exact enumeration is limited to n <= 2")
    elements = []
    for tab in _symplectic_closure(n):
        for bits in range(1 << (2 * n)):
            phases = np.array([(bits >> j) & 1 for j in range(2 * n)], dtype=np.uint8)
            elements.append(CliffordElement(tab, phases))
    assert len(elements) == _GROUP_ORDER[n]
    return tuple(elements)


@dataclass(frozen=True)
class GroupTables:
    """Index-arithmetic view of the enumerated single-qubit group."""

    elements: tuple[CliffordElement, ...]
    index: dict
    mult: np.ndarray
    inverse: np.ndarray
    identity_index: int
    superoperators: np.ndarray

    def index_of(self, element: CliffordElement) -> int:
        return self.index[element]


@lru_cache(maxsize=None)
def group_tables(n: int) -> GroupTables:
    """Multiplication/inverse/transfer-matrix tables; only ``n == 1`` is dense
    enough to precompute."""
    if n != 1:
        raise UnsupportedDimension("group tables are precomputed only for n == 1")
    elements = enumerate_group(1)
    index = {element: i for i, element in enumerate(elements)}
    size = len(elements)
    mult = np.zeros((size, size), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            mult[i, j] = index[compose_clifford(a, b)]
    inv = np.zeros(size, dtype=np.int64)
    for i, a in enumerate(elements):
        inv[i] = index[inverse(a)]
    supers = np.stack([element.to_superoperator().matrix for element in elements])
    mult.flags.writeable = False
    inv.flags.writeable = False
    supers.flags.writeable = False
    return GroupTables(
        elements=elements,
        index=index,
        mult=mult,
        inverse=inv,
        identity_index=index[CliffordElement.identity(1)],
        superoperators=supers,
    )


# ---------------------------------------------------------------------------
# Uniform sampling

# Koenig/Smolin canonical indexing of Sp(2n, GF(2)): every integer in
# [0, |Sp|) maps bijectively to a group element, so a uniform index gives a
# uniform matrix.  The construction below works in the direct-sum pairing
# (qubit q occupies coordinates 2q, 2q+1) and is converted to the (x|z)
# block convention at the end.


def _symplectic_group_order(n: int) -> int:
    order = 1
    for j in range(1, n + 1):
        order *= (1 << (2 * j - 1)) * ((1 << (2 * j)) - 1)
    return order


def clifford_group_order(n: int) -> int:
    """Number of distinct elements modulo global phase."""
    return (1 << (2 * n)) * _symplectic_group_order(n)


def _ds_inner(v: np.ndarray, w: np.ndarray) -> int:
    return int((v[0::2] @ w[1::2] + v[1::2] @ w[0::2]) % 2)


def _transvect(h: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (v + _ds_inner(h, v) * h) % 2


def _bits_of(value: int, width: int) -> np.ndarray:
    return np.array([(value >> j) & 1 for j in range(width)], dtype=np.int64)


def _find_transvection(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectors ``h1, h2`` with ``y = Z_h1 Z_h2 x`` for nonzero ``x, y``."""
    zero = np.zeros_like(x)
    if np.array_equal(x, y):
        return zero, zero
    if _ds_inner(x, y) == 1:
        return (x + y) % 2, zero
    z = np.zeros_like(x)
    for q in range(x.size // 2):
        a, b = 2 * q, 2 * q + 1
        if (x[a] or x[b]) and (y[a] or y[b]):
            z[a] = (x[a] + y[a]) % 2
            z[b] = (x[b] + y[b]) % 2
            if z[a] == 0 and z[b] == 0:
                z[b] = 1
                if x[a] != x[b]:
                    z[a] = 1
            return (x + z) % 2, (y + z) % 2
    for q in range(x.size // 2):
        a, b = 2 * q, 2 * q + 1
        if (x[a] or x[b]) and not (y[a] or y[b]):
            if x[a] == x[b]:
                z[b] = 1
            else:
                z[b] = x[a]
                z[a] = x[b]
            break
    for q in range(x.size // 2):
        a, b = 2 * q, 2 * q + 1
        if not (x[a] or x[b]) and (y[a] or y[b]):
            if y[a] == y[b]:
                z[b] = 1
            else:
                z[b] = y[a]
                z[a] = y[b]
            break
    return (x + z) % 2, (y + z) % 2


def _symplectic_from_index(index: int, n: int) -> np.ndarray:
    nn = 2 * n
    span = (1 << nn) - 1
    k = (index % span) + 1
    index //= span
    f1 = _bits_of(k, nn)
    e1 = np.zeros(nn, dtype=np.int64)
    e1[0] = 1
    t1, t2 = _find_transvection(e1, f1)
    bits = _bits_of(index % (1 << (nn - 1)), nn - 1)
    eprime = e1.copy()
    for j in range(2, nn):
        eprime[j] = bits[j - 1]
    h0 = _transvect(t2, _transvect(t1, eprime))
    if bits[0]:
        f1 = np.zeros_like(f1)
    if n == 1:
        g = np.eye(2, dtype=np.int64)
    else:
        g = np.zeros((nn, nn), dtype=np.int64)
        g[:2, :2] = np.eye(2, dtype=np.int64)
        g[2:, 2:] = _symplectic_from_index(index >> (nn - 1), n - 1)
    for j in range(nn):
        row = _transvect(t2, _transvect(t1, g[j]))
        row = _transvect(h0, row)
        g[j] = _transvect(f1, row)
    return g


def _directsum_to_standard(matrix: np.ndarray) -> np.ndarray:
    n = matrix.shape[0] // 2
    perm = np.empty(2 * n, dtype=np.int64)
    perm[:n] = 2 * np.arange(n)
    perm[n:] = 2 * np.arange(n) + 1
    return matrix[np.ix_(perm, perm)]


def _uniform_below(bound: int, rng: np.random.Generator) -> int:
    nbits = bound.bit_length()
    nwords = (nbits + 31) // 32
    mask = (1 << nbits) - 1
    while True:
        value = 0
        for word in rng.integers(0, 1 << 32, size=nwords, dtype=np.uint64):
            value = (value << 32) | int(word)
        value &= mask
        if value < bound:
            return value


def random_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random symplectic matrix in the ``(x|z)`` block convention."""
    index = _uniform_below(_symplectic_group_order(n), rng)
    return _directsum_to_standard(_symplectic_from_index(index, n)).astype(np.uint8)


def sample_uniform(n: int, rng: np.random.Generator) -> CliffordElement:
    """Uniformly random element; exact table draw for ``n <= 2``, random
    symplectic matrix plus independent sign bits otherwise."""
    if n < 1:
        raise UnsupportedDimension("n must be at least 1")
    if n <= 2:
        table = enumerate_group(n)
        return table[int(rng.integers(len(table)))]
    tableau = random_symplectic(n, rng)
    phases = rng.integers(0, 2, size=2 * n, dtype=np.uint8)
    return CliffordElement(tableau, phases)


# ---------------------------------------------------------------------------
# Named gates and minimal pulse decomposition


@lru_cache(maxsize=None)
def _named_gate_table() -> dict:
    half_pi = np.pi / 2.0
    table = {
        "I": np.eye(2, dtype=complex),
        "X90": paulis.rotation_unitary("X", half_pi),
        "X-90": paulis.rotation_unitary("X", -half_pi),
        "X180": paulis.rotation_unitary("X", np.pi),
        "Y90": paulis.rotation_unitary("Y", half_pi),
        "Y-90": paulis.rotation_unitary("Y", -half_pi),
        "Y180": paulis.rotation_unitary("Y", np.pi),
        "Z90": paulis.rotation_unitary("Z", half_pi),
        "Z-90": paulis.rotation_unitary("Z", -half_pi),
        "Z180": paulis.rotation_unitary("Z", np.pi),
        "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
        "S": np.diag([1.0, 1.0j]),
        "SDG": np.diag([1.0, -1.0j]),
        "CNOT": np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        ),
        "CZ": np.diag([1.0, 1.0, 1.0, -1.0]),
        "SWAP": np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        ),
    }
    return {name: CliffordElement.from_unitary(u) for name, u in table.items()}


def named_gate(name: str) -> CliffordElement:
    """Look up a common gate by name (``X90``, ``H``, ``CNOT``, ...)."""
    table = _named_gate_table()
    key = name.strip().upper()
    if key not in table:
        raise KeyError(f"unknown gate name {name!r}; known: {sorted(table)}")
    return table[key]


@dataclass(frozen=True)
class PulseSequence:
    """Ordered pulse labels whose product implements a Clifford element."""

    pulses: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.pulses)

    def to_element(self) -> CliffordElement:
        element = named_gate(self.pulses[0])
        for label in self.pulses[1:]:
            element = compose_clifford(named_gate(label), element)
        return element


@lru_cache(maxsize=None)
def _minimal_words() -> dict:
    """All minimal pulse words per single-qubit element, by breadth-first
    search over the physical generator set (the identity element keeps its
    one-pulse word ``I``)."""
    words: dict[CliffordElement, tuple[tuple[str, ...], ...]] = {}
    frontier: dict[CliffordElement, list[tuple[str, ...]]] = {}
    for label in PULSE_LABELS:
        element = named_gate(label)
        frontier.setdefault(element, []).append((label,))
    while True:
        for element, found in frontier.items():
            words[element] = tuple(found)
        if len(words) == len(enumerate_group(1)):
            break
        nxt: dict[CliffordElement, list[tuple[str, ...]]] = {}
        for element, found in frontier.items():
            for label in PULSE_LABELS[1:]:
                extended = compose_clifford(named_gate(label), element)
                if extended in words:
                    continue
                nxt.setdefault(extended, []).extend(w + (label,) for w in found)
        frontier = nxt
    return words


def decompose_minimal(
    element: CliffordElement, rng: np.random.Generator | None = None
) -> PulseSequence:
    """A minimal-length pulse word for a single-qubit element.

    When several minimal words exist one is chosen uniformly at random from
    the precomputed set, so repeated draws with a seeded generator are
    reproducible.
    """
    if element.n != 1:
        raise UnsupportedDimension("pulse decomposition is defined for n == 1")
    if rng is None:
        rng = np.random.default_rng()
    options = _minimal_words()[element]
    return PulseSequence(options[int(rng.integers(len(options)))])


def decomposition_length_histogram() -> dict[int, int]:
    """Minimal pulse-word length distribution over the 24 elements."""
    histogram: dict[int, int] = {}
    for options in _minimal_words().values():
        length = len(options[0])
        histogram[length] = histogram.get(length, 0) + 1
    return dict(sorted(histogram.items()))
