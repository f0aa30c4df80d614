"""Sequence synthesis and noisy simulation for standard and interleaved
randomized benchmarking.

Sequence length ``m`` counts random gates only.  A standard sequence holds
``m + 1`` gates (the last inverts the composition of the first ``m``); an
interleaved sequence holds ``2m + 1`` gates with the target in every even
slot and a final inversion of the full ideal product.  Noisy gates are
modeled as the ideal Clifford followed by its error channel, except the
interleaved target whose error precedes the ideal gate.

Every ``(m, k)`` cell draws from its own generator seeded by
``(master_seed, m, k)``, so datasets are reproducible under any parallel
schedule.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import cliffords
from .cliffords import CliffordElement, compose_clifford, group_tables, inverse
from .errors import ConfigError, DataParseError, OutOfRange, UnsupportedDimension
from .noise import NoiseModel

MODES = ("standard", "interleaved")


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmarking run: qubit count, length grid, replicates, mode."""

    num_qubits: int
    lengths: tuple[int, ...]
    sequences_per_length: int
    noise: NoiseModel
    seed: int
    mode: str = "standard"
    target: CliffordElement | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "lengths", tuple(int(m) for m in self.lengths))
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.lengths or self.lengths[0] < 1:
            raise ConfigError("lengths must be a non-empty list of integers >= 1")
        if any(b <= a for a, b in zip(self.lengths, self.lengths[1:])):
            raise ConfigError("lengths must be strictly increasing")
        if self.sequences_per_length < 1:
            raise ConfigError("sequences per length must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        if self.noise.num_qubits != self.num_qubits:
            raise ConfigError("noise model qubit count differs from experiment")
        if self.mode == "interleaved":
            if self.target is None:
                raise ConfigError("interleaved mode needs a target element")
            if self.target.n != self.num_qubits:
                raise ConfigError("target qubit count differs from experiment")


@dataclass(frozen=True)
class DecayPoint:
    length: int
    mean: float
    stderr: float
    num_sequences: int


@dataclass(frozen=True, eq=False)
class DecayDataset:
    """Averaged survival probabilities per sequence length.

    ``raw`` optionally retains the per-sequence survivals keyed by length,
    which bootstrap resampling requires.
    """

    mode: str
    points: tuple[DecayPoint, ...]
    raw: dict | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise DataParseError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def lengths(self) -> np.ndarray:
        return np.array([pt.length for pt in self.points], dtype=float)

    @property
    def means(self) -> np.ndarray:
        return np.array([pt.mean for pt in self.points])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([pt.stderr for pt in self.points])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DecayDataset):
            return NotImplemented
        if self.mode != other.mode or self.points != other.points:
            return False
        if (self.raw is None) != (other.raw is None):
            return False
        if self.raw is not None:
            if sorted(self.raw) != sorted(other.raw):
                return False
            return all(
                np.array_equal(self.raw[m], other.raw[m]) for m in self.raw
            )
        return True

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["m", "mean", "stderr", "K", "mode"])
        for pt in self.points:
            writer.writerow(
                [pt.length, repr(pt.mean), repr(pt.stderr), pt.num_sequences, self.mode]
            )
        return buf.getvalue()

    @classmethod
    def from_csv_text(cls, text: str) -> "DecayDataset":
        reader = csv.reader(io.StringIO(text))
        rows = list(reader)
        if not rows or [tok.strip() for tok in rows[0]] != ["m", "mean", "stderr", "K", "mode"]:
            raise DataParseError("line 1: expected header 'm,mean,stderr,K,mode'")
        points = []
        modes = set()
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != 5:
                raise DataParseError(f"line {lineno}: expected 5 columns, got {len(row)}")
            try:
                points.append(
                    DecayPoint(
                        length=int(row[0]),
                        mean=float(row[1]),
                        stderr=float(row[2]),
                        num_sequences=int(row[3]),
                    )
                )
            except ValueError as exc:
                raise DataParseError(f"line {lineno}: {exc}") from exc
            modes.add(row[4].strip())
        if not points:
            raise DataParseError("no data rows found")
        if len(modes) != 1:
            raise DataParseError(f"inconsistent mode column: {sorted(modes)}")
        return cls(mode=modes.pop(), points=tuple(points))

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv_text())

    @classmethod
    def read_csv(cls, path) -> "DecayDataset":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_csv_text(fh.read())

    def to_json_text(self, config_echo: dict | None = None) -> str:
        payload: dict = {
            "mode": self.mode,
            "points": [
                {
                    "m": pt.length,
                    "mean": pt.mean,
                    "stderr": pt.stderr,
                    "K": pt.num_sequences,
                }
                for pt in self.points
            ],
        }
        if self.raw is not None:
            payload["raw"] = {str(m): list(map(float, v)) for m, v in self.raw.items()}
        if config_echo is not None:
            payload["config"] = config_echo
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json_text(cls, text: str) -> "DecayDataset":
        try:
            payload = json.loads(text)
            points = tuple(
                DecayPoint(
                    length=int(pt["m"]),
                    mean=float(pt["mean"]),
                    stderr=float(pt["stderr"]),
                    num_sequences=int(pt["K"]),
                )
                for pt in payload["points"]
            )
            raw = None
            if payload.get("raw") is not None:
                raw = {
                    int(m): np.array(vals, dtype=float)
                    for m, vals in payload["raw"].items()
                }
            return cls(mode=payload["mode"], points=points, raw=raw)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DataParseError(f"malformed dataset JSON: {exc}") from exc


def sequence_rng(seed: int, m: int, k: int) -> np.random.Generator:
    """Generator for the ``(m, k)`` cell of a run with the given master seed."""
    return np.random.default_rng(np.random.SeedSequence([seed, m, k]))


def _draw_indices(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(len(cliffords.enumerate_group(n)), size=m)


def generate_standard_sequence(
    m: int, n: int, rng: np.random.Generator
) -> list[CliffordElement]:
    """``m`` uniform Cliffords plus the inverse of their composition."""
    if m < 1:
        raise OutOfRange("sequence length must be at least 1")
    if n == 1:
        tables = group_tables(1)
        idx = _draw_indices(m, 1, rng)
        acc = int(idx[0])
        for i in idx[1:]:
            acc = int(tables.mult[i, acc])
        gates = [tables.elements[i] for i in idx]
        gates.append(tables.elements[tables.inverse[acc]])
        return gates
    if n == 2:
        table = cliffords.enumerate_group(2)
        gates = [table[int(i)] for i in _draw_indices(m, 2, rng)]
    else:
        gates = [cliffords.sample_uniform(n, rng) for _ in range(m)]
    composite = gates[0]
    for gate in gates[1:]:
        composite = compose_clifford(gate, composite)
    gates.append(inverse(composite))
    return gates


def generate_interleaved_sequence(
    m: int, target: CliffordElement, n: int, rng: np.random.Generator
) -> list[CliffordElement]:
    """Alternating random/target gates plus the inverse of the full product."""
    if m < 1:
        raise OutOfRange("sequence length must be at least 1")
    if target.n != n:
        raise ConfigError("target qubit count differs from sequence")
    if n == 1:
        tables = group_tables(1)
        idx = _draw_indices(m, 1, rng)
        t_idx = tables.index_of(target)
        acc = int(idx[0])
        acc = int(tables.mult[t_idx, acc])
        for i in idx[1:]:
            acc = int(tables.mult[i, acc])
            acc = int(tables.mult[t_idx, acc])
        gates: list[CliffordElement] = []
        for i in idx:
            gates.extend((tables.elements[i], target))
        gates.append(tables.elements[tables.inverse[acc]])
        return gates
    if n == 2:
        table = cliffords.enumerate_group(2)
        randoms = [table[int(i)] for i in _draw_indices(m, 2, rng)]
    else:
        randoms = [cliffords.sample_uniform(n, rng) for _ in range(m)]
    composite = None
    gates = []
    for gate in randoms:
        gates.extend((gate, target))
        step = compose_clifford(target, gate)
        composite = step if composite is None else compose_clifford(step, composite)
    gates.append(inverse(composite))
    return gates


def simulate_sequence(
    gates: list[CliffordElement], noise: NoiseModel, interleaved: bool = False
) -> float:
    """Exact survival probability of one noisy sequence.

    Each gate is applied as its ideal transfer matrix followed by its error
    channel; in interleaved sequences the even slots (the targets) instead
    apply the interleaved error first and the ideal gate after it.  The
    final inversion gate carries its own per-gate error.
    """
    if not gates:
        raise OutOfRange("sequence must contain at least one gate")
    n = gates[0].n
    if n > 3:
        raise UnsupportedDimension("dense channel simulation is limited to n <= 3")
    if interleaved and len(gates) % 2 == 0:
        raise OutOfRange("interleaved sequences hold 2m + 1 gates")
    ideal_cache: dict[CliffordElement, np.ndarray] = {}

    def ideal(gate: CliffordElement) -> np.ndarray:
        matrix = ideal_cache.get(gate)
        if matrix is None:
            matrix = gate.to_superoperator().matrix
            ideal_cache[gate] = matrix
        return matrix

    interleaved_matrix = noise.interleaved_error.matrix
    state = noise.prep.coefficients.copy()
    last = len(gates) - 1
    for position, gate in enumerate(gates):
        if interleaved and position % 2 == 1 and position != last:
            state = ideal(gate) @ (interleaved_matrix @ state)
        else:
            state = noise.error_for(gate).matrix @ (ideal(gate) @ state)
    return float(noise.meas.coefficients @ state)


def _survivals_one_qubit(config: ExperimentConfig, m: int) -> np.ndarray:
    """All K survivals for one length, vectorized across sequences."""
    tables = group_tables(1)
    noise = config.noise
    noisy = np.stack(
        [
            noise.error_for(element).matrix @ tables.superoperators[i]
            for i, element in enumerate(tables.elements)
        ]
    )
    if config.mode == "interleaved":
        t_idx = tables.index_of(config.target)
        slot = tables.superoperators[t_idx] @ noise.interleaved_error.matrix
        step_bank = np.einsum("ab,kbc->kac", slot, noisy)
    else:
        step_bank = noisy

    k_count = config.sequences_per_length
    idx = np.empty((k_count, m), dtype=np.int64)
    for k in range(k_count):
        rng = sequence_rng(config.seed, m, k)
        idx[k] = _draw_indices(m, 1, rng)

    acc = idx[:, 0].copy()
    if config.mode == "interleaved":
        t_idx = tables.index_of(config.target)
        acc = tables.mult[t_idx, acc]
        for j in range(1, m):
            acc = tables.mult[t_idx, tables.mult[idx[:, j], acc]]
    else:
        for j in range(1, m):
            acc = tables.mult[idx[:, j], acc]
    final = tables.inverse[acc]

    state = np.broadcast_to(noise.prep.coefficients, (k_count, 4)).copy()
    for j in range(m):
        state = np.einsum("kab,kb->ka", step_bank[idx[:, j]], state)
    state = np.einsum("kab,kb->ka", noisy[final], state)
    return state @ noise.meas.coefficients


def _survivals_generic(config: ExperimentConfig, m: int, threads: int) -> np.ndarray:
    def cell(k: int) -> float:
        rng = sequence_rng(config.seed, m, k)
        if config.mode == "interleaved":
            gates = generate_interleaved_sequence(m, config.target, config.num_qubits, rng)
            return simulate_sequence(gates, config.noise, interleaved=True)
        gates = generate_standard_sequence(m, config.num_qubits, rng)
        return simulate_sequence(gates, config.noise)

    k_count = config.sequences_per_length
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(cell, range(k_count)))
    else:
        values = [cell(k) for k in range(k_count)]
    return np.array(values)


def run_experiment(
    config: ExperimentConfig, threads: int = 1, keep_raw: bool = True
) -> DecayDataset:
    """Generate, simulate and average ``K`` sequences per length.

    The result is bit-identical for a given config and seed regardless of
    ``threads``; single-qubit runs take a vectorized path over the
    enumerated group.
    """
    if config.num_qubits > 3:
        raise UnsupportedDimension("dense channel simulation is limited to n <= 3")
    points = []
    raw: dict[int, np.ndarray] = {}
    for m in config.lengths:
        if config.num_qubits == 1:
            survivals = _survivals_one_qubit(config, m)
        else:
            survivals = _survivals_generic(config, m, threads)
        k_count = config.sequences_per_length
        stderr = (
            float(np.std(survivals, ddof=1) / sqrt(k_count)) if k_count > 1 else 0.0
        )
        points.append(
            DecayPoint(
                length=m,
                mean=float(np.mean(survivals)),
                stderr=stderr,
                num_sequences=k_count,
            )
        )
        if keep_raw:
            survivals.flags.writeable = False
            raw[m] = survivals
    return DecayDataset(
        mode=config.mode, points=tuple(points), raw=raw if keep_raw else None
    )
