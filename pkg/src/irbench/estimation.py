"""Closed-form gate-error estimates and bounds from fitted decay parameters.

Given the standard decay parameter ``p`` and the interleaved decay
parameter ``p_interleaved``, the error of the interleaved gate is
estimated as ``(d - 1)(1 - p_interleaved / p) / d`` and is guaranteed to
lie within ``estimate +/- E`` where ``E`` depends on the declared noise
class of the random-gate errors:

* ``general`` - minimum of two bracketing expressions, one driven by the
  observed decay mismatch and one by the distance of the random-gate error
  from its depolarizing twirl;
* ``pauli`` - the second expression tightens to
  ``2 (d^2 - 1)(1 - p) / (p d^2)``;
* ``depolarizing`` - the estimate is exact and ``E = 0``.

The class is always a caller declaration; nothing here ever assumes the
depolarizing case silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sqrt

from .errors import DivisionByZero, OutOfRange
from .noise import GammaDiagnostic

NOISE_CLASSES = ("general", "pauli", "depolarizing")

#: Guard for divisions by the fitted decay parameter.
P_FLOOR = 1e-6


def _check_dimension(d: int) -> None:
    n = max(d.bit_length() - 1, 0)
    if d < 2 or 2**n != d:
        raise OutOfRange(f"dimension {d} is not 2^n for n >= 1")


def average_clifford_error(p: float, d: int) -> float:
    """Average error rate ``(d - 1)(1 - p) / d`` of the random gate set."""
    _check_dimension(d)
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"decay parameter {p} outside [0, 1]")
    return (d - 1.0) * (1.0 - p) / d


def interleaved_gate_error(p: float, p_interleaved: float, d: int) -> float:
    """Point estimate ``(d - 1)(1 - p_interleaved / p) / d``.

    The raw value may be negative when the interleaved sequences decay more
    slowly than the standard ones; clamping is applied only when building
    the reported interval.
    """
    _check_dimension(d)
    if p <= P_FLOOR:
        raise DivisionByZero(f"decay parameter {p} at or below the {P_FLOOR} floor")
    if p > 1.0 or not 0.0 <= p_interleaved <= 1.0:
        raise OutOfRange("decay parameters must lie in [0, 1]")
    return (d - 1.0) * (1.0 - p_interleaved / p) / d


def error_bound(
    p: float, p_interleaved: float, d: int, noise_class: str = "general"
) -> float:
    """Half-width ``E`` of the guaranteed interval around the estimate."""
    _check_dimension(d)
    if noise_class not in NOISE_CLASSES:
        raise OutOfRange(f"noise class must be one of {NOISE_CLASSES}")
    if not 0.0 < p <= 1.0:
        raise OutOfRange(f"decay parameter {p} outside (0, 1]")
    if not 0.0 <= p_interleaved <= 1.0:
        raise OutOfRange(f"interleaved decay parameter {p_interleaved} outside [0, 1]")
    if noise_class == "depolarizing":
        return 0.0
    first = (d - 1.0) * (abs(p - p_interleaved / p) + (1.0 - p)) / d
    second = 2.0 * (d * d - 1.0) * (1.0 - p) / (p * d * d)
    if noise_class == "general":
        second = second + 4.0 * sqrt(1.0 - p) * sqrt(d * d - 1.0) / p
    return min(first, second)


def theoretical_overrotation_error(epsilon: float) -> float:
    """Predicted error ``2 (1 - cos^2(eps / 2)) / 3`` of a single-qubit
    overrotation by angle ``eps``."""
    return 2.0 * (1.0 - cos(epsilon / 2.0) ** 2) / 3.0


def propagate_uncertainty(
    p: float,
    p_stderr: float,
    p_interleaved: float,
    p_interleaved_stderr: float,
    d: int,
) -> float:
    """First-order (delta-method) standard error of the point estimate,
    treating the two fitted decay parameters as independent."""
    _check_dimension(d)
    if p <= P_FLOOR:
        raise DivisionByZero(f"decay parameter {p} at or below the {P_FLOOR} floor")
    d_per_interleaved = -(d - 1.0) / (d * p)
    d_per_standard = (d - 1.0) * p_interleaved / (d * p * p)
    return sqrt(
        (d_per_standard * p_stderr) ** 2
        + (d_per_interleaved * p_interleaved_stderr) ** 2
    )


@dataclass(frozen=True)
class GateErrorReport:
    """Full interleaved-benchmarking verdict for one gate.

    ``gate_error_estimate`` and ``interval`` are clamped to the physical
    range ``[0, (d - 1)/d]``; the unclamped values are retained in
    ``gate_error_raw`` and ``interval_raw``.
    """

    p: float
    p_stderr: float
    p_interleaved: float
    p_interleaved_stderr: float
    dimension: int
    noise_class: str
    average_error: float
    gate_error_estimate: float
    gate_error_raw: float
    gate_error_stderr: float
    bound: float
    interval: tuple[float, float]
    interval_raw: tuple[float, float]
    gamma: GammaDiagnostic | None = None

    def to_dict(self) -> dict:
        payload = {
            "p": self.p,
            "p_stderr": self.p_stderr,
            "p_interleaved": self.p_interleaved,
            "p_interleaved_stderr": self.p_interleaved_stderr,
            "dimension": self.dimension,
            "noise_class": self.noise_class,
            "average_error": self.average_error,
            "gate_error_estimate": self.gate_error_estimate,
            "gate_error_raw": self.gate_error_raw,
            "gate_error_stderr": self.gate_error_stderr,
            "bound": self.bound,
            "interval": list(self.interval),
            "interval_raw": list(self.interval_raw),
            "gamma": None,
        }
        if self.gamma is not None:
            payload["gamma"] = {
                "gamma": self.gamma.gamma,
                "max_valid_m": self.gamma.max_valid_m,
            }
        return payload


def build_report(
    p: float,
    p_interleaved: float,
    d: int = 2,
    p_stderr: float = 0.0,
    p_interleaved_stderr: float = 0.0,
    noise_class: str = "general",
    gamma: GammaDiagnostic | None = None,
) -> GateErrorReport:
    """Assemble estimate, propagated uncertainty, bound and clamped interval."""
    raw = interleaved_gate_error(p, p_interleaved, d)
    bound = error_bound(p, p_interleaved, d, noise_class)
    stderr = propagate_uncertainty(p, p_stderr, p_interleaved, p_interleaved_stderr, d)
    ceiling = (d - 1.0) / d
    low = max(0.0, raw - bound)
    high = max(low, min(ceiling, raw + bound))
    estimate = min(max(raw, low), high)
    return GateErrorReport(
        p=p,
        p_stderr=p_stderr,
        p_interleaved=p_interleaved,
        p_interleaved_stderr=p_interleaved_stderr,
        dimension=d,
        noise_class=noise_class,
        average_error=average_clifford_error(min(max(p, 0.0), 1.0), d),
        gate_error_estimate=estimate,
        gate_error_raw=raw,
        gate_error_stderr=stderr,
        bound=bound,
        interval=(low, high),
        interval_raw=(raw - bound, raw + bound),
        gamma=gamma,
    )
