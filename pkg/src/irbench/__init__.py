"""Interleaved randomized benchmarking workbench.

Simulates standard and interleaved Clifford benchmarking experiments on a
few qubits, fits the resulting decay curves, and turns the fitted decay
parameters into gate-error estimates with guaranteed intervals.  The same
analysis path accepts externally measured decay data.
"""

__version__ = "0.1.0"

from .cliffords import (
    CliffordElement,
    PulseSequence,
    compose_clifford,
    decompose_minimal,
    enumerate_group,
    identity,
    inverse,
    named_gate,
    sample_uniform,
)
from .errors import IRBError
from .estimation import (
    GateErrorReport,
    average_clifford_error,
    build_report,
    error_bound,
    interleaved_gate_error,
    propagate_uncertainty,
    theoretical_overrotation_error,
)
from .fitting import (
    BootstrapErrors,
    FitResult,
    bootstrap_uncertainty,
    fit_first,
    fit_zeroth,
)
from .noise import (
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
from .paulis import (
    FidelitySummary,
    PauliVector,
    SuperOperator,
    apply,
    average_fidelity,
    basis_effect,
    basis_state,
    compose,
    maximally_mixed,
    ptm_from_unitary,
    survival_probability,
    twirl,
)
from .protocol import (
    DecayDataset,
    DecayPoint,
    ExperimentConfig,
    generate_interleaved_sequence,
    generate_standard_sequence,
    run_experiment,
    sequence_rng,
    simulate_sequence,
)

__all__ = [
    "__version__",
    "IRBError",
    "PauliVector",
    "SuperOperator",
    "FidelitySummary",
    "ptm_from_unitary",
    "compose",
    "apply",
    "survival_probability",
    "average_fidelity",
    "twirl",
    "basis_state",
    "basis_effect",
    "maximally_mixed",
    "CliffordElement",
    "PulseSequence",
    "identity",
    "compose_clifford",
    "inverse",
    "sample_uniform",
    "enumerate_group",
    "decompose_minimal",
    "named_gate",
    "NoiseModel",
    "GammaDiagnostic",
    "depolarizing",
    "pauli_channel",
    "overrotation",
    "damping",
    "spam_pair",
    "gamma_variation",
    "channel_from_config",
    "ExperimentConfig",
    "DecayDataset",
    "DecayPoint",
    "generate_standard_sequence",
    "generate_interleaved_sequence",
    "simulate_sequence",
    "run_experiment",
    "sequence_rng",
    "FitResult",
    "BootstrapErrors",
    "fit_zeroth",
    "fit_first",
    "bootstrap_uncertainty",
    "GateErrorReport",
    "average_clifford_error",
    "interleaved_gate_error",
    "error_bound",
    "theoretical_overrotation_error",
    "propagate_uncertainty",
    "build_report",
]
