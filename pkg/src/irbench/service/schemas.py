"""Pydantic request/response models for the service and the config file.

The experiment configuration model doubles as the schema of the JSON
config file consumed by ``irbench simulate``; its JSON schema is available
from ``ExperimentConfigModel.model_json_schema()`` or the service's
OpenAPI document.
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import (
    AliasChoices,
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# --------------------------------------------------------------------------
# Channel and noise configuration


class IdentityChannelSpec(_Strict):
    type: Literal["identity"]


class DepolarizingChannelSpec(_Strict):
    type: Literal["depolarizing"]
    p: float


class PauliChannelSpec(_Strict):
    type: Literal["pauli"]
    probabilities: list[float]


class OverrotationChannelSpec(_Strict):
    type: Literal["overrotation"]
    axis: Literal["X", "Y", "Z"]
    epsilon: float


class DampingChannelSpec(_Strict):
    type: Literal["damping"]
    t1: float
    t2: float
    t_gate: float


class ComposeChannelSpec(_Strict):
    type: Literal["compose"]
    channels: list["ChannelSpec"]


ChannelSpec = Annotated[
    Union[
        IdentityChannelSpec,
        DepolarizingChannelSpec,
        PauliChannelSpec,
        OverrotationChannelSpec,
        DampingChannelSpec,
        ComposeChannelSpec,
    ],
    Field(discriminator="type"),
]

ComposeChannelSpec.model_rebuild()


class PerGateSpec(_Strict):
    """Error override for one Clifford, named like ``X90`` or given as the
    hex text form ``c1:...``."""

    target: str
    channel: ChannelSpec


class NoiseSpec(_Strict):
    gate: ChannelSpec = Field(default_factory=lambda: IdentityChannelSpec(type="identity"))
    per_gate: list[PerGateSpec] = Field(default_factory=list)
    interleaved: ChannelSpec | None = None
    prep_error: ChannelSpec | None = None
    meas_error: ChannelSpec | None = None


class RunSpec(_Strict):
    mode: Literal["standard", "interleaved"] = "standard"
    target: str | None = None
    label: str | None = None

    @model_validator(mode="after")
    def _interleaved_needs_target(self) -> "RunSpec":
        if self.mode == "interleaved" and not self.target:
            raise ValueError("interleaved runs need a target gate")
        return self

    def default_label(self) -> str:
        if self.label:
            return self.label
        if self.mode == "interleaved":
            safe = "".join(c if c.isalnum() else "_" for c in self.target or "")
            return f"interleaved_{safe}"
        return "standard"


class ExperimentConfigModel(_Strict):
    """Config file contents for simulation runs."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    num_qubits: int = Field(1, ge=1, le=3)
    lengths: list[int]
    sequences_per_length: int = Field(
        ..., ge=1, validation_alias=AliasChoices("sequences_per_length", "K")
    )
    seed: int = Field(0, ge=0)
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    runs: list[RunSpec] = Field(default_factory=lambda: [RunSpec()])

    @field_validator("lengths")
    @classmethod
    def _lengths_increasing(cls, value: list[int]) -> list[int]:
        if not value or value[0] < 1:
            raise ValueError("lengths must be a non-empty list of integers >= 1")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("lengths must be strictly increasing")
        return value

    @field_validator("runs")
    @classmethod
    def _runs_nonempty(cls, value: list[RunSpec]) -> list[RunSpec]:
        if not value:
            raise ValueError("at least one run is required")
        return value


# --------------------------------------------------------------------------
# Datasets, fits and reports


class DecayPointModel(_Strict):
    m: int = Field(ge=1)
    mean: float
    stderr: float = Field(ge=0)
    num_sequences: int = Field(
        ge=1, validation_alias=AliasChoices("num_sequences", "K")
    )


class DatasetModel(_Strict):
    mode: Literal["standard", "interleaved"]
    label: str | None = None
    target: str | None = None
    points: list[DecayPointModel]
    raw: dict[str, list[float]] | None = None


class GammaModel(_Strict):
    gamma: float
    max_valid_m: int | None


class FitResultModel(_Strict):
    model: Literal["zeroth", "first"]
    p: float
    p_stderr: float
    a: float
    a_stderr: float
    b: float
    b_stderr: float
    c: float | None = None
    c_stderr: float | None = None
    residual_norm: float
    converged: bool
    degenerate: bool
    ill_conditioned: bool
    bootstrap: dict | None = None


class ReportModel(_Strict):
    p: float
    p_stderr: float
    p_interleaved: float
    p_interleaved_stderr: float
    dimension: int
    noise_class: Literal["general", "pauli", "depolarizing"]
    average_error: float
    gate_error_estimate: float
    gate_error_raw: float
    gate_error_stderr: float
    bound: float
    interval: tuple[float, float]
    interval_raw: tuple[float, float]
    gamma: GammaModel | None = None


# --------------------------------------------------------------------------
# Requests and responses


class SimulateRequest(_Strict):
    config: ExperimentConfigModel
    include_raw: bool = True
    threads: int = Field(1, ge=1, le=64)


class SimulateResponse(_Strict):
    version: str
    seed: int
    gamma: GammaModel | None = None
    datasets: list[DatasetModel]


class EstimateRequest(_Strict):
    p: float
    p_interleaved: float
    dimension: int = Field(2, ge=2)
    p_stderr: float = Field(0.0, ge=0)
    p_interleaved_stderr: float = Field(0.0, ge=0)
    noise_class: Literal["general", "pauli", "depolarizing"] = "general"


class EstimateResponse(_Strict):
    report: ReportModel


class AnalyzeRequest(_Strict):
    standard: DatasetModel
    interleaved: DatasetModel
    num_qubits: int = Field(1, ge=1)
    model: Literal["zeroth", "first"] = "zeroth"
    noise_class: Literal["general", "pauli", "depolarizing"] = "general"
    bootstrap_resamples: int = Field(0, ge=0)
    seed: int = Field(0, ge=0)
    gamma: GammaModel | None = None


class AnalyzeResponse(_Strict):
    report: ReportModel
    standard_fit: FitResultModel
    interleaved_fit: FitResultModel


class MiscalibrationRequest(_Strict):
    """Sweep of intentional overrotations composed onto the interleaved
    error of a base configuration."""

    config: ExperimentConfigModel
    epsilons: list[float]
    target: str = "X90"
    axis: Literal["X", "Y", "Z"] = "X"
    model: Literal["zeroth", "first"] = "zeroth"
    noise_class: Literal["general", "pauli", "depolarizing"] = "general"
    threads: int = Field(1, ge=1, le=64)


class MiscalibrationRow(_Strict):
    epsilon: float
    r_th: float
    r_est: float
    r_est_stderr: float
    bound_low: float
    bound_high: float
    p: float
    p_interleaved: float


class MiscalibrationResponse(_Strict):
    version: str
    rows: list[MiscalibrationRow]
    gamma: GammaModel | None = None


class CliffordRequest(_Strict):
    op: Literal["compose", "inverse", "decompose", "sample"]
    elements: list[str] = Field(default_factory=list)
    num_qubits: int = Field(1, ge=1)
    seed: int | None = Field(None, ge=0)


class CliffordResponse(_Strict):
    element: str | None = None
    pulses: list[str] | None = None


class ManifestModel(_Strict):
    """Provenance record written next to simulation outputs."""

    tool: str = "irbench"
    version: str
    created_utc: str
    seed: int
    config: ExperimentConfigModel
    outputs: list[str]


class HealthResponse(_Strict):
    status: str
    version: str
