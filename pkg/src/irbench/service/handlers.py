"""Transport-free implementations behind the service endpoints.

Each handler maps a request model to a response model using only library
calls; the FastAPI app and the command line client both delegate here, so
the two surfaces cannot drift apart.
"""

from __future__ import annotations

import numpy as np

from .. import __version__
from ..cliffords import (
    CliffordElement,
    compose_clifford,
    decompose_minimal,
    enumerate_group,
    inverse,
    named_gate,
    sample_uniform,
)
from ..errors import ConfigError, MissingRawData
from ..estimation import build_report, theoretical_overrotation_error
from ..fitting import FitResult, bootstrap_uncertainty, fit_first, fit_zeroth
from ..noise import (
    GammaDiagnostic,
    NoiseModel,
    channel_from_config,
    gamma_variation,
    overrotation,
    spam_pair,
)
from ..paulis import SuperOperator, compose
from ..protocol import DecayDataset, DecayPoint, ExperimentConfig, run_experiment
from . import schemas


def parse_element(text: str, num_qubits: int) -> CliffordElement:
    """Resolve a gate name (``X90``) or hex text form (``c1:...``)."""
    token = text.strip()
    if token.lower().startswith("c") and ":" in token:
        element = CliffordElement.from_text(token)
    else:
        try:
            element = named_gate(token)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    if element.n != num_qubits:
        raise ConfigError(
            f"gate {text!r} acts on {element.n} qubits, experiment uses {num_qubits}"
        )
    return element


def build_noise_model(spec: schemas.NoiseSpec, num_qubits: int) -> NoiseModel:
    gate = channel_from_config(spec.gate.model_dump(), num_qubits)
    interleaved = (
        channel_from_config(spec.interleaved.model_dump(), num_qubits)
        if spec.interleaved is not None
        else None
    )
    prep = meas = None
    if spec.prep_error is not None or spec.meas_error is not None:
        identity = SuperOperator.identity(num_qubits)
        prep_error = (
            channel_from_config(spec.prep_error.model_dump(), num_qubits)
            if spec.prep_error is not None
            else identity
        )
        meas_error = (
            channel_from_config(spec.meas_error.model_dump(), num_qubits)
            if spec.meas_error is not None
            else identity
        )
        prep, meas = spam_pair(prep_error, meas_error)
    per_gate = {}
    for override in spec.per_gate:
        element = parse_element(override.target, num_qubits)
        per_gate[element] = channel_from_config(override.channel.model_dump(), num_qubits)
    return NoiseModel(
        num_qubits,
        gate_error=gate,
        interleaved_error=interleaved,
        prep=prep,
        meas=meas,
        per_gate=per_gate,
    )


def build_experiment(
    config: schemas.ExperimentConfigModel,
    run: schemas.RunSpec,
    noise_model: NoiseModel | None = None,
) -> ExperimentConfig:
    if noise_model is None:
        noise_model = build_noise_model(config.noise, config.num_qubits)
    target = (
        parse_element(run.target, config.num_qubits)
        if run.mode == "interleaved"
        else None
    )
    return ExperimentConfig(
        num_qubits=config.num_qubits,
        lengths=tuple(config.lengths),
        sequences_per_length=config.sequences_per_length,
        noise=noise_model,
        seed=config.seed,
        mode=run.mode,
        target=target,
    )


def dataset_to_model(
    dataset: DecayDataset, label: str | None = None, target: str | None = None
) -> schemas.DatasetModel:
    return schemas.DatasetModel(
        mode=dataset.mode,
        label=label,
        target=target,
        points=[
            schemas.DecayPointModel(
                m=pt.length,
                mean=pt.mean,
                stderr=pt.stderr,
                num_sequences=pt.num_sequences,
            )
            for pt in dataset.points
        ],
        raw=(
            {str(m): [float(v) for v in vals] for m, vals in dataset.raw.items()}
            if dataset.raw is not None
            else None
        ),
    )


def dataset_from_model(model: schemas.DatasetModel) -> DecayDataset:
    points = tuple(
        DecayPoint(
            length=pt.m,
            mean=pt.mean,
            stderr=pt.stderr,
            num_sequences=pt.num_sequences,
        )
        for pt in model.points
    )
    raw = None
    if model.raw is not None:
        raw = {int(m): np.array(vals, dtype=float) for m, vals in model.raw.items()}
    return DecayDataset(mode=model.mode, points=points, raw=raw)


def _gamma_model(model: NoiseModel) -> schemas.GammaModel | None:
    if model.num_qubits > 2:
        return None
    diagnostic = gamma_variation(model, enumerate_group(model.num_qubits))
    return schemas.GammaModel(
        gamma=diagnostic.gamma, max_valid_m=diagnostic.max_valid_m
    )


def _fit_model(result: FitResult, bootstrap: dict | None = None) -> schemas.FitResultModel:
    return schemas.FitResultModel(bootstrap=bootstrap, **result.to_dict())


def simulate(request: schemas.SimulateRequest) -> schemas.SimulateResponse:
    config = request.config
    noise_model = build_noise_model(config.noise, config.num_qubits)
    datasets = []
    for run in config.runs:
        experiment = build_experiment(config, run, noise_model)
        dataset = run_experiment(
            experiment, threads=request.threads, keep_raw=request.include_raw
        )
        datasets.append(
            dataset_to_model(dataset, label=run.default_label(), target=run.target)
        )
    return schemas.SimulateResponse(
        version=__version__,
        seed=config.seed,
        gamma=_gamma_model(noise_model),
        datasets=datasets,
    )


def estimate(request: schemas.EstimateRequest) -> schemas.EstimateResponse:
    report = build_report(
        p=request.p,
        p_interleaved=request.p_interleaved,
        d=request.dimension,
        p_stderr=request.p_stderr,
        p_interleaved_stderr=request.p_interleaved_stderr,
        noise_class=request.noise_class,
    )
    return schemas.EstimateResponse(report=schemas.ReportModel(**report.to_dict()))


def analyze(request: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
    fitter = fit_first if request.model == "first" else fit_zeroth
    standard = dataset_from_model(request.standard)
    interleaved = dataset_from_model(request.interleaved)
    standard_fit = fitter(standard)
    interleaved_fit = fitter(interleaved)

    boot_standard = boot_interleaved = None
    if request.bootstrap_resamples:
        if standard.raw is None or interleaved.raw is None:
            raise MissingRawData(
                "bootstrap needs datasets with per-sequence survivals (JSON raw block)"
            )
        boot_standard = bootstrap_uncertainty(
            standard, fitter, request.bootstrap_resamples, seed=request.seed
        ).to_dict()
        boot_interleaved = bootstrap_uncertainty(
            interleaved, fitter, request.bootstrap_resamples, seed=request.seed + 1
        ).to_dict()

    gamma = (
        GammaDiagnostic(request.gamma.gamma, request.gamma.max_valid_m)
        if request.gamma is not None
        else None
    )
    report = build_report(
        p=standard_fit.p,
        p_interleaved=interleaved_fit.p,
        d=2**request.num_qubits,
        p_stderr=standard_fit.p_stderr,
        p_interleaved_stderr=interleaved_fit.p_stderr,
        noise_class=request.noise_class,
        gamma=gamma,
    )
    return schemas.AnalyzeResponse(
        report=schemas.ReportModel(**report.to_dict()),
        standard_fit=_fit_model(standard_fit, boot_standard),
        interleaved_fit=_fit_model(interleaved_fit, boot_interleaved),
    )


def miscalibration(request: schemas.MiscalibrationRequest) -> schemas.MiscalibrationResponse:
    """Interleaved sweeps with an extra overrotation composed onto the base
    interleaved error; the standard run is shared by all rows."""
    config = request.config
    base_noise = build_noise_model(config.noise, config.num_qubits)
    fitter = fit_first if request.model == "first" else fit_zeroth

    standard_run = schemas.RunSpec(mode="standard")
    standard_fit = fitter(
        run_experiment(
            build_experiment(config, standard_run, base_noise), threads=request.threads
        )
    )

    rows = []
    for epsilon in request.epsilons:
        miscalibrated = base_noise.with_interleaved_error(
            compose(overrotation(request.axis, epsilon), base_noise.interleaved_error)
        )
        run = schemas.RunSpec(mode="interleaved", target=request.target)
        experiment = build_experiment(config, run, miscalibrated)
        interleaved_fit = fitter(run_experiment(experiment, threads=request.threads))
        report = build_report(
            p=standard_fit.p,
            p_interleaved=interleaved_fit.p,
            d=2**config.num_qubits,
            p_stderr=standard_fit.p_stderr,
            p_interleaved_stderr=interleaved_fit.p_stderr,
            noise_class=request.noise_class,
        )
        rows.append(
            schemas.MiscalibrationRow(
                epsilon=epsilon,
                r_th=theoretical_overrotation_error(epsilon),
                r_est=report.gate_error_estimate,
                r_est_stderr=report.gate_error_stderr,
                bound_low=report.interval[0],
                bound_high=report.interval[1],
                p=standard_fit.p,
                p_interleaved=interleaved_fit.p,
            )
        )
    return schemas.MiscalibrationResponse(
        version=__version__, rows=rows, gamma=_gamma_model(base_noise)
    )


def clifford_op(request: schemas.CliffordRequest) -> schemas.CliffordResponse:
    n = request.num_qubits
    rng = np.random.default_rng(request.seed)
    if request.op == "compose":
        if len(request.elements) < 2:
            raise ConfigError("compose needs at least two elements")
        elements = [parse_element(text, n) for text in request.elements]
        result = elements[0]
        for element in elements[1:]:
            # Later list entries are applied later in time.
            result = compose_clifford(element, result)
        return schemas.CliffordResponse(element=result.to_text())
    if request.op == "inverse":
        if len(request.elements) != 1:
            raise ConfigError("inverse takes exactly one element")
        return schemas.CliffordResponse(
            element=inverse(parse_element(request.elements[0], n)).to_text()
        )
    if request.op == "decompose":
        if len(request.elements) != 1:
            raise ConfigError("decompose takes exactly one element")
        sequence = decompose_minimal(parse_element(request.elements[0], n), rng)
        return schemas.CliffordResponse(pulses=list(sequence.pulses))
    element = sample_uniform(n, rng)
    return schemas.CliffordResponse(element=element.to_text())
