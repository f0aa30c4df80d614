"""Command line client for the benchmarking service.

Every subcommand builds a request model, sends it to the service layer
(in process by default, over HTTP when ``--server`` is given), and formats
the response: tables on stdout, CSV/JSON artifacts under ``--output``.

Exit codes: 0 on success, 2 for bad input (config, data files, arguments),
3 for runtime failures.  The only environment variable consulted is
``RB_SEED``, which overrides the config seed unless ``--seed`` is passed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import __version__
from .errors import ConfigError, DataParseError, IRBError
from .protocol import DecayDataset
from .service import handlers, schemas


class ServiceClient:
    """Dispatches requests in process or to a remote service instance."""

    def __init__(self, server: str | None = None, timeout: float = 600.0) -> None:
        self.server = server.rstrip("/") if server else None
        self.timeout = timeout

    def _call(self, path: str, request, response_cls, local):
        if self.server is None:
            return local(request)
        import httpx

        try:
            response = httpx.post(
                f"{self.server}{path}",
                json=request.model_dump(mode="json"),
                timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise IRBError(f"service request failed: {exc}") from exc
        if response.status_code >= 400:
            detail = response.json().get("detail", response.text)
            error = IRBError(f"service rejected request: {detail}")
            error.exit_code = 2 if response.status_code < 500 else 3
            raise error
        return response_cls.model_validate(response.json())

    def simulate(self, request: schemas.SimulateRequest) -> schemas.SimulateResponse:
        return self._call(
            "/v1/simulate", request, schemas.SimulateResponse, handlers.simulate
        )

    def estimate(self, request: schemas.EstimateRequest) -> schemas.EstimateResponse:
        return self._call(
            "/v1/estimate", request, schemas.EstimateResponse, handlers.estimate
        )

    def analyze(self, request: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
        return self._call(
            "/v1/analyze", request, schemas.AnalyzeResponse, handlers.analyze
        )

    def miscalibration(
        self, request: schemas.MiscalibrationRequest
    ) -> schemas.MiscalibrationResponse:
        return self._call(
            "/v1/miscalibration",
            request,
            schemas.MiscalibrationResponse,
            handlers.miscalibration,
        )

    def clifford(self, request: schemas.CliffordRequest) -> schemas.CliffordResponse:
        return self._call(
            "/v1/clifford", request, schemas.CliffordResponse, handlers.clifford_op
        )


def _load_config(path: str, seed_override: int | None) -> schemas.ExperimentConfigModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        config = schemas.ExperimentConfigModel.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(f"invalid config file {path}: {exc}") from exc
    seed = seed_override
    if seed is None and os.environ.get("RB_SEED"):
        try:
            seed = int(os.environ["RB_SEED"])
        except ValueError as exc:
            raise ConfigError(f"RB_SEED must be an integer: {exc}") from exc
    if seed is not None:
        config = config.model_copy(update={"seed": seed})
    return config


def _dataset_file_to_model(path: str) -> schemas.DatasetModel:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        payload = json.loads(text)
        payload.pop("config", None)
        try:
            return schemas.DatasetModel.model_validate(payload)
        except ValidationError as exc:
            raise DataParseError(f"invalid dataset JSON {path}: {exc}") from exc
    dataset = DecayDataset.from_csv_text(text)
    return handlers.dataset_to_model(dataset)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _print_report(report: schemas.ReportModel) -> None:
    print(f"standard decay      p      = {report.p:.6f} +/- {report.p_stderr:.6f}")
    print(
        "interleaved decay   p_C    = "
        f"{report.p_interleaved:.6f} +/- {report.p_interleaved_stderr:.6f}"
    )
    print(f"average gate error  r      = {report.average_error:.6f}")
    print(
        "interleaved error   r_est  = "
        f"{report.gate_error_estimate:.6f} +/- {report.gate_error_stderr:.6f}"
    )
    print(
        f"bound ({report.noise_class})   E      = {report.bound:.6f}   "
        f"interval [{report.interval[0]:.6f}, {report.interval[1]:.6f}]"
    )
    if report.gamma is not None:
        limit = report.gamma.max_valid_m
        print(
            f"gate-dependence     gamma  = {report.gamma.gamma:.6g}"
            f"   first-order model advisory up to m = "
            f"{'unbounded' if limit is None else limit}"
        )


def _curve_csv(fit: schemas.FitResultModel, lengths: list[int]) -> str:
    grid = np.unique(
        np.concatenate(
            [np.linspace(min(lengths), max(lengths), 201), np.array(lengths, float)]
        )
    )
    values = fit.a * fit.p**grid + fit.b
    if fit.c is not None:
        values = values + fit.c * (grid - 1.0) * fit.p ** (grid - 2.0)
    lines = ["m,fitted"]
    lines.extend(f"{m!r},{v!r}" for m, v in zip(grid, values))
    return "\n".join(lines) + "\n"


def _dataset_json_payload(
    model: schemas.DatasetModel, config: schemas.ExperimentConfigModel | None
) -> dict:
    payload = model.model_dump(mode="json")
    if config is not None:
        payload["config"] = config.model_dump(mode="json")
    return payload


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args.config, args.seed)
    client = ServiceClient(args.server)
    started = datetime.now(timezone.utc).isoformat()
    response = client.simulate(
        schemas.SimulateRequest(
            config=config, threads=args.threads, include_raw=not args.no_raw
        )
    )
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for model in response.datasets:
        label = model.label or model.mode
        dataset = handlers.dataset_from_model(model)
        csv_path = outdir / f"{label}.csv"
        dataset.write_csv(csv_path)
        json_path = outdir / f"{label}.json"
        _write_json(json_path, _dataset_json_payload(model, config))
        outputs.extend([csv_path.name, json_path.name])
        print(f"{label}: {len(model.points)} lengths -> {csv_path}")
    manifest = schemas.ManifestModel(
        version=response.version,
        created_utc=started,
        seed=response.seed,
        config=config,
        outputs=outputs,
    )
    _write_json(outdir / "manifest.json", manifest.model_dump(mode="json"))
    if response.gamma is not None and response.gamma.max_valid_m is not None:
        print(
            f"note: gate-dependent noise gamma = {response.gamma.gamma:.3g}; "
            f"first-order model advisory up to m = {response.gamma.max_valid_m}"
        )
    print(f"manifest: {outdir / 'manifest.json'}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    request = schemas.AnalyzeRequest(
        standard=_dataset_file_to_model(args.standard),
        interleaved=_dataset_file_to_model(args.interleaved),
        num_qubits=args.num_qubits,
        model=args.model,
        noise_class=args.noise_class,
        bootstrap_resamples=args.bootstrap,
        seed=args.seed if args.seed is not None else 0,
    )
    client = ServiceClient(args.server)
    response = client.analyze(request)
    _print_report(response.report)
    for name, fit in (
        ("standard", response.standard_fit),
        ("interleaved", response.interleaved_fit),
    ):
        flags = []
        if not fit.converged:
            flags.append("NOT CONVERGED")
        if fit.degenerate:
            flags.append("degenerate")
        if fit.ill_conditioned:
            flags.append("ill-conditioned")
        extra = f"  [{', '.join(flags)}]" if flags else ""
        print(
            f"{name} fit ({fit.model}): a = {fit.a:.4f}, b = {fit.b:.4f}, "
            f"residual = {fit.residual_norm:.3g}{extra}"
        )
    if args.output:
        outdir = Path(args.output)
        outdir.mkdir(parents=True, exist_ok=True)
        _write_json(
            outdir / "report.json",
            {
                "report": response.report.model_dump(mode="json"),
                "standard_fit": response.standard_fit.model_dump(mode="json"),
                "interleaved_fit": response.interleaved_fit.model_dump(mode="json"),
            },
        )
        for name, fit, source in (
            ("standard_curve.csv", response.standard_fit, request.standard),
            ("interleaved_curve.csv", response.interleaved_fit, request.interleaved),
        ):
            lengths = [pt.m for pt in source.points]
            (outdir / name).write_text(_curve_csv(fit, lengths), encoding="utf-8")
        print(f"report: {outdir / 'report.json'}")
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    request = schemas.EstimateRequest(
        p=args.p,
        p_interleaved=args.p_interleaved,
        dimension=args.dimension,
        p_stderr=args.p_stderr,
        p_interleaved_stderr=args.p_interleaved_stderr,
        noise_class=args.noise_class,
    )
    client = ServiceClient(args.server)
    response = client.estimate(request)
    _print_report(response.report)
    if args.output:
        outdir = Path(args.output)
        outdir.mkdir(parents=True, exist_ok=True)
        _write_json(outdir / "report.json", response.report.model_dump(mode="json"))
        print(f"report: {outdir / 'report.json'}")
    return 0


def cmd_miscalibration(args: argparse.Namespace) -> int:
    config = _load_config(args.config, args.seed)
    try:
        epsilons = [float(tok) for tok in args.epsilons.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --epsilons list: {exc}") from exc
    if not epsilons:
        raise ConfigError("--epsilons must list at least one angle")
    request = schemas.MiscalibrationRequest(
        config=config,
        epsilons=epsilons,
        target=args.target,
        axis=args.axis,
        model=args.model,
        noise_class=args.noise_class,
        threads=args.threads,
    )
    client = ServiceClient(args.server)
    response = client.miscalibration(request)
    header = f"{'epsilon':>10} {'r_th':>8} {'r_est':>20} {'bound':>22}"
    print(header)
    print("-" * len(header))
    for row in response.rows:
        print(
            f"{row.epsilon:>10.4f} {row.r_th:>8.3f} "
            f"{row.r_est:>12.4f} +/- {row.r_est_stderr:<6.4f}"
            f" [{row.bound_low:.3f}, {row.bound_high:.3f}]"
        )
    if args.output:
        outdir = Path(args.output)
        outdir.mkdir(parents=True, exist_ok=True)
        lines = ["epsilon,r_th,r_est,r_est_stderr,bound_low,bound_high,p,p_interleaved"]
        lines.extend(
            f"{r.epsilon!r},{r.r_th!r},{r.r_est!r},{r.r_est_stderr!r},"
            f"{r.bound_low!r},{r.bound_high!r},{r.p!r},{r.p_interleaved!r}"
            for r in response.rows
        )
        (outdir / "miscalibration.csv").write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )
        _write_json(outdir / "miscalibration.json", response.model_dump(mode="json"))
        print(f"table: {outdir / 'miscalibration.csv'}")
    return 0


def cmd_clifford(args: argparse.Namespace) -> int:
    request = schemas.CliffordRequest(
        op=args.op,
        elements=args.elements,
        num_qubits=args.num_qubits,
        seed=args.seed,
    )
    client = ServiceClient(args.server)
    response = client.clifford(request)
    if response.element is not None:
        print(response.element)
    if response.pulses is not None:
        print(" ".join(response.pulses))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("irbench.service.app:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irbench",
        description="Randomized-benchmarking simulation and analysis workbench.",
    )
    parser.add_argument("--version", action="version", version=f"irbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, seed_help: str) -> None:
        p.add_argument("--server", help="base URL of a running service instance")
        p.add_argument("--seed", type=int, help=seed_help)

    p = sub.add_parser("simulate", help="run experiments from a config file")
    p.add_argument("config", help="JSON experiment configuration")
    p.add_argument("--output", "-o", default=".", help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    p.add_argument(
        "--no-raw", action="store_true", help="drop per-sequence survivals"
    )
    common(p, "override the config seed (beats RB_SEED)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="fit decay datasets and report gate error")
    p.add_argument("--standard", required=True, help="standard dataset (CSV or JSON)")
    p.add_argument(
        "--interleaved", required=True, help="interleaved dataset (CSV or JSON)"
    )
    p.add_argument("--num-qubits", type=int, default=1)
    p.add_argument("--model", choices=["zeroth", "first"], default="zeroth")
    p.add_argument(
        "--noise-class",
        choices=["general", "pauli", "depolarizing"],
        default="general",
    )
    p.add_argument(
        "--bootstrap",
        type=int,
        default=0,
        metavar="N",
        help="bootstrap resamples (needs JSON datasets with raw survivals)",
    )
    p.add_argument("--output", "-o", help="directory for report and curve samples")
    common(p, "bootstrap resampling seed")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("estimate", help="closed-form report from fitted parameters")
    p.add_argument("p", type=float, help="standard decay parameter")
    p.add_argument("p_interleaved", type=float, help="interleaved decay parameter")
    p.add_argument("--dimension", "-d", type=int, default=2)
    p.add_argument("--p-stderr", type=float, default=0.0)
    p.add_argument("--p-interleaved-stderr", type=float, default=0.0)
    p.add_argument(
        "--noise-class",
        choices=["general", "pauli", "depolarizing"],
        default="general",
    )
    p.add_argument("--output", "-o", help="directory for report.json")
    p.add_argument("--server", help="base URL of a running service instance")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser(
        "miscalibration", help="sweep intentional overrotations of a target gate"
    )
    p.add_argument("config", help="base JSON experiment configuration")
    p.add_argument(
        "--epsilons",
        default=f"0,{math.pi / 20},{math.pi / 10}",
        help="comma-separated overrotation angles in radians",
    )
    p.add_argument("--target", default="X90", help="interleaved target gate")
    p.add_argument("--axis", choices=["X", "Y", "Z"], default="X")
    p.add_argument("--model", choices=["zeroth", "first"], default="zeroth")
    p.add_argument(
        "--noise-class",
        choices=["general", "pauli", "depolarizing"],
        default="general",
    )
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", "-o", help="output directory")
    common(p, "override the config seed (beats RB_SEED)")
    p.set_defaults(func=cmd_miscalibration)

    p = sub.add_parser("clifford", help="group arithmetic for debugging")
    p.add_argument("op", choices=["compose", "inverse", "decompose", "sample"])
    p.add_argument(
        "elements",
        nargs="*",
        help="gate names (X90, H, CNOT) or hex text forms (c1:...)",
    )
    p.add_argument("--num-qubits", "-n", type=int, default=1)
    common(p, "seed for sampling and decomposition tie-breaks")
    p.set_defaults(func=cmd_clifford)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IRBError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        print(f"error: invalid request: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
