"""HTTP wiring of the benchmarking service."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import IRBError
from . import handlers, schemas


def create_app() -> FastAPI:
    service = FastAPI(
        title="irbench",
        version=__version__,
        description=(
            "Randomized-benchmarking workbench: simulate standard and "
            "interleaved decay experiments, fit decay curves, and report "
            "gate-error estimates with guaranteed bounds."
        ),
    )

    @service.exception_handler(IRBError)
    async def _irb_error(_: Request, exc: IRBError) -> JSONResponse:
        status = 422 if exc.exit_code == 2 else 500
        return JSONResponse(
            status_code=status,
            content={"detail": str(exc), "kind": type(exc).__name__},
        )

    @service.get("/v1/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @service.post("/v1/simulate", response_model=schemas.SimulateResponse)
    def simulate(request: schemas.SimulateRequest) -> schemas.SimulateResponse:
        return handlers.simulate(request)

    @service.post("/v1/estimate", response_model=schemas.EstimateResponse)
    def estimate(request: schemas.EstimateRequest) -> schemas.EstimateResponse:
        return handlers.estimate(request)

    @service.post("/v1/analyze", response_model=schemas.AnalyzeResponse)
    def analyze(request: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
        return handlers.analyze(request)

    @service.post(
        "/v1/miscalibration", response_model=schemas.MiscalibrationResponse
    )
    def miscalibration(
        request: schemas.MiscalibrationRequest,
    ) -> schemas.MiscalibrationResponse:
        return handlers.miscalibration(request)

    @service.post("/v1/clifford", response_model=schemas.CliffordResponse)
    def clifford(request: schemas.CliffordRequest) -> schemas.CliffordResponse:
        return handlers.clifford_op(request)

    return service


app = create_app()
