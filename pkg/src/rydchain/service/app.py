"""FastAPI service wrapping the experiment runner.

The service executes runs synchronously and returns the rendered file
contents; clients (including the bundled CLI) decide where to write them.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import ParseError, RydchainError, ValidationError
from ..noise import mitigate_otoc
from ..runner import grid_csv, read_grid_csv, run, validate_config
from .models import (
    FilePayload,
    HealthResponse,
    MitigateRequest,
    MitigateResponse,
    RunRequest,
    RunResponse,
)

app = FastAPI(
    title="rydchain",
    version=__version__,
    description="Constrained Rydberg-chain simulator: populations, OTOCs, "
    "Holevo information, noise averaging and error mitigation.",
)


@app.get("/api/v1/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/api/v1/run", response_model=RunResponse)
def run_experiment(request: RunRequest) -> RunResponse:
    try:
        cfg = validate_config(request.config)
        manifest, files = run(cfg, seed=request.seed, threads=request.threads)
    except (ParseError, ValidationError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except RydchainError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    payload = [FilePayload(name=n, content=c) for n, c in sorted(files.items())]
    payload.append(FilePayload(name="manifest.json", content=manifest.to_json()))
    return RunResponse(manifest=manifest.__dict__, files=payload)


@app.post("/api/v1/mitigate", response_model=MitigateResponse)
def mitigate(request: MitigateRequest) -> MitigateResponse:
    try:
        zz = read_grid_csv(request.zz_csv)
        iz = read_grid_csv(request.iz_csv)
        corrected = mitigate_otoc(zz, iz, request.floor)
    except RydchainError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return MitigateResponse(csv=grid_csv(corrected))
