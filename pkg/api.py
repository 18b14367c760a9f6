"""FastAPI REST API for outer-factor computations and experiment reports."""

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from src.config import RICHARDSON, SOLVER_METHOD, TRUNCATION
from src.errors import FactorizationError
from src.experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from src.interp_spaces import operator_distortion
from src.reports import to_plain
from src.spectral_factorization import METHODS, factor_at_zero
from src.weight_loader import WeightDocument, build_weight

app = FastAPI(
    title="Outer Factor API",
    description="Matrix outer-function values at the origin and rearrangement experiments",
    version="1.0.0",
)


# --- Request/Response Models ---


class SolverOptions(BaseModel):
    truncation: int = Field(default=TRUNCATION, ge=1, le=1 << 16)
    method: str = Field(default=SOLVER_METHOD, pattern="^(" + "|".join(METHODS) + ")$")
    richardson: bool = RICHARDSON


class FactorRequest(SolverOptions):
    weight: WeightDocument


class FactorResponse(BaseModel):
    M0: list
    F0: list
    truncation: int
    constancy_residual: float
    constancy_rms: float
    neumann_ratio: float
    extrapolated: bool
    non_constant: bool
    iterations: int


class DistortionRequest(SolverOptions):
    weight: WeightDocument
    weight2: WeightDocument


class DistortionResponse(BaseModel):
    distortion: float
    F0: list
    F0_2: list


def _factor(document, options: SolverOptions):
    W = build_weight(document)
    M = options.truncation
    if hasattr(W, "grid_size"):
        M = min(M, W.grid_size // 2 - 1)
    return factor_at_zero(W, M, method=options.method, richardson=options.richardson)


def _guarded(func):
    try:
        return func()
    except np.linalg.LinAlgError as e:
        raise HTTPException(422, str(e)) from None
    except (FactorizationError, ValueError, ArithmeticError) as e:
        raise HTTPException(400, str(e)) from None


# --- Health ---


@app.get("/health")
def health():
    return {"status": "ok", "experiments": sorted(EXPERIMENTS)}


# --- Factorization ---


@app.post("/factor", response_model=FactorResponse)
def factor(req: FactorRequest):
    result = _guarded(lambda: _factor(req.weight, req))
    return FactorResponse(
        M0=to_plain(result.M0),
        F0=to_plain(result.F0),
        truncation=result.truncation,
        constancy_residual=result.constancy_residual,
        constancy_rms=result.constancy_rms,
        neumann_ratio=result.neumann_ratio,
        extrapolated=result.extrapolated,
        non_constant=result.non_constant,
        iterations=result.iterations,
    )


@app.post("/distortion", response_model=DistortionResponse)
def distortion(req: DistortionRequest):
    def compute():
        first = _factor(req.weight, req)
        second = _factor(req.weight2, req)
        if first.F0.shape != second.F0.shape:
            raise ValueError("weights must have the same dimension")
        return first, second, operator_distortion(first.F0, second.F0)

    first, second, value = _guarded(compute)
    return DistortionResponse(distortion=value, F0=to_plain(first.F0), F0_2=to_plain(second.F0))


# --- Experiments ---


@app.post("/experiments/{name}")
def experiment(name: str, config: ExperimentConfig | None = None):
    if name not in EXPERIMENTS:
        raise HTTPException(404, f"Unknown experiment: {name}")
    report = _guarded(lambda: run_experiment(name, config or ExperimentConfig()))
    payload = to_plain(report)
    payload["passed"] = report.passed
    return payload
