"""FastAPI application exposing the analysis operations.

Run with: uvicorn frobdyn.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import DomainError, InternalError, Unsupported
from . import handlers, schemas

app = FastAPI(
    title="frobdyn",
    description=(
        "Exact analysis of dominant self-maps on split algebraic tori and "
        "semiabelian factor products in positive characteristic"
    ),
    version="0.1.0",
)


def _run(handler, doc):
    try:
        return handler(doc)
    except (DomainError, Unsupported) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except InternalError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc


@app.get("/healthz")
def healthz():
    return {"status": "ok"}


@app.post("/analyze", response_model=schemas.AnalyzeResponse)
def analyze_endpoint(req: schemas.AnalyzeRequest):
    return {"verdict": _run(handlers.handle_analyze, req.model_dump())}


@app.post("/simulate", response_model=schemas.SimulateResponse)
def simulate_endpoint(req: schemas.SimulateRequest):
    return _run(handlers.handle_simulate, req.model_dump())


@app.post("/reduce", response_model=schemas.ReduceResponse)
def reduce_endpoint(req: schemas.ReduceRequest):
    return _run(handlers.handle_reduce, req.model_dump())


@app.post("/jordan", response_model=schemas.JordanResponse)
def jordan_endpoint(req: schemas.JordanRequest):
    return _run(handlers.handle_jordan, req.model_dump())


@app.post("/fset-member", response_model=schemas.FSetMemberResponse)
def fset_member_endpoint(req: schemas.FSetMemberRequest):
    return _run(handlers.handle_fset_member, req.model_dump())


@app.post("/count-frobeq", response_model=schemas.CountFrobEqResponse)
def count_frobeq_endpoint(req: schemas.CountFrobEqRequest):
    return _run(handlers.handle_count_frobeq, req.model_dump())


@app.post("/solve-frobeq", response_model=schemas.SolveFrobEqResponse)
def solve_frobeq_endpoint(req: schemas.SolveFrobEqRequest):
    return _run(handlers.handle_solve_frobeq, req.model_dump())
