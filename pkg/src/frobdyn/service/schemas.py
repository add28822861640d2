"""Pydantic request/response models for the HTTP service.

Rational numbers travel as "a/b" strings; matrices over non-integer rings use
coordinate lists per entry. The verdict and normal-form payloads are nested
documents produced by the core serializers and are carried as dicts.
"""

from __future__ import annotations

from typing import Literal, Union

from pydantic import BaseModel, Field

Scalar = Union[int, str]
MatrixEntry = Union[int, str, list[Scalar]]
MatrixEntries = list[list[MatrixEntry]]


class RingSpec(BaseModel):
    kind: Literal["integer", "quadratic", "quaternion"] = "integer"
    trace: Scalar | None = None
    norm: int | None = None
    a: Scalar | None = None
    b: Scalar | None = None
    basis: list[list[Scalar]] | None = None
    frobenius: list[Scalar] | None = None


class FactorSpec(BaseModel):
    type: Literal["torus", "abstract"]
    rank: int
    label: str | None = None
    dim: int = 1
    ring: RingSpec | None = None


class MapSpec(BaseModel):
    blocks: list[MatrixEntries]
    denominator: int = 1
    translation: list[str] | None = None
    abstract_translation: list[str] | None = None


class SystemDescription(BaseModel):
    p: int
    e: int = 1
    d: int
    defining_poly: list[int] | None = None
    group: list[FactorSpec]
    map: MapSpec


class AnalyzeOptionsModel(BaseModel):
    m_bound: int = 24
    orbit_steps: int = 50
    degree_bound: int = 3
    spec_trials: int = 5
    index_bound: int = 64
    seed: int = 0


class AnalyzeRequest(BaseModel):
    system: SystemDescription
    d: int | None = None
    options: AnalyzeOptionsModel = Field(default_factory=AnalyzeOptionsModel)


class AnalyzeResponse(BaseModel):
    verdict: dict


class SimulateRequest(BaseModel):
    system: SystemDescription
    start: list[str] | None = None
    steps: int = 10
    torsion_rule: Literal["deterministic", "enumerate"] = "deterministic"


class OrbitRow(BaseModel):
    step: int
    exponents: list[list[str]]
    torsion: list[str]
    modulus: int


class SimulateResponse(BaseModel):
    basis: list[str]
    rows: list[OrbitRow]


class ReduceRequest(BaseModel):
    system: SystemDescription


class ReduceResponse(BaseModel):
    normal_form: dict


class JordanRequest(BaseModel):
    q: int = 2
    ring: RingSpec = Field(default_factory=RingSpec)
    matrix: MatrixEntries


class JordanBlock(BaseModel):
    eigenvalue: list[str]
    size: int


class JordanResponse(BaseModel):
    blocks: list[JordanBlock]
    conjugator: MatrixEntries
    conjugator_inverse: MatrixEntries
    denominator: int = 1
    verified: bool


class FieldSpec(BaseModel):
    p: int
    e: int = 1
    d: int = 1
    defining_poly: list[int] | None = None


class PointCoords(BaseModel):
    exponents: list[list[Scalar]]
    torsion: list[Scalar] | None = None


class FSetSpec(BaseModel):
    basis: list[str]
    gamma: PointCoords
    generators: list[PointCoords]
    steps: list[int]
    lattice: list[PointCoords] = Field(default_factory=list)
    ell: int = 1
    f_stable: bool = True


class FSetMemberRequest(BaseModel):
    field: FieldSpec
    fset: FSetSpec
    point: PointCoords


class FSetMemberResponse(BaseModel):
    member: bool
    certificate: dict | None = None


class FrobTermSpec(BaseModel):
    c: Scalar
    delta: int = 1


class FrobEqSpec(BaseModel):
    q: int
    ring: RingSpec = Field(default_factory=RingSpec)
    poly: list[Scalar]
    c0: Scalar = 0
    terms: list[FrobTermSpec] = Field(default_factory=list)


class CountFrobEqRequest(BaseModel):
    eq: FrobEqSpec
    n_max: int


class CountFrobEqResponse(BaseModel):
    count: int
    curve: list[list[float]]
    fitted_polylog_constant: float
    term_count: int
    degenerate_constant: bool


class SolveFrobEqRequest(BaseModel):
    eq: FrobEqSpec
    n: int


class SolveFrobEqResponse(BaseModel):
    solvable: bool
    solution: list[int] | None = None
