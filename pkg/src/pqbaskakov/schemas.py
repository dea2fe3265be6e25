"""Pydantic request/response models for the HTTP service.

Responses carry their tabular payload as `rows` (array of objects) plus a
`meta` object with the column order, grid/policy parameters and aggregate
convergence flags, so clients can render CSV without knowing the math.
"""

from __future__ import annotations

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator


class PQFieldsMixin(BaseModel):
    p: float = Field(gt=0.0, le=1.0)
    q: float = Field(gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_order(self):
        if not self.q < self.p:
            raise ValueError(f"requires q < p, got p={self.p}, q={self.q}")
        return self


class PolicyFieldsMixin(BaseModel):
    eps: float = Field(default=1e-12, gt=0.0, description="tail tolerance")
    kmax: int = Field(default=10000, ge=1, description="term cap")
    growth: int = Field(default=2, ge=0, description="polynomial growth of f")


class RangeFieldsMixin(BaseModel):
    start: float = Field(ge=0.0)
    stop: float
    step: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _check_span(self):
        if not self.stop > self.start:
            raise ValueError(f"requires stop > start, got {self.start}..{self.stop}")
        return self


class PQPair(PQFieldsMixin):
    pass


class EvalRequest(PQFieldsMixin, PolicyFieldsMixin):
    f: str
    n: int = Field(ge=1)
    x: float = Field(ge=0.0)
    operator: Literal["plain", "king"] = "plain"


class EvalResponse(BaseModel):
    value: float
    terms_used: int
    accumulated_weight: float
    tail_error_estimate: float
    converged: bool
    meta: Dict = Field(default_factory=dict)


class MomentsRequest(PQFieldsMixin, PolicyFieldsMixin, RangeFieldsMixin):
    n: int = Field(ge=1)
    operator: Literal["plain", "king"] = "plain"


class MomentsRow(BaseModel):
    x: float
    m0_series: float
    m1_series: float
    m2_series: float
    m0_closed: float
    m1_closed: float
    m2_closed: float
    max_abs_gap: float


class MomentsResponse(BaseModel):
    rows: List[MomentsRow]
    meta: Dict = Field(default_factory=dict)


class BoundsRequest(RangeFieldsMixin):
    n_list: List[int] = Field(min_length=1)
    pq_list: List[PQPair] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_orders(self):
        for n in self.n_list:
            if n < 1:
                raise ValueError(f"operator orders must be >= 1, got {n}")
        return self


class BoundsRow(BaseModel):
    n: int
    p: float
    q: float
    x: float
    first_actual_abs: float
    first_bound_claimed: float
    first_violated: bool
    second_actual: float
    second_bound_claimed: float
    second_violated: bool


class BoundsResponse(BaseModel):
    rows: List[BoundsRow]
    meta: Dict = Field(default_factory=dict)


class ConvergeRequest(RangeFieldsMixin):
    schedule: str
    n_list: List[int] = Field(min_length=1)


class ConvergeRow(BaseModel):
    n: int
    p_n: float
    q_n: float
    bracket_n: float
    norm_e0: float
    norm_e1: float
    norm_e2: float


class ConvergeResponse(BaseModel):
    rows: List[ConvergeRow]
    meta: Dict = Field(default_factory=dict)


class FigureRequest(PQFieldsMixin, PolicyFieldsMixin, RangeFieldsMixin):
    f: str
    n: int = Field(ge=1)


class FigureRow(BaseModel):
    x: float
    f: float
    B_plain: float
    B_king: float
    err_plain: float
    err_king: float


class FigureSummary(BaseModel):
    sup_err_plain: float
    sup_err_king: float


class FigureResponse(BaseModel):
    rows: List[FigureRow]
    summary: FigureSummary
    meta: Dict = Field(default_factory=dict)
