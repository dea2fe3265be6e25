"""FastAPI service exposing the operator computations.

All endpoints are pure/stateless: identical request bodies produce identical
responses, so the service can be scaled or called concurrently without
coordination.  Input problems surface as HTTP 400 with a detail object
{"kind": "usage" | "evaluation", "message": ...}; schema violations are the
usual 422.  Non-convergence of a series is not an error: results carry a
converged flag and the caller decides.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Callable, List

from fastapi import FastAPI, HTTPException

from . import __version__
from .analysis import Grid, convergence_study, parse_schedule
from .baskakov import SeriesEval, TruncationPolicy, eval_series, moment_closed
from .errors import ConfigurationError, DomainError, EvaluationError
from .expr import ExpressionSyntaxError, parse
from .king import bound_audit, eval_king, king_moment_closed
from .pq_core import PQParams
from .schemas import (
    BoundsRequest,
    BoundsResponse,
    BoundsRow,
    ConvergeRequest,
    ConvergeResponse,
    ConvergeRow,
    EvalRequest,
    EvalResponse,
    FigureRequest,
    FigureResponse,
    FigureRow,
    FigureSummary,
    MomentsRequest,
    MomentsResponse,
    MomentsRow,
)

EVAL_COLUMNS = ["value", "terms_used", "accumulated_weight", "tail_error_estimate", "converged"]
MOMENTS_COLUMNS = [
    "x",
    "m0_series",
    "m1_series",
    "m2_series",
    "m0_closed",
    "m1_closed",
    "m2_closed",
    "max_abs_gap",
]
BOUNDS_COLUMNS = [
    "n",
    "p",
    "q",
    "x",
    "first_actual_abs",
    "first_bound_claimed",
    "first_violated",
    "second_actual",
    "second_bound_claimed",
    "second_violated",
]
CONVERGE_COLUMNS = ["n", "p_n", "q_n", "bracket_n", "norm_e0", "norm_e1", "norm_e2"]
FIGURE_COLUMNS = ["x", "f", "B_plain", "B_king", "err_plain", "err_king"]


@contextmanager
def _translated_errors():
    try:
        yield
    except (ExpressionSyntaxError, DomainError, ConfigurationError) as exc:
        raise HTTPException(
            status_code=400, detail={"kind": "usage", "message": str(exc)}
        ) from exc
    except EvaluationError as exc:
        raise HTTPException(
            status_code=400, detail={"kind": "evaluation", "message": str(exc)}
        ) from exc


def _policy(req) -> TruncationPolicy:
    return TruncationPolicy(
        tail_tolerance=req.eps, max_terms=req.kmax, growth_exponent=req.growth
    )


def _policy_meta(policy: TruncationPolicy) -> dict:
    return {
        "tail_tolerance": policy.tail_tolerance,
        "max_terms": policy.max_terms,
        "growth_exponent": policy.growth_exponent,
    }


def _grid_meta(grid: Grid) -> dict:
    return {"start": grid.start, "stop": grid.stop, "step": grid.step, "points": len(grid)}


def _evaluate(
    operator: str,
    f: Callable[[float], float],
    n: int,
    x: float,
    pq: PQParams,
    policy: TruncationPolicy,
) -> SeriesEval:
    if operator == "king":
        return eval_king(f, n, x, pq, policy)
    return eval_series(f, n, x, pq, policy)


def run_eval(req: EvalRequest) -> EvalResponse:
    f = parse(req.f)
    pq = PQParams(req.p, req.q)
    policy = _policy(req)
    result = _evaluate(req.operator, f, req.n, req.x, pq, policy)
    return EvalResponse(
        value=result.value,
        terms_used=result.terms_used,
        accumulated_weight=result.accumulated_weight,
        tail_error_estimate=result.tail_error_estimate,
        converged=result.converged,
        meta={
            "columns": EVAL_COLUMNS,
            "operator": req.operator,
            "f": req.f,
            "n": req.n,
            "p": req.p,
            "q": req.q,
            "x": req.x,
            "policy": _policy_meta(policy),
        },
    )


def run_moments(req: MomentsRequest) -> MomentsResponse:
    pq = PQParams(req.p, req.q)
    policy = _policy(req)
    grid = Grid(req.start, req.stop, req.step)
    monomials = [lambda t: 1.0, lambda t: t, lambda t: t * t]
    rows: List[MomentsRow] = []
    all_converged = True
    for x in grid.points:
        x = float(x)
        series = []
        for f in monomials:
            res = _evaluate(req.operator, f, req.n, x, pq, policy)
            all_converged = all_converged and res.converged
            series.append(res.value)
        if req.operator == "king":
            closed = [king_moment_closed(i, req.n, x, pq) for i in range(3)]
        else:
            closed = [moment_closed(i, req.n, x, pq) for i in range(3)]
        gap = max(abs(s - c) for s, c in zip(series, closed))
        rows.append(
            MomentsRow(
                x=x,
                m0_series=series[0],
                m1_series=series[1],
                m2_series=series[2],
                m0_closed=closed[0],
                m1_closed=closed[1],
                m2_closed=closed[2],
                max_abs_gap=gap,
            )
        )
    return MomentsResponse(
        rows=rows,
        meta={
            "columns": MOMENTS_COLUMNS,
            "operator": req.operator,
            "n": req.n,
            "p": req.p,
            "q": req.q,
            "grid": _grid_meta(grid),
            "policy": _policy_meta(policy),
            "converged": all_converged,
        },
    )


def run_bounds(req: BoundsRequest) -> BoundsResponse:
    grid = Grid(req.start, req.stop, req.step)
    pq_list = [PQParams(pair.p, pair.q) for pair in req.pq_list]
    audit = bound_audit(req.n_list, pq_list, [float(x) for x in grid.points])
    rows = [
        BoundsRow(
            n=row.n,
            p=row.p,
            q=row.q,
            x=row.x,
            first_actual_abs=row.first_actual_abs,
            first_bound_claimed=row.first_bound_claimed,
            first_violated=row.first_violated,
            second_actual=row.second_actual,
            second_bound_claimed=row.second_bound_claimed,
            second_violated=row.second_violated,
        )
        for row in audit
    ]
    return BoundsResponse(
        rows=rows,
        meta={
            "columns": BOUNDS_COLUMNS,
            "n_list": list(req.n_list),
            "pq_list": [[pair.p, pair.q] for pair in req.pq_list],
            "grid": _grid_meta(grid),
            "violations": sum(1 for r in rows if r.first_violated or r.second_violated),
        },
    )


def run_converge(req: ConvergeRequest) -> ConvergeResponse:
    schedule = parse_schedule(req.schedule)
    grid = Grid(req.start, req.stop, req.step)
    rows = [
        ConvergeRow(
            n=row.n,
            p_n=row.p_n,
            q_n=row.q_n,
            bracket_n=row.bracket_n,
            norm_e0=row.norm_e0,
            norm_e1=row.norm_e1,
            norm_e2=row.norm_e2,
        )
        for row in convergence_study(schedule, req.n_list, grid)
    ]
    return ConvergeResponse(
        rows=rows,
        meta={
            "columns": CONVERGE_COLUMNS,
            "schedule": req.schedule,
            "n_list": sorted(set(req.n_list)),
            "grid": _grid_meta(grid),
        },
    )


def run_figure(req: FigureRequest) -> FigureResponse:
    f = parse(req.f)
    pq = PQParams(req.p, req.q)
    policy = _policy(req)
    grid = Grid(req.start, req.stop, req.step)
    rows: List[FigureRow] = []
    sup_plain = 0.0
    sup_king = 0.0
    all_converged = True
    for x in grid.points:
        x = float(x)
        fx = f(x)
        plain = eval_series(f, req.n, x, pq, policy)
        king = eval_king(f, req.n, x, pq, policy)
        all_converged = all_converged and plain.converged and king.converged
        err_plain = plain.value - fx
        err_king = king.value - fx
        sup_plain = max(sup_plain, abs(err_plain))
        sup_king = max(sup_king, abs(err_king))
        rows.append(
            FigureRow(
                x=x,
                f=fx,
                B_plain=plain.value,
                B_king=king.value,
                err_plain=err_plain,
                err_king=err_king,
            )
        )
    return FigureResponse(
        rows=rows,
        summary=FigureSummary(sup_err_plain=sup_plain, sup_err_king=sup_king),
        meta={
            "columns": FIGURE_COLUMNS,
            "f": req.f,
            "n": req.n,
            "p": req.p,
            "q": req.q,
            "grid": _grid_meta(grid),
            "policy": _policy_meta(policy),
            "converged": all_converged,
        },
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="pqbaskakov",
        version=__version__,
        description="Two-parameter Baskakov-type operators and their x^2-preserving modification.",
    )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/eval", response_model=EvalResponse)
    def eval_endpoint(req: EvalRequest):
        with _translated_errors():
            return run_eval(req)

    @app.post("/moments", response_model=MomentsResponse)
    def moments_endpoint(req: MomentsRequest):
        with _translated_errors():
            return run_moments(req)

    @app.post("/bounds", response_model=BoundsResponse)
    def bounds_endpoint(req: BoundsRequest):
        with _translated_errors():
            return run_bounds(req)

    @app.post("/converge", response_model=ConvergeResponse)
    def converge_endpoint(req: ConvergeRequest):
        with _translated_errors():
            return run_converge(req)

    @app.post("/figure", response_model=FigureResponse)
    def figure_endpoint(req: FigureRequest):
        with _translated_errors():
            return run_figure(req)

    return app
