"""Grid-based moduli of continuity, weighted norms, and the quantitative
convergence/error statements as computable reports.

Suprema over [0, inf) are approximated on finite uniform grids, so every
modulus and norm here is an under-approximation whose resolution travels
with the result (the Grid carries start/stop/step provenance).  Default
grids: [0, 10] step 0.01 for moduli, [0, 50] step 0.01 for weighted norms;
the 1/(1+x^2) weight makes the truncated far tail negligible for the
functions in scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from .baskakov import TruncationPolicy
from .errors import ConfigurationError, DomainError, EvaluationError
from .expr import parse as parse_expr
from .king import _bound_pieces, eval_king, rebase_point
from .pq_core import PQParams, pq_integer

__all__ = [
    "Grid",
    "modulus",
    "modulus2",
    "weighted_norm",
    "ConvergenceRow",
    "convergence_study",
    "parse_schedule",
    "smoothness_radius",
    "SmoothnessBoundRow",
    "SmoothnessBoundReport",
    "smoothness_bound_report",
    "composed_modulus_bound",
    "DEFAULT_MODULUS_GRID",
    "DEFAULT_NORM_GRID",
]


@dataclass(frozen=True)
class Grid:
    """Uniform evaluation abscissae with start/stop/step provenance.

    The right endpoint is included when (stop - start)/step is integral
    within 1e-9; spacing is uniform by construction.
    """

    start: float
    stop: float
    step: float
    points: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        if self.start < 0:
            raise DomainError(f"grid start must be >= 0, got {self.start}")
        if self.stop <= self.start:
            raise DomainError(f"grid stop must exceed start, got {self.stop}")
        if self.step <= 0:
            raise DomainError(f"grid step must be positive, got {self.step}")
        if self.points is None:
            count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
            pts = self.start + self.step * np.arange(count)
            object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)


DEFAULT_MODULUS_GRID = Grid(0.0, 10.0, 0.01)
DEFAULT_NORM_GRID = Grid(0.0, 50.0, 0.01)


def _sample(f: Callable[[float], float], xs: np.ndarray) -> np.ndarray:
    values = np.empty(len(xs))
    for i, x in enumerate(xs):
        v = f(float(x))
        if not math.isfinite(v):
            raise EvaluationError(f"function returned non-finite value {v!r} at {x}")
        values[i] = v
    return values


def modulus(f: Callable[[float], float], delta: float, grid: Optional[Grid] = None) -> float:
    """Grid supremum of |f(x+h) - f(x)| over x in the grid, 0 <= h <= delta.

    Shifts h run over multiples of the grid step, so the result
    under-approximates the true modulus by at most the grid resolution.
    """
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    grid = grid or DEFAULT_MODULUS_GRID
    shifts = int(math.floor(delta / grid.step + 1e-9))
    n = len(grid)
    xs = grid.start + grid.step * np.arange(n + shifts)
    fv = _sample(f, xs)
    best = 0.0
    for j in range(1, shifts + 1):
        best = max(best, float(np.max(np.abs(fv[j : j + n] - fv[:n]))))
    return best


def modulus2(f: Callable[[float], float], delta: float, grid: Optional[Grid] = None) -> float:
    """Grid supremum of the second difference |f(x+2h) - 2f(x+h) + f(x)|,
    with the shift h running over [0, sqrt(delta)]."""
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    grid = grid or DEFAULT_MODULUS_GRID
    shifts = int(math.floor(math.sqrt(delta) / grid.step + 1e-9))
    n = len(grid)
    xs = grid.start + grid.step * np.arange(n + 2 * shifts)
    fv = _sample(f, xs)
    best = 0.0
    for j in range(1, shifts + 1):
        second = fv[2 * j : 2 * j + n] - 2.0 * fv[j : j + n] + fv[:n]
        best = max(best, float(np.max(np.abs(second))))
    return best


def weighted_norm(f: Callable[[float], float], m: int, grid: Optional[Grid] = None) -> float:
    """Grid supremum of |f(x)| / (1 + x^m)."""
    if m < 0:
        raise DomainError(f"weight exponent must be >= 0, got {m}")
    grid = grid or DEFAULT_NORM_GRID
    fv = _sample(f, grid.points)
    return float(np.max(np.abs(fv) / (1.0 + grid.points**m)))


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    p_n: float
    q_n: float
    bracket_n: float
    norm_e0: float
    norm_e1: float
    norm_e2: float


Schedule = Callable[[int], Tuple[float, float]]


def parse_schedule(text: str) -> Schedule:
    """Compile a schedule string "p=<expr>,q=<expr>" (expressions in n).

    Example built-ins: "p=1-1/(n+1)^2,q=1-1/(n+1)" and "p=1,q=1-1/(n+1)".
    """
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigurationError(
            f"schedule must be 'p=<expr>,q=<expr>', got {text!r}"
        )
    exprs = {}
    for part in parts:
        name, _, body = part.partition("=")
        name = name.strip()
        if name not in ("p", "q") or not body.strip():
            raise ConfigurationError(
                f"schedule must be 'p=<expr>,q=<expr>', got {text!r}"
            )
        exprs[name] = parse_expr(body.strip(), variable="n")
    if set(exprs) != {"p", "q"}:
        raise ConfigurationError(f"schedule must define both p and q, got {text!r}")

    def schedule(n: int) -> Tuple[float, float]:
        return exprs["p"](float(n)), exprs["q"](float(n))

    return schedule


def convergence_study(
    schedule: Schedule,
    n_list: Iterable[int],
    grid: Optional[Grid] = None,
) -> List[ConvergenceRow]:
    """Weighted-norm distances of the modified operator on the test functions
    e0, e1, e2 along a parameter schedule.

    e0 and e2 are reproduced identically, so their norms are recorded as
    exactly 0; the e1 norm is the grid supremum of (x - rebase_point(x))/(1 + x^2),
    needing only the closed form of rebase_point.
    """
    grid = grid or DEFAULT_NORM_GRID
    rows: List[ConvergenceRow] = []
    for n in sorted(set(int(n) for n in n_list)):
        p_n, q_n = schedule(n)
        if not (0.0 < q_n < p_n <= 1.0):
            raise ConfigurationError(
                f"schedule violates 0 < q < p <= 1 at n={n}: p_n={p_n}, q_n={q_n}"
            )
        pq = PQParams(p_n, q_n)
        sup = 0.0
        for x in grid.points:
            x = float(x)
            val = (x - rebase_point(x, n, pq)) / (1.0 + x * x)
            if val > sup:
                sup = val
        rows.append(
            ConvergenceRow(
                n=n,
                p_n=p_n,
                q_n=q_n,
                bracket_n=pq_integer(n, pq),
                norm_e0=0.0,
                norm_e1=sup,
                norm_e2=0.0,
            )
        )
    return rows


def smoothness_radius(n: int, x: float, pq: PQParams, as_claimed: bool = False) -> float:
    """Radius fed to the second-order modulus in the smoothness bound.

    The default carries x^2 on the first term, which is what the underlying
    inequality chain actually produces; as_claimed=True evaluates the claimed
    variant, which drops that x^2 (audit use only).
    """
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    coeff, second_linear = _bound_pieces(n, pq)
    first = 3.0 * coeff if as_claimed else 3.0 * coeff * x * x
    return first + second_linear * x


@dataclass(frozen=True)
class SmoothnessBoundRow:
    x: float
    lhs: float
    omega2_part: float
    omega_part: float
    m_required: float


@dataclass(frozen=True)
class SmoothnessBoundReport:
    rows: List[SmoothnessBoundRow]
    max_m_required: float
    grid: Grid
    modulus_grid: Grid


def smoothness_bound_report(
    f: Callable[[float], float],
    n: int,
    pq: PQParams,
    grid: Grid,
    policy: Optional[TruncationPolicy] = None,
    modulus_grid: Optional[Grid] = None,
) -> SmoothnessBoundReport:
    """Empirical profile of the two-part smoothness bound.

    Per grid point: lhs = |B*(f;x) - f(x)|; the bound's parts are
    omega2(f, sqrt(smoothness_radius)) and omega(f, coeff * x) with coeff the
    first-central-moment bound coefficient.  The absolute constant in front
    of the omega2 part is unspecified, so instead of a pass/fail the report
    carries the constant each point would require and its grid maximum.
    Series truncation noise (the eval's own tail estimate) is deducted
    before attributing any error to the bound, so constants report 0 rather
    than an infinite constant over two vanishing moduli.
    """
    modulus_grid = modulus_grid or DEFAULT_MODULUS_GRID
    coeff, _ = _bound_pieces(n, pq)
    rows: List[SmoothnessBoundRow] = []
    worst = 0.0
    for x in grid.points:
        x = float(x)
        res = eval_king(f, n, x, pq, policy)
        lhs = abs(res.value - f(x))
        omega2_part = modulus2(f, math.sqrt(smoothness_radius(n, x, pq)), modulus_grid)
        omega_part = modulus(f, coeff * x, modulus_grid)
        excess = lhs - omega_part - res.tail_error_estimate
        if excess <= 0.0:
            m_required = 0.0
        elif omega2_part > 0.0:
            m_required = excess / omega2_part
        else:
            m_required = math.inf
        worst = max(worst, m_required)
        rows.append(SmoothnessBoundRow(x, lhs, omega2_part, omega_part, m_required))
    return SmoothnessBoundReport(rows, worst, grid, modulus_grid)


def composed_modulus_bound(
    f: Callable[[float], float],
    n: int,
    x: float,
    pq: PQParams,
    grid: Optional[Grid] = None,
) -> float:
    """Modulus bound through f*(z) = f(z^2): 2 * omega(f*, sqrt(radicand)).

    The radicand is 2(sqrt(p^n/q) - p^n/(q sqrt([n]))) x / (sqrt([n]) +
    p^n/(q sqrt([n]))) + p^(n-1)/(p^n/q + [n]).  Outside the near-1 parameter
    regime its first factor can go negative (e.g. n=1); that is reported as a
    domain error, never clamped.
    """
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    coeff, second_linear = _bound_pieces(n, pq)
    radicand = 2.0 * coeff * x + second_linear
    if radicand < 0:
        raise DomainError(
            f"negative radicand {radicand} at n={n}, p={pq.p}, q={pq.q}, x={x}: "
            "parameters are outside the bound's regime"
        )
    f_star = lambda z: f(z * z)
    return 2.0 * modulus(f_star, math.sqrt(radicand), grid)
