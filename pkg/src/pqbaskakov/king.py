"""King-type modification of the Baskakov-type operator.

The modified operator re-bases the same weights and nodes at rebase_point(x), the
non-negative root of ([n] + p^n/q) r^2 + p^(n-1) r - [n] x^2 = 0, which makes
the operator reproduce x^2 exactly.  Alongside the moments this module
carries the central moments, the claimed first/second central-moment bounds
(audited, never assumed -- they fail at desk scale, see bound_audit), and the
auxiliary operator used in the smoothness-bound argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple

from .baskakov import SeriesEval, TruncationPolicy, eval_series
from .errors import DomainError
from .pq_core import PQParams, pq_integer

__all__ = [
    "rebase_point",
    "eval_king",
    "king_moment_closed",
    "CentralMoments",
    "central_moments",
    "BoundAuditRow",
    "bound_audit",
    "auxiliary_operator",
]

# flags fire only on violations beyond float noise
_AUDIT_SLACK = 1e-12


def rebase_point(x: float, n: int, pq: PQParams) -> float:
    """Re-based evaluation point: the non-negative root of
    ([n] + p^n/q) r^2 + p^(n-1) r - [n] x^2 = 0; satisfies 0 <= rebase_point(x) <= x.

    The rationalized form 2 [n] x^2 / (p^(n-1) + sqrt(disc)) is used where
    4 [n] ([n] + p^n/q) x^2 < p^(2n-2), avoiding cancellation for small x.
    """
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if n < 1:
        raise DomainError(f"operator order n must be >= 1, got {n}")
    bracket = pq_integer(n, pq)
    a = bracket + pq.p**n / pq.q
    b = pq.p ** (n - 1)
    four_ac = 4.0 * a * bracket * x * x
    disc = math.sqrt(b * b + four_ac)
    if four_ac < b * b:
        return 2.0 * bracket * x * x / (b + disc)
    return (-b + disc) / (2.0 * a)


def eval_king(
    f: Callable[[float], float],
    n: int,
    x: float,
    pq: PQParams,
    policy: Optional[TruncationPolicy] = None,
) -> SeriesEval:
    """Series value of the modified operator: the plain series based at rebase_point(x)."""
    return eval_series(f, n, rebase_point(x, n, pq), pq, policy)


def king_moment_closed(i: int, n: int, x: float, pq: PQParams) -> float:
    """Closed-form moments of the modified operator: 1, rebase_point(x), x^2."""
    if i == 0:
        return 1.0
    if i == 1:
        return rebase_point(x, n, pq)
    if i == 2:
        return float(x) * float(x)
    raise DomainError(f"moment order must be 0, 1 or 2, got {i}")


@dataclass(frozen=True)
class CentralMoments:
    """First and second central moments at x plus the claimed bound values.

    The *_bound_claimed fields are the claimed right-hand sides, evaluated verbatim;
    they are diagnostics for the audit, not guarantees (the second invariant
    that does hold everywhere is second >= 0).
    """

    first: float
    second: float
    first_bound_claimed: float
    second_bound_claimed: float


def _bound_pieces(n: int, pq: PQParams) -> Tuple[float, float]:
    # shared coefficient (sqrt(p^n/q) - p^n/(q sqrt([n]))) / (sqrt([n]) + p^n/(q sqrt([n])))
    bracket = pq_integer(n, pq)
    pnq = pq.p**n / pq.q
    root = math.sqrt(bracket)
    coeff = (math.sqrt(pnq) - pnq / root) / (root + pnq / root)
    second_linear = pq.p ** (n - 1) / (pnq + bracket)
    return coeff, second_linear


def central_moments(n: int, x: float, pq: PQParams) -> CentralMoments:
    """Central moments rebase_point(x)-x and 2x^2-2x rebase_point(x), with the claimed bounds."""
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    r = rebase_point(x, n, pq)
    coeff, second_linear = _bound_pieces(n, pq)
    return CentralMoments(
        first=r - x,
        second=2.0 * x * x - 2.0 * x * r,
        first_bound_claimed=coeff * x,
        second_bound_claimed=2.0 * coeff * x * x + second_linear * x,
    )


@dataclass(frozen=True)
class BoundAuditRow:
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


def bound_audit(
    n_list: Iterable[int],
    pq_list: Iterable[PQParams],
    x_grid: Iterable[float],
) -> List[BoundAuditRow]:
    """Systematic check of the claimed central-moment bounds.

    One row per (n, pq, x) comparing |first| and second against the claimed
    right-hand sides; the violation flags are the record of where the claimed
    inequalities hold and where they do not.
    """
    rows: List[BoundAuditRow] = []
    for n in n_list:
        for pq in pq_list:
            for x in x_grid:
                cm = central_moments(n, x, pq)
                rows.append(
                    BoundAuditRow(
                        n=n,
                        p=pq.p,
                        q=pq.q,
                        x=x,
                        first_actual_abs=abs(cm.first),
                        first_bound_claimed=cm.first_bound_claimed,
                        first_violated=abs(cm.first)
                        > cm.first_bound_claimed + _AUDIT_SLACK,
                        second_actual=cm.second,
                        second_bound_claimed=cm.second_bound_claimed,
                        second_violated=cm.second
                        > cm.second_bound_claimed + _AUDIT_SLACK,
                    )
                )
    return rows


def auxiliary_operator(
    f: Callable[[float], float],
    n: int,
    x: float,
    pq: PQParams,
    policy: Optional[TruncationPolicy] = None,
) -> float:
    """The shifted operator B*(f;x) + f(x) - f(rebase_point(x)).

    It reproduces constants and the identity exactly, which is what the
    smoothness-bound argument needs.
    """
    r = rebase_point(x, n, pq)
    base = eval_series(f, n, r, pq, policy)
    return base.value + f(float(x)) - f(r)
