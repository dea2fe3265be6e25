"""Two-parameter (p,q)-calculus primitives.

Everything downstream (operator weights, nodes, moments) is built from the
(p,q)-integer, factorial, binomial coefficient, the rising power in its
product form, and the (p,q)-difference quotient.  The parameter domain is
0 < q < p <= 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

from .errors import DomainError, EvaluationError

__all__ = [
    "PQParams",
    "pq_integer",
    "pq_factorial",
    "pq_binomial",
    "pq_rising_power",
    "pq_rising_power_log",
    "pq_power_expand",
    "pq_derivative",
]

# log-space accumulation kicks in for binomials past this index size
_LOG_BINOMIAL_CUTOFF = 150


@dataclass(frozen=True)
class PQParams:
    """The parameter pair (p, q) with 0 < q < p <= 1."""

    p: float
    q: float

    def __post_init__(self) -> None:
        if not (0.0 < self.q < self.p <= 1.0):
            raise DomainError(
                f"parameters require 0 < q < p <= 1, got p={self.p}, q={self.q}"
            )

    @property
    def ratio(self) -> float:
        """q/p, strictly inside (0, 1)."""
        return self.q / self.p


def _check_index(n: int, name: str = "n") -> None:
    if n < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {n}")


def pq_integer(n: int, pq: PQParams) -> float:
    """The (p,q)-integer [n].

    Computed as the sum p^(n-1) + p^(n-2) q + ... + q^(n-1), which is
    algebraically equal to (p^n - q^n)/(p - q) but stays stable as q -> p.
    """
    _check_index(n)
    if n == 0:
        return 0.0
    p, q = pq.p, pq.q
    return math.fsum(p ** (n - 1 - j) * q**j for j in range(n))


def pq_factorial(n: int, pq: PQParams) -> float:
    """The (p,q)-factorial [n]! = [n][n-1]...[1], with [0]! = 1."""
    _check_index(n)
    out = 1.0
    for m in range(2, n + 1):
        out *= pq_integer(m, pq)
    return out


def _log_pq_integer(m: int, pq: PQParams) -> float:
    # [m] = p^(m-1) (1 - s^m)/(1 - s) with s = q/p; no cancellation for s < 1
    s = pq.ratio
    return (m - 1) * math.log(pq.p) + math.log1p(-(s**m)) - math.log1p(-s)


def pq_binomial(n: int, k: int, pq: PQParams) -> float:
    """The (p,q)-binomial coefficient [n]!/([k]![n-k]!).

    Evaluated by the incremental ratio recurrence C_{j+1} = C_j [n-j]/[j+1]
    rather than by dividing factorials; a log-space path takes over once the
    indices are large enough for the running products to lose headroom.
    """
    _check_index(n)
    _check_index(k, "k")
    if k > n:
        raise DomainError(f"binomial index k={k} exceeds n={n}")
    k = min(k, n - k)
    if n + k > _LOG_BINOMIAL_CUTOFF:
        log_c = math.fsum(
            _log_pq_integer(n - j, pq) - _log_pq_integer(j + 1, pq) for j in range(k)
        )
        return math.exp(log_c)
    out = 1.0
    for j in range(k):
        out *= pq_integer(n - j, pq) / pq_integer(j + 1, pq)
    return out


def pq_rising_power(x: float, n: int, pq: PQParams) -> float:
    """Product form of the (p,q)-rising power: prod_{j<n} (p^j + q^j x)."""
    _check_index(n)
    if x < 0:
        raise DomainError(f"rising power requires x >= 0, got {x}")
    out = 1.0
    pj = 1.0
    qj = 1.0
    for _ in range(n):
        out *= pj + qj * x
        pj *= pq.p
        qj *= pq.q
    return out


def pq_rising_power_log(x: float, n: int, pq: PQParams) -> float:
    """log of the rising power, safe for large n where the product over/underflows.

    Each factor is written p^j (1 + (q/p)^j x) so only bounded log1p terms
    accumulate next to the exactly-known j*log(p) part.
    """
    _check_index(n)
    if x < 0:
        raise DomainError(f"rising power requires x >= 0, got {x}")
    log_p = math.log(pq.p)
    s = pq.ratio
    sj = 1.0
    terms = []
    for j in range(n):
        terms.append(j * log_p + math.log1p(sj * x))
        sj *= s
    return math.fsum(terms)


def pq_power_expand(n: int, pq: PQParams) -> List[float]:
    """Coefficients [n choose k] for k = 0..n of the (p,q)-power expansion.

    Only the coefficient list is produced: for p != q the expansion and the
    product form of the rising power are distinct objects and are kept so.
    """
    _check_index(n)
    coeffs = [1.0]
    c = 1.0
    for j in range(n):
        c *= pq_integer(n - j, pq) / pq_integer(j + 1, pq)
        coeffs.append(c)
    return coeffs


def pq_derivative(f: Callable[[float], float], x: float, pq: PQParams) -> float:
    """The (p,q)-difference quotient (f(px) - f(qx)) / ((p-q) x).

    At x = 0 the quotient degenerates; a central finite difference with step
    1e-6 * max(1, |f(1)|) stands in for the classical derivative there.
    """
    if x == 0.0:
        h = 1e-6 * max(1.0, abs(f(1.0)))
        lo, hi = f(-h), f(h)
        _require_finite(hi, h)
        _require_finite(lo, -h)
        return (hi - lo) / (2.0 * h)
    fp, fq = f(pq.p * x), f(pq.q * x)
    _require_finite(fp, pq.p * x)
    _require_finite(fq, pq.q * x)
    return (fp - fq) / ((pq.p - pq.q) * x)


def _require_finite(value: float, at: float) -> None:
    if not math.isfinite(value):
        raise EvaluationError(f"function returned non-finite value {value!r} at {at}")
