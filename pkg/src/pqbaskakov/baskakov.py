"""The two-parameter Baskakov-type operator: basis weights, nodes, series
evaluation with adaptive truncation, and its first three closed-form moments.

The operator value at base point r is the infinite sum over k of
``weight(n, k, r) * f(node(n, k))``.  The summation limit is treated as
infinite with adaptive truncation: stopping once the un-accumulated basis
mass drops below the policy's tail tolerance is what makes the partition of
unity and the moment identities hold numerically (a finite cut at k = n does
not; see tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple

from .errors import ConfigurationError, DomainError, EvaluationError
from .pq_core import PQParams, pq_integer, pq_rising_power_log, _log_pq_integer

__all__ = [
    "TruncationPolicy",
    "SeriesEval",
    "BasisTerm",
    "node",
    "basis_weight",
    "basis_terms",
    "eval_series",
    "moment_closed",
]


@dataclass(frozen=True)
class TruncationPolicy:
    """Controls for truncating the infinite basis series.

    tail_tolerance   target un-accumulated basis mass at which to stop
    max_terms        hard cap on the number of terms
    growth_exponent  caller-declared polynomial growth m of f, used only to
                     model the truncated tail as M_f (1 + node^m)
    """

    tail_tolerance: float = 1e-12
    max_terms: int = 10000
    growth_exponent: int = 2

    def __post_init__(self) -> None:
        if self.tail_tolerance <= 0:
            raise ConfigurationError(
                f"tail_tolerance must be positive, got {self.tail_tolerance}"
            )
        if self.max_terms < 1:
            raise ConfigurationError(f"max_terms must be >= 1, got {self.max_terms}")
        if self.growth_exponent < 0:
            raise ConfigurationError(
                f"growth_exponent must be >= 0, got {self.growth_exponent}"
            )


@dataclass(frozen=True)
class SeriesEval:
    """Result of one truncated series evaluation, with diagnostics."""

    value: float
    terms_used: int
    accumulated_weight: float
    tail_error_estimate: float
    converged: bool


@dataclass(frozen=True)
class BasisTerm:
    k: int
    weight: float
    node: float


class _CompensatedSum:
    """Running Neumaier-compensated sum; order-fixed and bit-stable."""

    __slots__ = ("_s", "_c")

    def __init__(self) -> None:
        self._s = 0.0
        self._c = 0.0

    def add(self, x: float) -> None:
        t = self._s + x
        if abs(self._s) >= abs(x):
            self._c += (self._s - t) + x
        else:
            self._c += (x - t) + self._s
        self._s = t

    @property
    def value(self) -> float:
        return self._s + self._c


def _check_order(n: int) -> None:
    if n < 1:
        raise DomainError(f"operator order n must be >= 1, got {n}")


def node(n: int, k: int, pq: PQParams) -> float:
    """Evaluation abscissa of the k-th basis term: p^(n-1)[k] / (q^(k-1)[n]).

    Written via s = q/p as p^(n-1)(1-s^k) / ((1-s)[n] s^(k-1)) so no
    underflowing p- or q-powers appear; nodes are 0 at k = 0 and strictly
    increasing in k.
    """
    _check_order(n)
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k == 0:
        return 0.0
    s = pq.ratio
    return pq.p ** (n - 1) * (1.0 - s**k) / ((1.0 - s) * pq_integer(n, pq) * s ** (k - 1))


def basis_weight(n: int, k: int, r: float, pq: PQParams) -> float:
    """Basis weight of the k-th term at base point r, evaluated in log space.

    Equals [n+k-1 choose k] p^(k+n(n-1)/2) q^(k(k-1)/2) r^k / (1 (+) r)^(n+k),
    where the denominator is the product-form rising power.
    """
    _check_order(n)
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if r < 0:
        raise DomainError(f"base point must be >= 0, got {r}")
    if r == 0.0:
        return 1.0 if k == 0 else 0.0
    log_binom = math.fsum(
        _log_pq_integer(n + j - 1, pq) - _log_pq_integer(j, pq) for j in range(1, k + 1)
    )
    log_w = math.fsum(
        (
            log_binom,
            (k + n * (n - 1) // 2) * math.log(pq.p),
            (k * (k - 1) // 2) * math.log(pq.q),
            k * math.log(r),
            -pq_rising_power_log(r, n + k, pq),
        )
    )
    return math.exp(log_w)


def _term_stream(n: int, r: float, pq: PQParams) -> Iterator[Tuple[int, float, float]]:
    """Yield (k, weight, node) by the term-ratio recurrence, for r > 0.

    All recurrences are expressed in s = q/p so nothing under- or overflows
    before the weights themselves die out; the stream ends once the weights
    underflow to zero on the decaying side of their peak.
    """
    s = pq.ratio
    p = pq.p
    bracket_n = pq_integer(n, pq)
    node_scale = p ** (n - 1) / ((1.0 - s) * bracket_n)

    log_w0 = 0.0
    sj = 1.0
    for _ in range(n):
        log_w0 -= math.log1p(sj * r)
        sj *= s
    w = math.exp(log_w0)

    k = 0
    cur_node = 0.0
    sk = 1.0  # s^k
    snk = s**n  # s^(n+k)
    while True:
        yield k, w, cur_node
        ratio = r * sk * (1.0 - snk) / ((1.0 - sk * s) * (1.0 + snk * r))
        w *= ratio
        if w == 0.0 and ratio < 1.0:
            return
        sk_prev = sk
        sk *= s
        snk *= s
        k += 1
        cur_node = node_scale * (1.0 - sk) / sk_prev if sk_prev > 0.0 else math.inf


def basis_terms(n: int, r: float, pq: PQParams, count: int) -> List[BasisTerm]:
    """First `count` basis terms at base point r (ratio-recurrence path)."""
    _check_order(n)
    if r < 0:
        raise DomainError(f"base point must be >= 0, got {r}")
    if r == 0.0:
        return [BasisTerm(k, 1.0 if k == 0 else 0.0, node(n, k, pq)) for k in range(count)]
    out: List[BasisTerm] = []
    for k, w, x in _term_stream(n, r, pq):
        if k >= count:
            break
        out.append(BasisTerm(k, w, x))
    return out


def eval_series(
    f: Callable[[float], float],
    n: int,
    r: float,
    pq: PQParams,
    policy: Optional[TruncationPolicy] = None,
) -> SeriesEval:
    """Evaluate the operator series sum_k weight * f(node) at base point r.

    Terms are accumulated in increasing k with compensated summation and the
    loop stops once the remaining basis mass is at most the policy's tail
    tolerance, or at max_terms (converged=False in that case -- the caller
    decides what to do).  The tail estimate models |f| as M_f (1 + node^m)
    with m the policy's growth exponent and M_f fitted on the visited nodes.
    """
    _check_order(n)
    if r < 0:
        raise DomainError(f"base point must be >= 0, got {r}")
    policy = policy or TruncationPolicy()
    if r == 0.0:
        fv = f(0.0)
        _require_finite(fv, 0.0, 0)
        return SeriesEval(fv, 1, 1.0, 0.0, True)

    m = policy.growth_exponent
    wsum = _CompensatedSum()
    vsum = _CompensatedSum()
    m_f = 0.0
    terms_used = 0
    converged = False
    for k, w, x in _term_stream(n, r, pq):
        if k >= policy.max_terms:
            break
        fv = f(x)
        _require_finite(fv, x, k)
        wsum.add(w)
        vsum.add(w * fv)
        m_f = max(m_f, abs(fv) / (1.0 + x**m))
        terms_used = k + 1
        if 1.0 - wsum.value <= policy.tail_tolerance:
            converged = True
            break

    accumulated = wsum.value
    remaining = max(0.0, 1.0 - accumulated)
    if not converged:
        converged = remaining <= policy.tail_tolerance
    tail = 0.0
    if remaining > 0.0:
        growth = 1.0
        for j in range(terms_used, terms_used + 4):
            nxt = node(n, j, pq)
            if math.isfinite(nxt):
                growth = max(growth, 1.0 + nxt**m)
        tail = remaining * m_f * growth
    return SeriesEval(vsum.value, terms_used, accumulated, tail, converged)


def moment_closed(i: int, n: int, x: float, pq: PQParams) -> float:
    """Closed-form operator moments: 1, x, and
    x^2 + p^(n-1) x / [n] * (1 + (p/q) x) for i = 0, 1, 2."""
    _check_order(n)
    if i == 0:
        return 1.0
    if i == 1:
        return float(x)
    if i == 2:
        return x * x + pq.p ** (n - 1) * x / pq_integer(n, pq) * (1.0 + pq.p / pq.q * x)
    raise DomainError(f"moment order must be 0, 1 or 2, got {i}")


def _require_finite(value: float, at_node: float, k: int) -> None:
    if not math.isfinite(value):
        raise EvaluationError(
            f"function returned non-finite value {value!r} at node {at_node} (k={k})"
        )
