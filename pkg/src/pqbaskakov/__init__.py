"""Two-parameter Baskakov-type positive linear operators on [0, inf),
their King-type modification preserving x^2, and grid-based error audits.

Library entry points re-exported here; the HTTP surface lives in
`pqbaskakov.service` (FastAPI app factory `create_app`) and the command-line
client in `pqbaskakov.cli`.
"""

__version__ = "0.1.0"

from .analysis import (
    Grid,
    ConvergenceRow,
    convergence_study,
    modulus,
    modulus2,
    parse_schedule,
    smoothness_radius,
    smoothness_bound_report,
    composed_modulus_bound,
    weighted_norm,
)
from .baskakov import (
    BasisTerm,
    SeriesEval,
    TruncationPolicy,
    basis_terms,
    basis_weight,
    eval_series,
    moment_closed,
    node,
)
from .errors import ConfigurationError, DomainError, EvaluationError
from .expr import FunctionExpr, parse
from .king import (
    CentralMoments,
    auxiliary_operator,
    bound_audit,
    central_moments,
    eval_king,
    king_moment_closed,
    rebase_point,
)
from .pq_core import (
    PQParams,
    pq_binomial,
    pq_derivative,
    pq_factorial,
    pq_integer,
    pq_power_expand,
    pq_rising_power,
    pq_rising_power_log,
)

__all__ = [
    "__version__",
    "PQParams",
    "pq_integer",
    "pq_factorial",
    "pq_binomial",
    "pq_rising_power",
    "pq_rising_power_log",
    "pq_power_expand",
    "pq_derivative",
    "TruncationPolicy",
    "SeriesEval",
    "BasisTerm",
    "node",
    "basis_weight",
    "basis_terms",
    "eval_series",
    "moment_closed",
    "rebase_point",
    "eval_king",
    "king_moment_closed",
    "CentralMoments",
    "central_moments",
    "bound_audit",
    "auxiliary_operator",
    "Grid",
    "modulus",
    "modulus2",
    "weighted_norm",
    "ConvergenceRow",
    "convergence_study",
    "parse_schedule",
    "smoothness_radius",
    "smoothness_bound_report",
    "composed_modulus_bound",
    "FunctionExpr",
    "parse",
    "DomainError",
    "EvaluationError",
    "ConfigurationError",
]
