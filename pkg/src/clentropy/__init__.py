"""Certified computations with Cohen-Lenstra measures on finite abelian p-groups.

All numerical results are directed-rounding intervals (or exact rationals)
guaranteed to contain the true value; truncated sums carry certified tail
bounds.  When a certificate cannot be produced, functions raise
``RefusalError`` rather than return an unverified number.
"""

from .entropy import (
    EntropyResult,
    check_decreasing_inequality,
    check_reduced_inequality_rank1,
    entropy,
    entropy_by_definition,
    entropy_upper_bound,
    exceptional_margins,
    scan_exceptions,
    weighted_log_term,
)
from .errors import IntervalDomainError, RefusalError, TailClosureError
from .groups import (
    AbelianPGroup,
    AutBoundReport,
    aut_order,
    aut_order_block_formula,
    aut_order_bruteforce,
    aut_order_parts,
    check_aut_lower_bound,
    group_order,
    groups_of_order_exponent,
    is_prime,
    pow_le,
)
from .measures import (
    CLParams,
    auto_product_depth,
    bound_series_tail,
    cl_measure,
    hall_sum_partial,
    hall_tail_bounds,
    level_stats,
    normalizing_constant,
    total_mass,
)
from .numerics import CertifiedValue, Interval, iv_div, iv_log, iv_mul, iv_point
from .partitions import (
    dual_partition,
    enumerate_partitions,
    is_partition,
    iter_partitions,
    n_lambda,
    partition_count,
)
from .zeta import (
    ZetaParams,
    cross_entropy_direct,
    kl_closed,
    kl_direct,
    limit_derivative_identity,
    w_k_weight,
    zeta_log_derivative,
    zeta_product,
    zeta_sum,
)

__version__ = "0.1.0"

__all__ = [
    "AbelianPGroup",
    "AutBoundReport",
    "CLParams",
    "CertifiedValue",
    "EntropyResult",
    "Interval",
    "IntervalDomainError",
    "RefusalError",
    "TailClosureError",
    "ZetaParams",
    "aut_order",
    "aut_order_block_formula",
    "aut_order_bruteforce",
    "aut_order_parts",
    "auto_product_depth",
    "bound_series_tail",
    "check_aut_lower_bound",
    "check_decreasing_inequality",
    "check_reduced_inequality_rank1",
    "cl_measure",
    "cross_entropy_direct",
    "dual_partition",
    "entropy",
    "entropy_by_definition",
    "entropy_upper_bound",
    "enumerate_partitions",
    "exceptional_margins",
    "group_order",
    "groups_of_order_exponent",
    "hall_sum_partial",
    "hall_tail_bounds",
    "is_partition",
    "is_prime",
    "iter_partitions",
    "iv_div",
    "iv_log",
    "iv_mul",
    "iv_point",
    "kl_closed",
    "kl_direct",
    "level_stats",
    "limit_derivative_identity",
    "n_lambda",
    "normalizing_constant",
    "partition_count",
    "pow_le",
    "scan_exceptions",
    "total_mass",
    "w_k_weight",
    "weighted_log_term",
    "zeta_log_derivative",
    "zeta_product",
    "zeta_sum",
]
