"""Certified Shannon entropy of Cohen-Lenstra measures.

Writing nu(A) = F_u / x_A with x_A = #A^u #Aut A, the entropy
H = -sum nu log nu rearranges (using sum nu = 1) to

    H(nu) = -log F_u + F_u * sum_{A != 1} log(x_A) / x_A,

which is the form computed here: the per-level sums of 1/#Aut and
log(#Aut)/#Aut are cached once per (p, n) and recombined for every
unit-rank.  The remainder past level N lies in [0, T(N)] with

    T(N) = sum_{n>N} pi(n) h(F_u p^{1-(u+1)n}),    h(x) = -x log x,

because each omitted class has measure below b_n = F_u p^{1-(u+1)n} <= 1/e
(enforced by a floor on N) and h is increasing on (0, 1/e].  The same
bound certifies the direct-definition route, which exists as an
independent cross-check.

The family is strictly entropy-decreasing in integral u.  The engine of
that fact is the per-term inequality

    #A^{u+1} #Aut A <= (#A^u #Aut A)^{(1-p^{-(u+1)}) #A},

which holds for every nontrivial A and integral u >= 0 except exactly
four small cases; ``scan_exceptions`` recovers the exception list by
exhaustive certified comparison, and ``exceptional_margins`` certifies
that the entropy differences survive the exceptions with room to spare.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import RefusalError
from .groups import AbelianPGroup, is_prime, pow_le
from .measures import (
    MAX_LEVEL,
    CLParams,
    auto_product_depth,
    bound_series_tail,
    check_enumeration_budget,
    hall_sum_partial,
    hall_tail_bounds,
    level_stats,
    normalizing_constant,
)
from .numerics import (
    ONE,
    ZERO,
    CertifiedValue,
    Interval,
    iv_add,
    iv_div,
    iv_exp,
    iv_from_fraction,
    iv_from_int,
    iv_log,
    iv_log_int,
    iv_mul,
    iv_mul_scalar,
    iv_neg,
    iv_point,
    iv_recip_int,
    iv_sub,
)
from .partitions import Partition, enumerate_partitions

# h(x) = -x log x is increasing only up to 1/e; the tail argument needs all
# omitted per-class measures on that side, with a little room to breathe.
_H_ARG_CEILING = 0.36


@dataclass(frozen=True)
class EntropyResult:
    """Certified entropy with its two-part decomposition.

    ``H.value`` already folds the truncation tail into its upper endpoint
    (so ``H.tail_bound`` is 0); ``weighted_sum`` keeps the tail separate.
    By construction H.value equals minus_log_fu + weighted_sum.enclosure().
    """

    params: CLParams
    H: CertifiedValue
    minus_log_fu: Interval
    weighted_sum: CertifiedValue

    @property
    def decomposition(self) -> tuple[Interval, CertifiedValue]:
        return self.minus_log_fu, self.weighted_sum


def _rate(params: CLParams):
    return params.u + 1 if params.integral else iv_add(iv_point(params.u), ONE)


def _level_floor(u) -> int:
    return 2 + math.ceil(1 / (u + 1))


def _class_measure_bound(F: Interval, p: int, u, n: int) -> Interval:
    """b_n = F_u p^{1-(u+1)n}, an upper bound for any class measure at
    level n (via #Aut >= p^{n-1})."""
    from .measures import _pow_p_minus

    rate = u + 1 if isinstance(u, int) and u >= 0 else iv_add(iv_point(u), ONE)
    return iv_mul(iv_mul(F, iv_from_int(p)), _pow_p_minus(p, rate, n))


def _entropy_tail(params: CLParams, F: Interval, N: int) -> Interval:
    # h(b_n) = b_n (alpha + beta n) with alpha = -log F_u - log p and
    # beta = (u+1) log p; both in intervals, b_n = (F_u p) p^{-(u+1)n}.
    L = iv_log_int(params.p)
    mlf = iv_neg(iv_log(F))
    alpha = iv_sub(mlf, L)
    rate = _rate(params)
    beta = iv_mul_scalar(L, float(rate)) if params.integral else iv_mul(rate, L)
    scale = iv_mul(F, iv_from_int(params.p))
    return bound_series_tail(params.p, rate, N, [alpha, beta], scale)


def _choose_level(params: CLParams, F: Interval, eps: float) -> tuple[int, Interval]:
    N = _level_floor(params.u)
    while True:
        if N > MAX_LEVEL:
            raise RefusalError(
                f"entropy tail cannot be pushed below {eps / 2:g} by level "
                f"{MAX_LEVEL} at p={params.p}, u={params.u}"
            )
        if _class_measure_bound(F, params.p, params.u, N + 1).hi < _H_ARG_CEILING:
            tail = _entropy_tail(params, F, N)
            if tail.hi <= eps / 2:
                check_enumeration_budget(N)
                return N, tail
        N += 1


def entropy(params: CLParams, eps: float = 1e-6) -> EntropyResult:
    """Certified H(nu) with H.value.width <= eps.

    The truncation level is the smallest one whose tail bound is below
    eps/2 (subject to the 1/e floor on omitted class measures); refuses if
    no level up to the hard cap gets there, or if rounding noise leaves the
    final interval wider than eps.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    p = params.p
    J = auto_product_depth(p, params.u, eps / 16)
    F = normalizing_constant(params, J)
    mlf = iv_neg(iv_log(F))
    N, tail = _choose_level(params, F, eps)

    L = iv_log_int(p)
    acc = ZERO
    for n in range(1, N + 1):
        r_iv, s_iv = level_stats(p, n)
        if params.integral:
            pw = iv_recip_int(p ** (params.u * n))
            un_log = iv_mul_scalar(L, float(params.u * n))
        else:
            u_iv = iv_point(params.u)
            pw = iv_exp(iv_neg(iv_mul(u_iv, iv_mul_scalar(L, float(n)))))
            un_log = iv_mul(u_iv, iv_mul_scalar(L, float(n)))
        acc = iv_add(acc, iv_mul(pw, iv_add(iv_mul(un_log, r_iv), s_iv)))
    ws_value = iv_mul(F, acc)
    weighted_sum = CertifiedValue(ws_value, N, tail.hi)
    h_value = iv_add(mlf, weighted_sum.enclosure())
    if h_value.width > eps:
        raise RefusalError(
            f"cannot certify entropy width <= {eps:g} at p={p}, u={params.u}: "
            f"achieved {h_value.width:g}"
        )
    return EntropyResult(
        params=params,
        H=CertifiedValue(h_value, N, 0.0),
        minus_log_fu=mlf,
        weighted_sum=weighted_sum,
    )


def entropy_by_definition(params: CLParams, N: int, J: int = 64) -> CertifiedValue:
    """Independent entropy route: truncated -sum nu log nu, tail folded in.

    Sums h(nu(A)) = nu(A)(-log nu(A)) levelwise through level N, then adds
    [0, T(N)] exactly as in ``entropy``.  Used to cross-check the identity
    route; shares only the per-level statistics with it.
    """
    p = params.p
    F = normalizing_constant(params, J)
    floor = _level_floor(params.u)
    if N < floor:
        raise RefusalError(
            f"truncation level {N} is below the validity floor {floor} for "
            f"u={params.u} (omitted class measures must stay below 1/e)"
        )
    if not _class_measure_bound(F, p, params.u, N + 1).hi < _H_ARG_CEILING:
        raise RefusalError(
            f"class-measure bound at level {N + 1} is not below 1/e; "
            f"increase the truncation level"
        )
    check_enumeration_budget(N)
    tail = _entropy_tail(params, F, N)
    mlf = iv_neg(iv_log(F))
    L = iv_log_int(p)
    acc = mlf  # trivial group: h(F_u) = F_u (-log F_u), the F_u folds below
    for n in range(1, N + 1):
        r_iv, s_iv = level_stats(p, n)
        if params.integral:
            pw = iv_recip_int(p ** (params.u * n))
            un_log = iv_mul_scalar(L, float(params.u * n))
        else:
            u_iv = iv_point(params.u)
            pw = iv_exp(iv_neg(iv_mul(u_iv, iv_mul_scalar(L, float(n)))))
            un_log = iv_mul(u_iv, iv_mul_scalar(L, float(n)))
        level = iv_mul(pw, iv_add(iv_mul(iv_add(mlf, un_log), r_iv), s_iv))
        acc = iv_add(acc, level)
    value = iv_add(iv_mul(F, acc), Interval(0.0, tail.hi))
    return CertifiedValue(value, N, 0.0)


def entropy_upper_bound(params: CLParams, N: int = 30, K: int = 48) -> Interval:
    """Certified evaluation of the closed upper bound on H(nu) for u >= 2:

        H <= sum_{k>=1} 1/(k (p^k - 1) p^{ku})
             + (u F_u / p^{u-1}) sum_{A != 1} 1/#Aut A
             + (F_u / p^{u-1}) sum_{A != 1} 1/#A.

    The first series is -log F_u re-summed over k; the two Hall-type sums
    are evaluated as exact partials to level N plus certified tails.  The
    bound tends to 0 as u grows, which pins down the entropy limit.
    """
    u = params.u
    if isinstance(u, (int, float)) and u < 2:
        raise RefusalError(f"the closed entropy bound requires u >= 2, got {u}")
    p = params.p
    F = normalizing_constant(params, 64)

    first = ZERO
    for k in range(1, K + 1):
        if params.integral:
            first = iv_add(
                first, iv_from_fraction(Fraction(1, k * (p**k - 1) * p ** (k * u)))
            )
        else:
            L = iv_log_int(p)
            denom = iv_mul(
                iv_sub(iv_exp(iv_mul_scalar(L, float(k))), ONE),
                iv_exp(iv_mul(iv_point(u), iv_mul_scalar(L, float(k)))),
            )
            first = iv_add(first, iv_div(iv_recip_int(k), denom))
    # sum_{k>K} 1/(k (p^k-1) p^{ku}) <= p^{-(K+1)(u+1)} /
    #   ((K+1)(1-p^{-(K+1)})(1-p^{-(u+1)})), three geometric-friendly factors
    from .measures import _pow_p_minus

    rate = _rate(params)
    head = _pow_p_minus(p, rate, K + 1)
    denom = iv_mul(
        iv_mul_scalar(iv_sub(ONE, iv_recip_int(p ** (K + 1))), float(K + 1)),
        iv_sub(ONE, _pow_p_minus(p, rate, 1)),
    )
    first = iv_add(first, Interval(0.0, iv_div(head, denom).hi))

    s_aut, s_ord = hall_sum_partial(p, N)
    aut_tail, ord_tail = hall_tail_bounds(p, N)
    sum_aut = iv_add(iv_from_fraction(s_aut - 1), Interval(0.0, aut_tail.hi))
    sum_ord = iv_add(iv_from_fraction(s_ord - 1), Interval(0.0, ord_tail.hi))

    if params.integral:
        over_p = iv_recip_int(p ** (u - 1))
        u_factor = iv_mul_scalar(iv_mul(F, over_p), float(u))
        one_factor = iv_mul(F, over_p)
    else:
        L = iv_log_int(p)
        over_p = iv_exp(iv_neg(iv_mul(iv_point(u - 1), L)))
        u_factor = iv_mul_scalar(iv_mul(F, over_p), float(u))
        one_factor = iv_mul(F, over_p)
    return iv_add(first, iv_add(iv_mul(u_factor, sum_aut), iv_mul(one_factor, sum_ord)))


def check_decreasing_inequality(p: int, u: int, A: AbelianPGroup) -> bool:
    """Exact test of  #A^{u+1} #Aut A <= (#A^u #Aut A)^{(1-p^{-(u+1)}) #A}.

    With x = #A^u #Aut A, a = #A, P = p^{u+1}, raising both sides to the
    P-th power clears the rational exponent:  (a x)^P <= x^{a (P-1)}.
    The comparison is exact (certified log separation, escalating to exact
    integer powers when needed); no floating tolerance is involved.
    """
    if not isinstance(u, int) or isinstance(u, bool) or u < 0:
        raise ValueError("integral u >= 0 required")
    if A.p != p:
        raise ValueError(f"group is a {A.p}-group but p = {p}")
    if A.is_trivial():
        raise ValueError("the inequality concerns nontrivial groups")
    a = A.order
    x = a**u * A.aut_order
    P = p ** (u + 1)
    return pow_le(a * x, P, x, a * (P - 1))


def check_reduced_inequality_rank1(p: int, m: int) -> bool:
    """Exact test of the cyclic-case reduction  #A <= (#Aut A)^{#A-1-#A/p}
    at u = 0 for A = Z/p^m (clearing by p:  a^p <= aut^{a(p-1)-p}).

    For cyclic A this is algebraically the u = 0 instance of the decreasing
    inequality divided through by #Aut^{#A}, so the two checks must agree.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if m < 1:
        raise ValueError("cyclic exponent m must be >= 1")
    a = p**m
    aut = p ** (m - 1) * (p - 1)
    return pow_le(a, p, aut, a * (p - 1) - p)


def scan_exceptions(
    p_max: int, n_max: int, u_max: int
) -> list[tuple[int, int, Partition]]:
    """All (p, u, lambda') with p <= p_max, #A <= p^{n_max}, u <= u_max
    violating the decreasing inequality, in canonical order (p, then u,
    then order, then reverse-lexicographic within an order).

    The full scan over p <= 7, n <= 8, u <= 5 returns exactly four hits:
    (2,0,(1,)), (2,0,(2,)), (2,1,(1,)), (3,0,(1,)).
    """
    hits: list[tuple[int, int, Partition]] = []
    for p in (q for q in range(2, p_max + 1) if is_prime(q)):
        for u in range(u_max + 1):
            for n in range(1, n_max + 1):
                for parts in enumerate_partitions(n):
                    A = AbelianPGroup(p, parts)
                    if not check_decreasing_inequality(p, u, A):
                        hits.append((p, u, parts))
    return hits


def weighted_log_term(params: CLParams, A: AbelianPGroup, J: int = 64) -> Interval:
    """The per-class entropy contribution F_u log(x_A)/x_A, x_A = #A^u #Aut A.

    Zero for the trivial group.  For every non-exceptional (A, u) this is
    monotone nonincreasing in u, which is what drives entropy monotonicity.
    """
    if A.p != params.p:
        raise ValueError(f"group is a {A.p}-group but params.p = {params.p}")
    F = normalizing_constant(params, J)
    if A.is_trivial():
        return ZERO
    if params.integral:
        x = A.order**params.u * A.aut_order
        return iv_mul(F, iv_mul(iv_log_int(x), iv_recip_int(x)))
    n = A.order_exponent
    log_x = iv_add(
        iv_mul(iv_point(params.u), iv_mul_scalar(iv_log_int(params.p), float(n))),
        iv_log_int(A.aut_order),
    )
    return iv_mul(F, iv_mul(log_x, iv_exp(iv_neg(log_x))))


def exceptional_margins(p_set: tuple[int, ...] = (2, 3)) -> tuple[Interval, Interval, Interval]:
    """Certified margins showing the entropy drop survives the exceptions.

    Each margin is an entropy difference restricted to the -log F_u part
    plus the exceptional classes' terms (all other terms decrease
    pointwise, so these finitely many must carry the day):

      1. u = 0 -> 1 at p = 2, exceptional classes Z/2 and Z/4;
      2. u = 1 -> 2 at p = 2, exceptional class Z/2;
      3. u = 0 -> 1 at p = 3, exceptional class Z/3.

    All three are certified positive, with lower bounds at least
    0.44, 0.21 and 0.34 respectively.
    """
    if 2 not in p_set or 3 not in p_set:
        raise ValueError("the exceptional classes live at p = 2 and p = 3")
    out = []
    for p, u, classes in (
        (2, 0, ((1,), (2,))),
        (2, 1, ((1,),)),
        (3, 0, ((1,),)),
    ):
        lo_params = CLParams(p, u)
        hi_params = CLParams(p, u + 1)
        lhs = iv_neg(iv_log(normalizing_constant(lo_params, 64)))
        rhs = iv_neg(iv_log(normalizing_constant(hi_params, 64)))
        for parts in classes:
            A = AbelianPGroup(p, parts)
            lhs = iv_add(lhs, weighted_log_term(lo_params, A))
            rhs = iv_add(rhs, weighted_log_term(hi_params, A))
        out.append(iv_sub(lhs, rhs))
    return tuple(out)
