"""Shannon entropy of the measures: two routes, monotonicity, margins."""

import pytest

from clentropy import (
    AbelianPGroup,
    CLParams,
    RefusalError,
    check_decreasing_inequality,
    check_reduced_inequality_rank1,
    entropy,
    entropy_by_definition,
    entropy_upper_bound,
    exceptional_margins,
    iv_div,
    iv_log,
    iv_mul,
    normalizing_constant,
    scan_exceptions,
    weighted_log_term,
)
from clentropy.numerics import iv_from_int

# High-precision reference values (60-digit product/series evaluations,
# truncated here to 12 significant digits; certified intervals at
# eps = 1e-6 are ~10^6 times wider than the rounding in these decimals).
ENTROPY_REFERENCE = {
    (2, 0): 2.00303634925,
    (2, 1): 1.13581634645,
    (2, 2): 0.680744966989,
    (3, 0): 1.19043751882,
    (5, 0): 0.712625884886,
}

KNOWN_EXCEPTIONS = [(2, 0, (1,)), (2, 0, (2,)), (2, 1, (1,)), (3, 0, (1,))]


# ------------------------------------------------------------- entropy values


@pytest.mark.parametrize("p, u", sorted(ENTROPY_REFERENCE))
def test_entropy_contains_reference_values(p, u):
    result = entropy(CLParams(p, u), eps=1e-6)
    assert result.H.value.contains(ENTROPY_REFERENCE[(p, u)])
    assert result.H.value.width <= 1e-6
    assert result.H.tail_bound == 0.0  # tail already folded into the value


def test_entropy_decomposition_reassembles():
    result = entropy(CLParams(2, 1), eps=1e-6)
    mlf, weighted = result.decomposition
    recombined = mlf + weighted.enclosure()
    assert recombined.lo == result.H.value.lo
    assert recombined.hi == result.H.value.hi
    # -log F_u is itself certified
    F = normalizing_constant(CLParams(2, 1))
    assert iv_log(F).overlaps(-mlf)


def test_entropy_width_tracks_requested_eps():
    for eps in (1e-3, 1e-6, 1e-9):
        result = entropy(CLParams(3, 2), eps=eps)
        assert result.H.value.width <= eps


def test_entropy_at_large_u_is_tiny():
    result = entropy(CLParams(2, 30), eps=1e-12)
    assert result.H.value.contains(2.02976310849e-08)
    assert result.H.value.hi < 1e-6
    assert result.H.value.lo >= 0.0


def test_entropy_input_validation():
    with pytest.raises(ValueError):
        entropy(CLParams(2, 0), eps=0.0)


def test_entropy_refuses_slow_decay():
    # at u = -0.5 the certified truncation level implies an enumeration
    # far over budget; this must refuse quickly rather than run forever
    with pytest.raises(RefusalError):
        entropy(CLParams(2, -0.5), eps=1e-6)


# ----------------------------------------------------------- two-route check


@pytest.mark.parametrize("p, u", [(2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (5, 0)])
def test_identity_route_overlaps_definition_route(p, u):
    params = CLParams(p, u)
    via_identity = entropy(params, eps=1e-6)
    via_definition = entropy_by_definition(
        params, N=via_identity.H.truncation_level
    )
    assert via_identity.H.value.overlaps(via_definition.enclosure())


def test_definition_route_at_extended_u():
    params = CLParams(2, 1.5)
    via_identity = entropy(params, eps=1e-5)
    via_definition = entropy_by_definition(params, N=via_identity.H.truncation_level)
    assert via_identity.H.value.overlaps(via_definition.enclosure())


def test_definition_route_refuses_too_small_level():
    with pytest.raises(RefusalError):
        entropy_by_definition(CLParams(2, 0), N=1)


# -------------------------------------------------------------- monotonicity


def test_entropy_strictly_decreases_in_u_small_grid():
    for p in (2, 3):
        values = [entropy(CLParams(p, u), eps=1e-6).H.value for u in range(5)]
        for above, below in zip(values, values[1:]):
            assert above.lo > below.hi, p


def test_per_class_term_decreases_outside_exceptions():
    for p in (2, 3):
        for u in (0, 1, 2):
            for lam in [(1,), (2,), (1, 1), (2, 1), (3,), (1, 1, 1)]:
                if (p, u, lam) in KNOWN_EXCEPTIONS:
                    continue
                a = AbelianPGroup(p, lam)
                now = weighted_log_term(CLParams(p, u), a)
                nxt = weighted_log_term(CLParams(p, u + 1), a)
                assert nxt.lo <= now.hi + 1e-15, (p, u, lam)


def test_weighted_log_term_examples():
    # trivial class contributes nothing; Z/4 at u=0 contributes F_0 log2 / 2
    assert weighted_log_term(CLParams(2, 0), AbelianPGroup(2, ())) .hi == 0.0
    F = normalizing_constant(CLParams(2, 0))
    expected = iv_mul(F, iv_div(iv_log(iv_from_int(2)), iv_from_int(2)))
    got = weighted_log_term(CLParams(2, 0), AbelianPGroup(2, (2,)))
    assert got.overlaps(expected)


# ------------------------------------------------------- per-term inequality


def test_known_exception_list_is_exact():
    assert scan_exceptions(3, 8, 5) == KNOWN_EXCEPTIONS


def test_scan_is_stable_under_enlargement():
    assert scan_exceptions(7, 6, 4) == KNOWN_EXCEPTIONS
    assert scan_exceptions(2, 1, 0) == [(2, 0, (1,))]


def test_decreasing_inequality_spot_checks():
    assert not check_decreasing_inequality(2, 0, AbelianPGroup(2, (1,)))
    assert not check_decreasing_inequality(2, 0, AbelianPGroup(2, (2,)))
    assert not check_decreasing_inequality(2, 1, AbelianPGroup(2, (1,)))
    assert not check_decreasing_inequality(3, 0, AbelianPGroup(3, (1,)))
    assert check_decreasing_inequality(2, 0, AbelianPGroup(2, (1, 1)))
    assert check_decreasing_inequality(2, 2, AbelianPGroup(2, (1,)))
    assert check_decreasing_inequality(3, 1, AbelianPGroup(3, (1,)))
    assert check_decreasing_inequality(5, 0, AbelianPGroup(5, (1,)))


def test_decreasing_inequality_validation():
    with pytest.raises(ValueError):
        check_decreasing_inequality(2, 0.5, AbelianPGroup(2, (1,)))
    with pytest.raises(ValueError):
        check_decreasing_inequality(2, 0, AbelianPGroup(3, (1,)))
    with pytest.raises(ValueError):
        check_decreasing_inequality(2, 0, AbelianPGroup(2, ()))


def test_reduced_rank1_form_agrees_with_full_inequality():
    for p in (2, 3, 5, 7):
        for m in range(1, 7):
            reduced = check_reduced_inequality_rank1(p, m)
            full = check_decreasing_inequality(p, 0, AbelianPGroup(p, (m,)))
            assert reduced == full, (p, m)


# -------------------------------------------------------- exceptional margins


def test_exceptional_margins_are_certified_positive():
    first, second, third = exceptional_margins()
    assert first.lo >= 0.44
    assert second.lo >= 0.21
    assert third.lo >= 0.34
    for margin in (first, second, third):
        assert margin.width < 1e-12


def test_exceptional_margins_reference_values():
    # 13-digit decimals from a high-precision evaluation of the same
    # two-term expressions; certified widths are ~7e-14, so widen slightly
    first, second, third = exceptional_margins()
    assert first.widened(1e-12).contains(0.4429313631992)
    assert second.widened(1e-12).contains(0.2209578544889)
    assert third.widened(1e-12).contains(0.3486872129228)


def test_exceptional_margins_requires_both_primes():
    with pytest.raises(ValueError):
        exceptional_margins(p_set=(2,))


# ----------------------------------------------------------- closed bound


def test_upper_bound_values():
    at_10 = entropy_upper_bound(CLParams(2, 10))
    assert at_10.hi < 0.06
    assert at_10.lo > 0.05
    at_20 = entropy_upper_bound(CLParams(2, 20))
    assert at_20.hi < 1e-4


def test_upper_bound_dominates_certified_entropy():
    for p, u in [(2, 2), (2, 5), (3, 3)]:
        bound = entropy_upper_bound(CLParams(p, u))
        value = entropy(CLParams(p, u), eps=1e-8)
        assert value.H.value.hi <= bound.hi, (p, u)


def test_upper_bound_decreases_in_u():
    bounds = [entropy_upper_bound(CLParams(2, u)).hi for u in range(2, 12)]
    assert bounds == sorted(bounds, reverse=True)


def test_upper_bound_refuses_small_u():
    with pytest.raises(RefusalError):
        entropy_upper_bound(CLParams(2, 1))
