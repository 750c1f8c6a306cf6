"""Finite abelian p-groups and exact automorphism counting.

A finite abelian p-group is determined by a prime p and a partition
lambda' = (lambda'_1 >= lambda'_2 >= ...): the group is the product of
cyclic factors Z/p^{lambda'_i}.  Its automorphism count has the classical
closed form (Macdonald, "Symmetric Functions and Hall Polynomials", ch. II)

    #Aut = p^(|lambda'| + 2 n(lambda')) * prod_j prod_{k=1..m_j} (1 - p^-k)

where the product runs over the conjugate partition lambda and
m_j = lambda_j - lambda_{j+1}.  Conveniently, m_j is just the multiplicity
of the part value j inside lambda', so no explicit conjugation is needed.
Everything here is exact big-integer arithmetic.

Two independent cross-checks are provided: a literal brute force that
enumerates endomorphisms and tests bijectivity on the elements (small
groups only -- automorphism groups grow far too fast for enumeration to be
possible in general, e.g. #Aut((Z/2)^8) is about 5.3e18), and the
block-matrix formula of Hillar & Rhea (Amer. Math. Monthly 114, 2007),
whose derivation is unrelated to the partition formula above.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from .errors import RefusalError
from .partitions import Partition, dual_partition, is_partition

BRUTEFORCE_MAX_ORDER = 256
# Elementary numpy operations we are willing to spend per brute-force call
# (#endomorphisms * #elements).  Beyond this the oracle refuses.
BRUTEFORCE_WORK_BUDGET = 150_000_000


def is_prime(p: int) -> bool:
    """Trial-division primality test; fine for the small primes used here."""
    if not isinstance(p, int) or isinstance(p, bool) or p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@lru_cache(maxsize=None)
def _q_factor(p: int, m: int) -> int:
    """prod_{k=1..m} (p^k - 1), the p-free part contributed by a
    multiplicity-m run of equal cyclic factors."""
    if m == 0:
        return 1
    return _q_factor(p, m - 1) * (p**m - 1)


def aut_order_parts(p: int, parts: Partition) -> int:
    """#Aut of the abelian p-group of type ``parts`` (exact integer).

    Integerized Macdonald formula: with n = |parts|,
    n(parts) = sum_i (i-1)*parts[i], and the part-value multiplicities m_j,

        #Aut = p^(n + 2 n(parts) - sum_j m_j(m_j+1)/2)
               * prod_j prod_{k=1..m_j} (p^k - 1).

    >>> aut_order_parts(2, (1,))
    1
    >>> aut_order_parts(2, (1, 1))
    6
    >>> aut_order_parts(2, (2,))
    2
    >>> aut_order_parts(2, (2, 1))
    8
    """
    n = 0
    n_lam = 0
    for i, x in enumerate(parts):
        n += x
        n_lam += i * x
    exponent = n + 2 * n_lam
    q_part = 1
    for m in Counter(parts).values():
        exponent -= m * (m + 1) // 2
        q_part *= _q_factor(p, m)
    return p**exponent * q_part


@dataclass(frozen=True)
class AbelianPGroup:
    """The group prod_i Z/p^{lambda_prime[i]} for a prime p.

    ``lambda_prime = ()`` is the trivial group.
    """

    p: int
    lambda_prime: Partition

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if not is_partition(self.lambda_prime):
            raise ValueError(f"not a partition: {self.lambda_prime!r}")

    @cached_property
    def order(self) -> int:
        return self.p ** sum(self.lambda_prime)

    @property
    def order_exponent(self) -> int:
        return sum(self.lambda_prime)

    @property
    def rank(self) -> int:
        """Minimal number of generators (= number of parts)."""
        return len(self.lambda_prime)

    @cached_property
    def aut_order(self) -> int:
        return aut_order_parts(self.p, self.lambda_prime)

    def dual_type(self) -> Partition:
        return dual_partition(self.lambda_prime)

    def is_trivial(self) -> bool:
        return not self.lambda_prime


def group_order(a: AbelianPGroup) -> int:
    return a.order


def rank(a: AbelianPGroup) -> int:
    return a.rank


def aut_order(a: AbelianPGroup) -> int:
    return a.aut_order


def aut_order_block_formula(a: AbelianPGroup) -> int:
    """#Aut via Hillar-Rhea block counting (independent cross-check).

    With exponents e_1 <= ... <= e_n, d_k = max{l : e_l = e_k} and
    c_k = min{l : e_l = e_k}:

        #Aut = prod_k (p^d_k - p^(k-1))
             * prod_j p^(e_j (n - d_j))
             * prod_i p^((e_i - 1)(n - c_i + 1))
    """
    p = a.p
    e = sorted(a.lambda_prime)
    n = len(e)
    if n == 0:
        return 1
    d = [max(l for l in range(n) if e[l] == e[k]) + 1 for k in range(n)]
    c = [min(l for l in range(n) if e[l] == e[k]) + 1 for k in range(n)]
    total = 1
    for k in range(n):
        total *= p ** d[k] - p**k
    for j in range(n):
        total *= p ** (e[j] * (n - d[j]))
    for i in range(n):
        total *= p ** ((e[i] - 1) * (n - c[i] + 1))
    return total


def bruteforce_hom_count(a: AbelianPGroup) -> int:
    """#Hom(A, A) = prod_{i,j} p^min(lambda'_i, lambda'_j)."""
    parts = a.lambda_prime
    exponent = sum(min(x, y) for x in parts for y in parts)
    return a.p**exponent


def aut_order_bruteforce(a: AbelianPGroup, work_budget: int = BRUTEFORCE_WORK_BUDGET) -> int:
    """Count automorphisms by exhaustive endomorphism enumeration.

    Endomorphisms are r x r generator-image matrices; entry (i, j) ranges
    over the multiples of p^max(0, e_j - e_i) modulo p^{e_j}.  Each candidate
    is applied to every group element and accepted iff the induced map is a
    permutation.  Refuses when the order exceeds BRUTEFORCE_MAX_ORDER or the
    total work #Hom * #A exceeds ``work_budget`` -- enumeration is hopeless
    there (already #Aut((Z/2)^8) ~ 5e18 exceeds any conceivable budget).
    """
    import numpy as np

    if a.order > BRUTEFORCE_MAX_ORDER:
        raise RefusalError(
            f"brute-force automorphism count refused: order {a.order} exceeds "
            f"{BRUTEFORCE_MAX_ORDER}"
        )
    if a.is_trivial():
        return 1
    p = a.p
    exps = list(a.lambda_prime)
    r = len(exps)
    mods = [p**e for e in exps]
    order = a.order
    hom_count = bruteforce_hom_count(a)
    if hom_count * order > work_budget:
        raise RefusalError(
            f"brute-force automorphism count refused: {hom_count} endomorphisms "
            f"x {order} elements exceeds the work budget {work_budget}"
        )

    # All group elements as coordinate rows, plus an injective encoding.
    grids = np.meshgrid(*[np.arange(m, dtype=np.int64) for m in mods], indexing="ij")
    elements = np.stack([g.ravel() for g in grids], axis=1)  # (order, r)
    enc_weights = np.empty(r, dtype=np.int64)
    acc = 1
    for j in range(r - 1, -1, -1):
        enc_weights[j] = acc
        acc *= mods[j]

    # Entry (i, j) = step_ij * t with t < p^min(e_i, e_j).
    steps = np.array(
        [[p ** max(0, exps[j] - exps[i]) for j in range(r)] for i in range(r)],
        dtype=np.int64,
    )
    radii = np.array(
        [[p ** min(exps[i], exps[j]) for j in range(r)] for i in range(r)],
        dtype=np.int64,
    ).ravel()
    mods_col = np.array(mods, dtype=np.int64)[None, None, :]

    # Images are computed through float32 matrix products so the heavy inner
    # loop runs in BLAS; every intermediate is an exact small integer
    # (at most r * 255^2 < 2^24, within float32's exact range), so nothing
    # is lost to rounding.
    assert r * (max(mods) - 1) ** 2 < 1 << 24
    chunk = max(1, min(hom_count, (1 << 23) // max(1, order * r)))
    count = 0
    start = 0
    elements_f = elements.astype(np.float32)
    enc32 = enc_weights.astype(np.int32)
    mods32 = np.array(mods, dtype=np.int32)[None, None, :]
    while start < hom_count:
        stop = min(start + chunk, hom_count)
        b = stop - start
        ks = np.arange(start, stop, dtype=np.int64)
        # Mixed-radix decode of the endomorphism index into matrix entries.
        entries = np.empty((b, r * r), dtype=np.int64)
        rem = ks
        for pos in range(r * r - 1, -1, -1):
            rad = int(radii[pos])
            entries[:, pos] = rem % rad
            rem = rem // rad
        mats = (entries.reshape(b, r, r) * steps[None, :, :]).astype(np.float32)
        # one large product per chunk: (order, r) @ (r, b*r) keeps BLAS busy
        stacked = mats.transpose(1, 0, 2).reshape(r, b * r)
        images = (elements_f @ stacked).reshape(order, b, r).astype(np.int32)
        images %= mods32
        codes = images @ enc32  # (order, b): element -> image code
        # permutation test: scatter each column onto [0, order) and demand
        # full coverage (order hits on order slots means no collision)
        visited = np.zeros((b, order), dtype=bool)
        visited[np.arange(b)[None, :], codes] = True
        count += int(visited.all(axis=1).sum())
        start = stop
    return count


@dataclass(frozen=True)
class AutBoundReport:
    """Outcome of the automorphism lower-bound checks for one group.

    ``rank2_bound_ok`` is None when the group is cyclic (bound not
    applicable).
    """

    lower_bound_ok: bool
    rank2_bound_ok: bool | None


def check_aut_lower_bound(a: AbelianPGroup) -> AutBoundReport:
    """Verify #Aut(A) >= #A (1 - 1/p), and #Aut(A) >= #A when rank >= 2.

    Both comparisons are exact (the first is cleared to
    p * #Aut >= #A * (p - 1)).  Cyclic groups attain equality in the first
    bound.  Refuses the trivial group, for which the bounds say nothing.
    """
    if a.is_trivial():
        raise RefusalError("automorphism bounds are about nontrivial groups")
    order = a.order
    aut = a.aut_order
    lower_ok = a.p * aut >= order * (a.p - 1)
    rank2_ok = (aut >= order) if a.rank >= 2 else None
    return AutBoundReport(lower_bound_ok=lower_ok, rank2_bound_ok=rank2_ok)


def aut_exponent_forms(lam: Partition) -> tuple[Fraction, Fraction]:
    """Two closed forms of the p-exponent in the aut-count lower bound.

    For a partition lam (the conjugate type) with gaps m_j = lam_j - lam_{j+1}:

      form A = lam_1^2/2 - 3 lam_1/2 + ((|lam^2| - lam_1^2) - (|lam| - lam_1))
               + sum_j m_j lam_{j+1}
      form B = sum_j (lam_j^2 - lam_j) - m_j^2/2 - m_j/2

    They are equal as rationals; returning both lets tests confirm the
    algebra over the full range exactly.
    """
    if not is_partition(lam):
        raise ValueError(f"not a partition: {lam!r}")
    if not lam:
        return Fraction(0), Fraction(0)
    ext = list(lam) + [0]
    m = [ext[j] - ext[j + 1] for j in range(len(lam))]
    l1 = lam[0]
    sq = sum(x * x for x in lam)
    form_a = (
        Fraction(l1 * l1, 2)
        - Fraction(3 * l1, 2)
        + (sq - l1 * l1)
        - (sum(lam) - l1)
        + sum(m[j] * ext[j + 1] for j in range(len(lam)))
    )
    form_b = sum(
        Fraction(lam[j] * lam[j] - lam[j], 1)
        - Fraction(m[j] * m[j], 2)
        - Fraction(m[j], 2)
        for j in range(len(lam))
    )
    return Fraction(form_a), Fraction(form_b)


def groups_of_order_exponent(p: int, n: int) -> list[AbelianPGroup]:
    """All abelian p-groups of order p^n, in canonical (reverse-lex) order."""
    from .partitions import enumerate_partitions

    return [AbelianPGroup(p, parts) for parts in enumerate_partitions(n)]


def _log_comparison_bits(b1: int, e1: int, b2: int, e2: int) -> int:
    return max(b1.bit_length() * e1, b2.bit_length() * e2)


def pow_le(b1: int, e1: int, b2: int, e2: int) -> bool:
    """Decide b1**e1 <= b2**e2 exactly for positive big integers.

    The exponents can be so large (10^11 and beyond) that materializing the
    powers is out of the question, so the comparison runs through certified
    stages: float interval logs, then arbitrary-precision interval logs, and
    only as a last resort exact integer powers.  Every stage is rigorous; a
    stage that cannot separate the sides defers to the next.
    """
    if b1 <= 0 or b2 <= 0 or e1 < 0 or e2 < 0:
        raise ValueError("positive bases and nonnegative exponents required")
    if b1 == 1 or e1 == 0:
        return True if (b2 >= 1) else False
    if b2 == 1 or e2 == 0:
        return False  # b1**e1 > 1 here

    g = math.gcd(e1, e2)
    e1 //= g
    e2 //= g

    from .numerics import iv_from_int, iv_log_int, iv_mul

    lhs = iv_mul(iv_log_int(b1), iv_from_int(e1))
    rhs = iv_mul(iv_log_int(b2), iv_from_int(e2))
    if lhs.hi <= rhs.lo:
        return True
    if lhs.lo > rhs.hi:
        return False

    # Escalate precision with mpmath's rigorous interval context.
    import mpmath

    for prec in (120, 400, 2000):
        ctx = mpmath.iv
        old = ctx.prec
        try:
            ctx.prec = prec
            left = ctx.log(ctx.mpf(b1)) * e1
            right = ctx.log(ctx.mpf(b2)) * e2
            if left.b <= right.a:
                return True
            if left.a > right.b:
                return False
        finally:
            ctx.prec = old

    if _log_comparison_bits(b1, e1, b2, e2) <= 50_000_000:
        return b1**e1 <= b2**e2
    raise RefusalError(
        "power comparison undecided at 2000 bits and too large for exact "
        f"arithmetic: {b1}^{e1} vs {b2}^{e2}"
    )
