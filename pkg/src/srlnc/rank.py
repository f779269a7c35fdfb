"""Rank statistics of sparse random matrices over GF(q).

Everything here is driven by one scalar: the probability ``lam`` that scaling
a biased coefficient by a fixed nonzero constant leaves the uniform character
sum unchanged, ``lam = 1 - q(1-p)/(q-1)``.  From it we get

* ``rho(c, r)``: probability that a fixed nonzero combination of ``c``
  independent sparse columns of height ``r`` is the zero vector,
  ``[ (1/q) (1 + (q-1) lam^c) ]^r``;
* ``pi(ell, r)``: signed correction terms obtained by peeling smaller
  zero-sum subsets out of ``rho`` with a binomial convolution;
* ``full_rank_prob(r, c)``: exponential approximation of the probability that
  an ``r x c`` sparse matrix (``r >= c``) has rank ``c``;
* ``RankTables.innovation_probability(t)``: probability that one more sparse
  vector is independent of ``t`` already-independent ones, for ``t < K``.

At ``p = 1/q`` exactly, every output switches to the closed classic-RLNC
formulas (``1 - q^(t-K)`` and the full-rank product), which are exact rather
than approximate.  For ``p > 1/q`` the approximation is known to be tight for
moderate dimensions but carries no formal error bound; the test suite
pins it against exhaustive enumeration for small matrices.

The recursion for ``pi`` is printed ambiguously in its source: the second
subscript of the convolution factor reads as the subset size where a row
count would be expected.  Both readings are implemented behind
``pi_variant``: ``"subset-size"`` evaluates the factor as rho(s, ell) exactly
as printed, ``"row-count"`` evaluates rho(s, r).  The row-count reading makes
``pi(ell, r)`` the probability that ``ell`` specific columns form a minimal
zero-sum set (verified against enumeration), and it is the default.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math

from .errors import ConfigError
from .gf import get_field

log = logging.getLogger(__name__)

PI_VARIANTS = ("row-count", "subset-size")
DEFAULT_PI_VARIANT = "row-count"


def _binom(n: int, k: int) -> float:
    """Binomial coefficient as a float; log-gamma above 60 to dodge overflow."""
    if k < 0 or k > n:
        return 0.0
    if n <= 60:
        return float(math.comb(n, k))
    return math.exp(
        math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    )


def classic_full_rank_prob(r: int, c: int, q: int) -> float:
    """Exact classic (uniform-coefficient) full-rank probability of an r x c
    matrix with r >= c: prod_{i=0}^{c-1} (1 - q^(i-r))."""
    out = 1.0
    for i in range(c):
        out *= 1.0 - float(q) ** (i - r)
    return out


def classic_innovation_prob(t: int, K: int, q: int) -> float:
    """Exact classic probability that a fresh uniform vector escapes a
    t-dimensional subspace of GF(q)^K: 1 - q^(t-K)."""
    return 1.0 - float(q) ** (t - K)


def _validate_pq(p: float, q: int) -> None:
    get_field(q)
    if not (1.0 / q <= p < 1.0):
        raise ConfigError(f"p={p} outside [1/q, 1) for q={q}")


class _SparseRankModel:
    """rho/pi/full-rank machinery for one (q, p, pi_variant).

    Independent of the generation size; memoises pi by (ell, r).
    """

    def __init__(self, q: int, p: float, pi_variant: str = DEFAULT_PI_VARIANT):
        _validate_pq(p, q)
        if pi_variant not in PI_VARIANTS:
            raise ConfigError(
                f"pi_variant must be one of {PI_VARIANTS}, got {pi_variant!r}"
            )
        self.q = q
        self.p = p
        self.pi_variant = pi_variant
        self.classic = p == 1.0 / q
        self._lam = 1.0 - q * (1.0 - p) / (q - 1.0)
        self._pi_memo: dict[tuple[int, int], float] = {}

    def rho(self, c: int, r: int) -> float:
        """P(a fixed nonzero combination of c sparse columns of height r
        sums to zero)."""
        if c < 0 or r < 0:
            raise ConfigError("rho needs nonnegative arguments")
        per_row = (1.0 + (self.q - 1.0) * self._lam**c) / self.q
        return per_row**r

    def pi(self, ell: int, r: int) -> float:
        """Signed correction term of order ell for columns of height r."""
        if ell < 1 or r < 0:
            raise ConfigError("pi needs ell >= 1 and r >= 0")
        key = (ell, r)
        got = self._pi_memo.get(key)
        if got is not None:
            return got
        if ell == 1:
            val = self.rho(1, r)
        else:
            val = self.rho(ell, r)
            for s in range(1, ell):
                second = ell if self.pi_variant == "subset-size" else r
                val -= _binom(ell - 1, s) * self.rho(s, second) * self.pi(ell - s, r)
        self._pi_memo[key] = val
        return val

    def full_rank_prob(self, r: int, c: int) -> float:
        """P(an r x c sparse random matrix has rank c), for r >= c >= 0."""
        if not (isinstance(r, int) and isinstance(c, int)) or c < 0 or r < c:
            raise ConfigError(f"full_rank_prob needs integers r >= c >= 0, got {r}, {c}")
        if c == 0:
            return 1.0
        if self.classic:
            return classic_full_rank_prob(r, c, self.q)
        base = 1.0 - self.p**r
        if base <= 0.0:
            return 0.0
        expo = 0.0
        for ell in range(2, c + 1):
            expo += _binom(c, ell) * self.pi(ell, r) / base**ell
        return _clamp01(base**c * math.exp(-expo))


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


@functools.lru_cache(maxsize=256)
def _model(q: int, p: float, pi_variant: str) -> _SparseRankModel:
    return _SparseRankModel(q, p, pi_variant)


def rho(c: int, r: int, p: float, q: int) -> float:
    """Module-level convenience wrapper; see _SparseRankModel.rho."""
    return _model(q, p, DEFAULT_PI_VARIANT).rho(c, r)


def full_rank_prob(
    r: int, c: int, p: float, q: int, pi_variant: str = DEFAULT_PI_VARIANT
) -> float:
    """Full-rank probability of an r x c sparse matrix (r >= c)."""
    return _model(q, p, pi_variant).full_rank_prob(r, c)


class RankTables:
    """Innovation and full-rank probabilities for one (K, q, p).

    Builds the innovation table ``W[t]`` for ``t = 0 .. K-1`` eagerly; the
    underlying rho/pi values are memoised and shared.  Instances are cheap,
    immutable once built, and safe to share between threads.

    W[t] is the probability that, given t mutually independent sparse columns
    of height K, one more sparse column is independent of them.  It is exact
    at p = 1/q and an approximation above; it is clamped to [0, 1] and checked
    to be nonincreasing in t (violations beyond 1e-9 are logged, not raised,
    because extreme p can push the approximation outside its comfort zone).
    """

    def __init__(self, K: int, q: int, p: float, pi_variant: str = DEFAULT_PI_VARIANT):
        if not isinstance(K, int) or K < 1:
            raise ConfigError(f"K must be a positive integer, got {K!r}")
        self.K = K
        self.q = q
        self.p = p
        self.pi_variant = pi_variant
        self._mdl = _model(q, p, pi_variant)
        self.classic = self._mdl.classic
        self.W = tuple(self._innovation(t) for t in range(K))
        worst = max(
            (self.W[t + 1] - self.W[t] for t in range(K - 1)), default=0.0
        )
        if worst > 1e-9:
            log.warning(
                "innovation table not monotone at K=%d q=%d p=%g "
                "(worst increase %.3g); approximation outside its range",
                K, q, p, worst,
            )

    def _innovation(self, t: int) -> float:
        if self.classic:
            return classic_innovation_prob(t, self.K, self.q)
        base = 1.0 - self.p**self.K
        if base <= 0.0:
            return 0.0
        expo = 0.0
        for ell in range(2, t + 2):
            expo += _binom(t, ell - 1) * self._mdl.pi(ell, self.K) / base**ell
        return _clamp01(base * math.exp(-expo))

    def innovation_probability(self, t: int) -> float:
        """W[t] for 0 <= t <= K-1."""
        if not isinstance(t, int) or not (0 <= t < self.K):
            raise ConfigError(f"t={t!r} outside 0..{self.K - 1}")
        return self.W[t]

    def full_rank_prob(self, r: int, c: int) -> float:
        return self._mdl.full_rank_prob(r, c)

    def rho(self, c: int, r: int) -> float:
        return self._mdl.rho(c, r)

    def pi(self, ell: int, r: int) -> float:
        return self._mdl.pi(ell, r)

    def matches(self, K: int, q: int, p: float) -> bool:
        return self.K == K and self.q == q and self.p == p


# -- exhaustive enumeration ---------------------------------------------------
#
# Ground truth for small matrices: sum the coefficient-law weight of every
# possible r x c matrix whose rank is c.  Exponential in r*c, guarded by
# `limit`; used by the CLI's --with-oracle column and for audits.

_ENUM_LIMIT = 1 << 21


def _gf2_rank(packed_rows: list[int]) -> int:
    pivots: dict[int, int] = {}
    for x in packed_rows:
        while x:
            top = x.bit_length() - 1
            if top not in pivots:
                pivots[top] = x
                break
            x ^= pivots[top]
    return len(pivots)


def _gfq_rank(rows: list[list[int]], q: int) -> int:
    gfq = get_field(q)
    mul, inv = gfq.mul_table, gfq.inv_table
    work = [row[:] for row in rows]
    n_cols = len(work[0]) if work else 0
    rank = 0
    for col in range(n_cols):
        piv = next((i for i in range(rank, len(work)) if work[i][col]), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        lead = work[rank][col]
        if lead != 1:
            li = int(inv[lead])
            work[rank] = [int(mul[li, x]) for x in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][col]:
                f = work[i][col]
                work[i] = [x ^ int(mul[f, y]) for x, y in zip(work[i], work[rank])]
        rank += 1
        if rank == len(work):
            break
    return rank


def exact_full_rank_prob(r: int, c: int, p: float, q: int,
                         limit: int = _ENUM_LIMIT) -> float:
    """Exact P(rank = c) of an r x c biased-sparse matrix by enumeration.

    Refuses to enumerate more than `limit` matrices (q ** (r*c) of them).
    """
    _validate_pq(p, q)
    if c < 0 or r < c:
        raise ConfigError(f"enumeration needs r >= c >= 0, got {r}, {c}")
    if c == 0:
        return 1.0
    cells = r * c
    if q ** cells > limit:
        raise ConfigError(
            f"enumeration of q^(r*c) = {q}^{cells} matrices exceeds the "
            f"limit of {limit}"
        )
    w_nz = (1.0 - p) / (q - 1.0)
    total = 0.0
    if q == 2:
        for bits in range(1 << cells):
            rows = [(bits >> (c * i)) & ((1 << c) - 1) for i in range(r)]
            if _gf2_rank(rows) == c:
                nz = bits.bit_count()
                total += p ** (cells - nz) * w_nz ** nz
    else:
        for flat in itertools.product(range(q), repeat=cells):
            rows = [list(flat[c * i: c * (i + 1)]) for i in range(r)]
            if _gfq_rank(rows, q) == c:
                nz = sum(1 for x in flat if x)
                total += p ** (cells - nz) * w_nz ** nz
    return total


def exact_innovation_prob(t: int, K: int, p: float, q: int,
                          limit: int = _ENUM_LIMIT) -> float:
    """Exact counterpart of the innovation probability W[t] by enumeration.

    Ratio of the exact full-rank probabilities of t+1 and t columns of
    height K: the chance that vector t+1 is innovative given the first t
    were mutually independent.
    """
    if not 0 <= t < K:
        raise ConfigError(f"t={t!r} outside 0..{K - 1}")
    # The denominator is positive for every p < 1: any full-rank matrix
    # carries positive weight under the coefficient law.
    denom = exact_full_rank_prob(K, t, p, q, limit)
    return exact_full_rank_prob(K, t + 1, p, q, limit) / denom
