"""Binomial machinery, regression kernel weights, and combination (un)ranking.

Scalar accessors are exact: they go through big-integer binomial
coefficients and correctly rounded rational-to-float conversion, so the
linear values are accurate to the last bit whenever they are representable.
Bulk per-size tables (:class:`SetSizeProfile`) are float64 log-space arrays,
built from exact integers for moderate n and from a stable log recurrence
beyond that, where the coefficients themselves no longer fit in a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .masks import as_mask, popcount

__all__ = [
    "log_binomial",
    "shapley_weight",
    "log_shapley_weight",
    "leverage_score",
    "log_leverage_score",
    "SetSizeProfile",
    "combo_unrank",
    "combo_rank",
]

# Above this player count, exact big-integer table construction gets slow
# and C(n, n/2) is far beyond float range anyway; switch to the recurrence.
_EXACT_TABLE_LIMIT = 512


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError(f"player count must be >= 2, got {n}")


def _check_size(n: int, s: int, lo: int, hi: int) -> None:
    if not lo <= s <= hi:
        raise ValueError(f"set size {s} out of range {lo}..{hi} for n={n}")


def log_binomial(n: int, s: int) -> float:
    """Natural log of C(n, s), exact big-integer route."""
    if not 0 <= s <= n:
        raise ValueError(f"set size {s} out of range 0..{n}")
    return math.log(math.comb(n, s))


def shapley_weight(n: int, s: int) -> float:
    """Regression kernel weight w(s) = 1 / (C(n,s) * s * (n-s)).

    Correctly rounded; underflows to 0.0 for large n at middle sizes, in
    which case use :func:`log_shapley_weight`.
    """
    _check_n(n)
    _check_size(n, s, 1, n - 1)
    return float(Fraction(1, math.comb(n, s) * s * (n - s)))


def log_shapley_weight(n: int, s: int) -> float:
    _check_n(n)
    _check_size(n, s, 1, n - 1)
    return -math.log(math.comb(n, s) * s * (n - s))


def leverage_score(n: int, s: int) -> float:
    """Row importance of any one size-s subset row: 1 / C(n, s)."""
    _check_n(n)
    _check_size(n, s, 1, n - 1)
    return float(Fraction(1, math.comb(n, s)))


def log_leverage_score(n: int, s: int) -> float:
    _check_n(n)
    _check_size(n, s, 1, n - 1)
    return -log_binomial(n, s)


def _log_binom_table(n: int) -> np.ndarray:
    """log C(n, s) for s = 0..n as a float64 array."""
    if n <= _EXACT_TABLE_LIMIT:
        return np.array([math.log(math.comb(n, s)) for s in range(n + 1)])
    # log C(n, s+1) = log C(n, s) + log(n-s) - log(s+1); cheap and stable,
    # absolute drift stays ~1e-12 even at n = 1e4.  Build the lower half and
    # mirror, so the symmetry C(n,s) = C(n,n-s) holds exactly in the table.
    half = n // 2
    table = np.empty(n + 1)
    table[0] = 0.0
    for s in range(half):
        table[s + 1] = table[s] + math.log(n - s) - math.log(s + 1)
    table[n - half:] = table[half::-1]
    return table


@dataclass(frozen=True)
class SetSizeProfile:
    """Per-size log tables shared by the samplers and system builders.

    All arrays are indexed by set size s and are read-only; entries at
    s = 0 and s = n of `log_weight`/`log_leverage` are -inf (those sizes
    never appear as regression rows).
    """

    n: int
    log_binom: np.ndarray     # shape (n+1,), log C(n, s)
    log_weight: np.ndarray    # shape (n+1,), log w(s) for 1 <= s <= n-1
    log_leverage: np.ndarray  # shape (n+1,), -log C(n, s) for 1 <= s <= n-1

    @staticmethod
    @lru_cache(maxsize=64)
    def for_players(n: int) -> "SetSizeProfile":
        _check_n(n)
        log_binom = _log_binom_table(n)
        s = np.arange(n + 1, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_weight = -(log_binom + np.log(s) + np.log(n - s))
            log_leverage = -log_binom.copy()
        log_weight[0] = log_weight[n] = -np.inf
        log_leverage[0] = log_leverage[n] = -np.inf
        for arr in (log_binom, log_weight, log_leverage):
            arr.flags.writeable = False
        return SetSizeProfile(n, log_binom, log_weight, log_leverage)

    def weights(self, sizes: np.ndarray) -> np.ndarray:
        """Linear w(s) for an array of row sizes (1 <= s <= n-1)."""
        sizes = np.asarray(sizes, dtype=np.int64)
        if np.any((sizes < 1) | (sizes > self.n - 1)):
            raise ValueError("row sizes must be strictly between 0 and n")
        return np.exp(self.log_weight[sizes])


def combo_unrank(n: int, s: int, i: int) -> np.ndarray:
    """The i-th size-s subset of [n] in lexicographic order, as a mask.

    Lexicographic order is over sorted player tuples: for n=4, s=2 the
    sequence is {1,2}, {1,3}, {1,4}, {2,3}, {2,4}, {3,4}.  The rank i may
    be an arbitrarily large integer; all counting is exact.
    """
    if not 1 <= s <= n:
        raise ValueError(f"set size {s} out of range 1..{n}")
    if not 0 <= i < math.comb(n, s):
        raise ValueError(f"rank {i} out of range for C({n},{s}) = {math.comb(n, s)}")
    z = np.zeros(n, dtype=np.uint8)
    k = s
    j = 0  # 0-based candidate element
    while k > 0:
        if n - j == k:  # forced: take everything that remains
            z[j:] = 1
            break
        count = math.comb(n - j - 1, k - 1)  # completions if element j is taken
        if i < count:
            z[j] = 1
            k -= 1
        else:
            i -= count
        j += 1
    return z


def combo_rank(n: int, s: int, mask) -> int:
    """Lexicographic rank of a size-s mask; inverse of :func:`combo_unrank`."""
    z = as_mask(mask, n)
    if popcount(z) != s:
        raise ValueError(f"mask has popcount {popcount(z)}, expected {s}")
    rank = 0
    k = s
    prev = -1
    for c in np.flatnonzero(z):
        # every skipped candidate j contributes its count of completions
        for j in range(prev + 1, int(c)):
            rank += math.comb(n - j - 1, k - 1)
        prev = int(c)
        k -= 1
    return rank
