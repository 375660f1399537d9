"""Row samplers over the exponential subset space.

Three mechanisms:

* :func:`solve_c` calibrates the oversampling constant so the expected
  number of sampled rows hits the evaluation budget.
* :func:`bernoulli_sample` draws complement pairs without replacement,
  working size by size so the exponential row space is never enumerated.
* :func:`sample_with_replacement` draws i.i.d. rows from either the
  kernel-weight distribution or the uniform-per-size (leverage)
  distribution, optionally paired with complements.

All randomness flows through a caller-supplied numpy Generator, so runs
are reproducible from a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import SetSizeProfile, combo_unrank

__all__ = [
    "PairedSamplePlan",
    "solve_c",
    "bernoulli_sample",
    "sample_with_replacement",
    "size_distribution",
    "mask_log_probability",
]

# Distinct-index drawing: below this population size a partial shuffle is
# cheapest; above it, rejection sampling never collides in practice.
_SHUFFLE_LIMIT = 4096
_INT64_LIMIT = 2**63 - 1


@dataclass(frozen=True)
class PairedSamplePlan:
    """Realized per-size accounting of one Bernoulli pair-sampling run.

    `log_inclusion[s]` is log p+(s) = log min(1, 2c / C(n, s)) for pair
    groups keyed by the smaller size s <= n//2.  For even n the middle
    layer is partitioned by anchoring player n inside z, so a pair can
    never be drawn twice.
    """

    n: int
    c: float
    log_inclusion: np.ndarray        # (n//2 + 1,), index by smaller size
    pair_counts: dict[int, int]      # drawn pairs per smaller size
    deterministic_counts: bool
    middle_partitioned: bool

    @property
    def total_pairs(self) -> int:
        return sum(self.pair_counts.values())


def _expected_rows(t: float, caps: np.ndarray, log_caps: np.ndarray) -> float:
    """F(t) = sum over sizes of min(t, C(n, s)); comparisons in log space."""
    if t <= 0:
        return 0.0
    log_t = math.log(t)
    saturated = log_caps <= log_t
    return float(caps[saturated].sum()) + t * float((~saturated).sum())


def solve_c(n: int, m: int) -> float:
    """Oversampling constant c with expected sampled rows m - 2.

    Solves sum_s min(1, 2c / C(n,s)) C(n,s) = m - 2 by bisection on
    t = 2c; the left side is continuous, piecewise linear, and strictly
    increasing until every size saturates, so the solution is unique
    (and minimal at full saturation).  Relative tolerance 1e-9.
    """
    if n < 2:
        raise ValueError(f"player count must be >= 2, got {n}")
    if m < n:
        raise ValueError(f"budget m = {m} below player count n = {n}")
    if m > 2**n:
        raise ValueError(f"budget m = {m} exceeds 2**{n}; cap it before solving")
    if m == 2**n:
        # every pair must be included: minimal c puts the middle size at
        # inclusion probability exactly 1
        mid = math.comb(n, n // 2)
        try:
            return float(mid) / 2.0
        except OverflowError:
            return math.inf

    profile = SetSizeProfile.for_players(n)
    log_caps = profile.log_binom[1:n]
    caps = np.array(
        [float(math.comb(n, s)) if profile.log_binom[s] < 709 else math.inf for s in range(1, n)]
    )
    target = float(m - 2)
    hi = min(float(np.max(caps)), target)
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _expected_rows(mid, caps, log_caps) >= target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    return hi / 2.0


def _distinct_uniform_indices(population: int, k: int, rng: np.random.Generator) -> list[int]:
    """k distinct uniform integers in [0, population), exact for any size."""
    if k == 0:
        return []
    if population <= _SHUFFLE_LIMIT:
        return [int(i) for i in rng.choice(population, size=k, replace=False)]
    chosen: set[int] = set()
    if population <= _INT64_LIMIT:
        while len(chosen) < k:
            for i in rng.integers(0, population, size=k - len(chosen)):
                chosen.add(int(i))
        return sorted(chosen)
    # big-integer rejection from raw bits; expected retries are negligible
    # because k**2 / population ~ 0 at these scales
    bits = population.bit_length()
    nbytes = (bits + 7) // 8
    excess = nbytes * 8 - bits
    while len(chosen) < k:
        raw = rng.bytes(nbytes)
        value = int.from_bytes(raw, "big") >> excess
        if value < population:
            chosen.add(value)
    return sorted(chosen)


def _pair_count(
    population: int, log_p: float, deterministic: bool, rng: np.random.Generator
) -> float | int:
    """Number of pairs drawn at one size (float expectation if deterministic)."""
    expected = math.exp(math.log(population) + log_p) if log_p > -math.inf else 0.0
    if deterministic:
        return expected
    p = math.exp(log_p)
    if population > _INT64_LIMIT or p < 1e-12:
        # Binomial(N, p) with astronomical N: total-variation distance to
        # Poisson(Np) is at most Np^2, far below any test tolerance here
        return int(rng.poisson(expected))
    return int(rng.binomial(population, p))


def _largest_remainder_round(
    expectations: list[float], caps: list[int], target: int | None = None
) -> list[int]:
    """Round expectations to integers summing to `target`, capped per entry."""
    if target is None:
        target = int(math.floor(sum(expectations) + 0.5))
    out = [min(int(math.floor(e)), cap) for e, cap in zip(expectations, caps)]
    fractions = sorted(
        range(len(expectations)),
        key=lambda i: expectations[i] - math.floor(expectations[i]),
        reverse=True,
    )
    deficit = target - sum(out)
    idx = 0
    while deficit > 0 and idx < 2 * len(out):
        i = fractions[idx % len(out)]
        if out[i] < caps[i]:
            out[i] += 1
            deficit -= 1
        idx += 1
    return out


def bernoulli_sample(
    n: int,
    c: float,
    rng: np.random.Generator,
    *,
    deterministic_counts: bool = False,
    pair_target: int | None = None,
) -> tuple[np.ndarray, PairedSamplePlan]:
    """Paired sampling without replacement over all complement pairs.

    Each unordered pair (z, complement z) with 0 < |z| < n is included
    independently with probability min(1, 2c / C(n, |z|)).  Returns the
    sampled masks as a (2k, n) array with each pair adjacent (z first),
    plus the realized plan.  With `deterministic_counts`, per-size counts
    are the rounded expectations (largest-remainder, so the total matches
    `pair_target` when given, else the rounded expected pair count)
    instead of Binomial draws.
    """
    profile = SetSizeProfile.for_players(n)
    half = n // 2
    log_2c = math.log(2 * c) if c > 0 else -math.inf
    log_inclusion = np.full(half + 1, -np.inf)
    populations: list[int] = []
    sizes: list[int] = []
    for s in range(1, half + 1):
        middle = (n % 2 == 0) and (s == half)
        log_inclusion[s] = min(0.0, log_2c - profile.log_binom[s])
        populations.append(math.comb(n - 1, s - 1) if middle else math.comb(n, s))
        sizes.append(s)

    if deterministic_counts:
        expectations = [
            _pair_count(pop, log_inclusion[s], True, rng) for s, pop in zip(sizes, populations)
        ]
        counts = _largest_remainder_round(expectations, populations, pair_target)
    else:
        counts = [
            _pair_count(pop, log_inclusion[s], False, rng)
            for s, pop in zip(sizes, populations)
        ]
        counts = [min(k, pop) for k, pop in zip(counts, populations)]

    blocks: list[np.ndarray] = []
    pair_counts: dict[int, int] = {}
    for s, pop, k in zip(sizes, populations, counts):
        pair_counts[s] = k
        if k == 0:
            continue
        middle = (n % 2 == 0) and (s == half)
        pair_block = np.empty((2 * k, n), dtype=np.uint8)
        for row, idx in enumerate(_distinct_uniform_indices(pop, k, rng)):
            if middle:
                z = np.zeros(n, dtype=np.uint8)
                if s > 1:
                    z[: n - 1] = combo_unrank(n - 1, s - 1, idx)
                z[n - 1] = 1  # anchor player n inside z to partition the layer
            else:
                z = combo_unrank(n, s, idx)
            pair_block[2 * row] = z
            pair_block[2 * row + 1] = 1 - z
        blocks.append(pair_block)

    masks = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, n), dtype=np.uint8)
    log_inclusion.flags.writeable = False
    plan = PairedSamplePlan(
        n=n,
        c=c,
        log_inclusion=log_inclusion,
        pair_counts=pair_counts,
        deterministic_counts=deterministic_counts,
        middle_partitioned=(n % 2 == 0),
    )
    return masks, plan


def size_distribution(n: int, distribution: str, sizes=None) -> tuple[np.ndarray, np.ndarray]:
    """(sizes, pmf) of the row set size under one draw of the sampler.

    `distribution` is "kernel" (mass proportional to C(n,s) w(s), i.e.
    1/(s(n-s))) or "leverage" (uniform over sizes).  `sizes` optionally
    restricts and renormalizes over a subset of sizes.
    """
    allowed = np.arange(1, n) if sizes is None else np.asarray(sorted(sizes), dtype=np.int64)
    if allowed.size == 0:
        raise ValueError("no sizes to sample from")
    if np.any((allowed < 1) | (allowed > n - 1)):
        raise ValueError("sizes must lie strictly between 0 and n")
    if distribution == "leverage":
        pmf = np.full(allowed.size, 1.0 / allowed.size)
    elif distribution == "kernel":
        raw = 1.0 / (allowed * (n - allowed))
        pmf = raw / raw.sum()
    else:
        raise ValueError(f"unknown distribution {distribution!r}")
    return allowed, pmf


def mask_log_probability(n: int, row_sizes: np.ndarray, distribution: str, sizes=None) -> np.ndarray:
    """log P(a single draw equals one specific mask of the given size)."""
    allowed, pmf = size_distribution(n, distribution, sizes)
    profile = SetSizeProfile.for_players(n)
    log_pmf = np.full(n + 1, -np.inf)
    log_pmf[allowed] = np.log(pmf)
    row_sizes = np.asarray(row_sizes, dtype=np.int64)
    return log_pmf[row_sizes] - profile.log_binom[row_sizes]


def _uniform_masks_by_size(n: int, draw_sizes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform random subsets of prescribed sizes, vectorized per size group."""
    k = draw_sizes.size
    masks = np.zeros((k, n), dtype=np.uint8)
    for s in np.unique(draw_sizes):
        rows = np.flatnonzero(draw_sizes == s)
        scores = rng.random((rows.size, n))
        chosen = np.argpartition(scores, int(s), axis=1)[:, : int(s)]
        masks[rows[:, None], chosen] = 1
    return masks


def sample_with_replacement(
    n: int,
    count: int,
    distribution: str,
    paired: bool,
    rng: np.random.Generator,
    sizes=None,
) -> np.ndarray:
    """i.i.d. rows from the kernel or leverage distribution, as a (k, n) array.

    Each draw picks a size from :func:`size_distribution` and then a
    uniform subset of that size.  In paired mode, count // 2 draws are
    made and each mask is immediately followed by its complement.
    """
    if count < 1:
        raise ValueError(f"need at least one draw, got {count}")
    allowed, pmf = size_distribution(n, distribution, sizes)
    primaries = count // 2 if paired else count
    if primaries == 0:
        return np.zeros((0, n), dtype=np.uint8)
    draw_sizes = rng.choice(allowed, size=primaries, p=pmf)
    prim = _uniform_masks_by_size(n, draw_sizes, rng)
    if not paired:
        return prim
    out = np.empty((2 * primaries, n), dtype=np.uint8)
    out[0::2] = prim
    out[1::2] = 1 - prim
    return out
