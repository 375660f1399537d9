"""Top-level attribution estimators behind one configuration surface.

Three families share the machinery:

* ``leverage``: paired Bernoulli sampling without replacement with
  inclusion probabilities proportional to the closed-form row leverage
  scores, solved by the projected least-squares route.
* ``kernel``: i.i.d. kernel-weighted sampling with replacement, solved by
  the Lagrange-multiplier route.
* ``kernel_optimized``: paired kernel sampling where whole size levels are
  enumerated outright whenever the remaining budget covers them, with the
  leftover budget spent on paired draws from the residual distribution.

The ablation grid runs every valid {distribution} x {paired} x
{replacement} combination under shared seeds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .combinatorics import SetSizeProfile
from .errors import SolverError
from .exact import ShapleyVector
from .regression import SampledSystem, solve_lagrange, solve_projected
from .sampling import (
    bernoulli_sample,
    mask_log_probability,
    sample_with_replacement,
    solve_c,
)

__all__ = [
    "FAMILIES",
    "EstimatorConfig",
    "EstimateResult",
    "estimate",
    "leverage_shap",
    "kernel_shap",
    "optimized_kernel_shap",
    "ablation_grid",
]

FAMILIES = ("leverage", "kernel", "kernel_optimized")

_FAMILY_DEFAULTS = {
    "leverage": {"paired": True, "replacement": "without", "solver": "projected"},
    "kernel": {"paired": False, "replacement": "with", "solver": "lagrange"},
    "kernel_optimized": {"paired": True, "replacement": "without", "solver": "lagrange"},
}

_SOLVERS = {"projected": solve_projected, "lagrange": solve_lagrange}

# Fresh-row retries after a rank-deficient with-replacement sample.
RETRY_CAP = 3


@dataclass(frozen=True)
class EstimatorConfig:
    """Estimator family plus sampling/solver switches.

    Unset switches inherit the family defaults listed above.  The budget m
    counts value-function evaluations, including the two reserved for the
    full and empty sets.
    """

    family: str
    m: int
    paired: bool | None = None
    replacement: str | None = None
    deterministic_counts: bool = False
    seed: int | None = None
    solver: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"budget must be an integer >= 2, got {self.m!r}")
        defaults = _FAMILY_DEFAULTS[self.family]
        for name in ("paired", "replacement", "solver"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, defaults[name])
        if self.replacement not in ("with", "without"):
            raise ValueError(f"replacement must be 'with' or 'without', got {self.replacement!r}")
        if self.solver not in _SOLVERS:
            raise ValueError(f"solver must be one of {tuple(_SOLVERS)}, got {self.solver!r}")
        if self.replacement == "without" and not self.paired:
            raise ValueError("without-replacement sampling is defined on complement pairs; set paired=True")
        if self.family == "kernel_optimized" and self.replacement != "without":
            raise ValueError("the optimized kernel family is the without-replacement budget rule")

    @property
    def distribution(self) -> str:
        return "leverage" if self.family == "leverage" else "kernel"

    @property
    def label(self) -> str:
        bits = [self.family, f"m={self.m}", "paired" if self.paired else "unpaired",
                f"{self.replacement}-replacement"]
        if self.deterministic_counts:
            bits.append("deterministic-counts")
        return ",".join(bits)


@dataclass
class EstimateResult:
    """One estimation run: the estimate plus its budget and sampler accounting."""

    phi_hat: ShapleyVector
    evals_used: int
    c: float | None
    size_counts: dict[int, int]
    solver_diagnostics: dict
    seed: int | None
    config: EstimatorConfig

    @property
    def phi(self) -> np.ndarray:
        return self.phi_hat.phi


def _baseline(oracle, n: int) -> tuple[float, float]:
    ends = np.zeros((2, n), dtype=np.uint8)
    ends[1] = 1
    v0, v1 = oracle.eval_batch(ends)
    return float(v0), float(v1)


def _enumerate_size(n: int, s: int) -> np.ndarray:
    out = np.zeros((math.comb(n, s), n), dtype=np.uint8)
    for i, combo in enumerate(itertools.combinations(range(n), s)):
        out[i, combo] = 1
    return out


def _draw_bernoulli(n, m, config, rng, profile):
    c = solve_c(n, m)
    target = (m - 2) // 2 if config.deterministic_counts else None
    masks, plan = bernoulli_sample(
        n, c, rng, deterministic_counts=config.deterministic_counts, pair_target=target
    )
    if masks.shape[0] == 0:
        return masks, np.zeros(0), c
    sizes = masks.sum(axis=1).astype(np.int64)
    smaller = np.minimum(sizes, n - sizes)
    log_q = plan.log_inclusion[smaller]
    weights = np.exp(profile.log_weight[sizes] - log_q)
    return masks, weights, c


def _draw_replacement(n, m, config, rng, profile, sizes_pool=None, rows_budget=None):
    rows_budget = (m - 2) if rows_budget is None else rows_budget
    if config.paired:
        rows_budget -= rows_budget % 2
    if rows_budget <= 0:
        return np.zeros((0, n), dtype=np.uint8), np.zeros(0)
    masks = sample_with_replacement(
        n, rows_budget, config.distribution, config.paired, rng, sizes=sizes_pool
    )
    sizes = masks.sum(axis=1).astype(np.int64)
    log_p = mask_log_probability(n, sizes, config.distribution, sizes=sizes_pool)
    weights = np.exp(profile.log_weight[sizes] - (math.log(masks.shape[0]) + log_p))
    return masks, weights


def _draw_enumerated(n, m, config, rng, profile):
    """Size-level enumeration walking inward, then paired residual draws."""
    remaining = m - 2
    blocks, weight_blocks = [], []
    sizes_left = set(range(1, n))
    s = 1
    while s <= n // 2:
        middle = (2 * s == n)
        cost = math.comb(n, s) * (1 if middle else 2)
        if cost > remaining:
            break
        level = _enumerate_size(n, s)
        blocks.append(level)
        weight_blocks.append(np.full(level.shape[0], math.exp(profile.log_weight[s])))
        sizes_left.discard(s)
        if not middle:
            mirror = 1 - level
            blocks.append(mirror)
            weight_blocks.append(np.full(mirror.shape[0], math.exp(profile.log_weight[n - s])))
            sizes_left.discard(n - s)
        remaining -= cost
        s += 1
    if sizes_left and remaining >= 2:
        masks, weights = _draw_replacement(
            n, m, config, rng, profile, sizes_pool=sorted(sizes_left), rows_budget=remaining
        )
        if masks.shape[0]:
            blocks.append(masks)
            weight_blocks.append(weights)
    if not blocks:
        return np.zeros((0, n), dtype=np.uint8), np.zeros(0)
    return np.concatenate(blocks), np.concatenate(weight_blocks)


def estimate(oracle, config: EstimatorConfig, n: int | None = None) -> EstimateResult:
    """Run one estimator configuration against an oracle."""
    n = oracle.n if n is None else n
    if config.m < n:
        raise ValueError(f"budget m = {config.m} below player count n = {n}")
    # without-replacement samplers saturate at full enumeration; repeated
    # i.i.d. draws beyond 2^n still reduce variance, so they are not capped
    m = config.m
    if config.replacement == "without" and n < 64:
        m = min(m, 2**n)
    profile = SetSizeProfile.for_players(n)
    rng = np.random.default_rng(config.seed)
    solver = _SOLVERS[config.solver]

    count_before = oracle.eval_count
    v0, v1 = _baseline(oracle, n)
    delta = v1 - v0

    bernoulli = config.replacement == "without" and config.distribution == "leverage"
    enumerated = config.replacement == "without" and config.distribution == "kernel"
    attempts = 1 if bernoulli else 1 + RETRY_CAP

    c: float | None = None
    phi: ShapleyVector | None = None
    diagnostics: dict = {}
    sizes = np.zeros(0, dtype=np.int64)
    for attempt in range(attempts):
        if bernoulli:
            masks, weights, c = _draw_bernoulli(n, m, config, rng, profile)
        elif enumerated:
            masks, weights = _draw_enumerated(n, m, config, rng, profile)
        else:
            masks, weights = _draw_replacement(n, m, config, rng, profile)
        if masks.shape[0] == 0:
            # nothing sampled (possible at tiny budgets): fall back to the
            # efficiency split, the minimum-norm point on the constraint
            phi = ShapleyVector(np.full(n, delta / n), delta)
            diagnostics = {"method": "degenerate", "reason": "empty sample"}
            break
        sizes = masks.sum(axis=1).astype(np.int64)
        values = oracle.eval_batch(masks)
        b = values - v0 - sizes * (delta / n)
        system = SampledSystem(n, masks, weights, b, delta)
        try:
            phi, diagnostics = solver(system)
            if attempt > 0:
                diagnostics["retries"] = attempt
            break
        except SolverError:
            if attempt == attempts - 1:
                raise

    evals_used = oracle.eval_count - count_before
    size_counts = {int(s): int(k) for s, k in zip(*np.unique(sizes, return_counts=True))}
    return EstimateResult(
        phi_hat=phi,
        evals_used=evals_used,
        c=c,
        size_counts=size_counts,
        solver_diagnostics=diagnostics,
        seed=config.seed,
        config=config,
    )


def leverage_shap(oracle, config: EstimatorConfig, n: int | None = None) -> EstimateResult:
    """Paired without-replacement leverage-score sampling (the default estimator)."""
    if config.family != "leverage":
        raise ValueError(f"expected family 'leverage', got {config.family!r}")
    return estimate(oracle, config, n)


def kernel_shap(oracle, config: EstimatorConfig, n: int | None = None) -> EstimateResult:
    """Classic kernel-weighted sampling with replacement."""
    if config.family != "kernel":
        raise ValueError(f"expected family 'kernel', got {config.family!r}")
    return estimate(oracle, config, n)


def optimized_kernel_shap(oracle, config: EstimatorConfig, n: int | None = None) -> EstimateResult:
    """Kernel sampling with deterministic size enumeration and paired residual draws."""
    if config.family != "kernel_optimized":
        raise ValueError(f"expected family 'kernel_optimized', got {config.family!r}")
    return estimate(oracle, config, n)


def ablation_grid(oracle, n: int, m: int, seeds) -> list[dict]:
    """Run every valid distribution/paired/replacement combination per seed.

    Rows share seeds across cells for paired comparisons.  Invalid corners
    of the 2x2x2 grid (unpaired without-replacement) are skipped.
    """
    rows: list[dict] = []
    for distribution, paired, replacement in itertools.product(
        ("leverage", "kernel"), (True, False), ("without", "with")
    ):
        family = distribution
        if distribution == "kernel" and replacement == "without":
            family = "kernel_optimized"
        try:
            base = EstimatorConfig(
                family=family, m=m, paired=paired, replacement=replacement
            )
        except ValueError:
            continue  # undefined corner of the grid
        for seed in seeds:
            config = replace(base, seed=seed)
            result = estimate(oracle, config, n)
            rows.append(
                {
                    "distribution": distribution,
                    "paired": paired,
                    "replacement": replacement,
                    "seed": seed,
                    "result": result,
                }
            )
    return rows
