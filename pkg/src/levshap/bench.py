"""Benchmark harness: seeded sweeps, metrics, and machine-readable output.

Cells are independent (game, estimator, m, sigma, gamma, seed) tuples.
Every cell rebuilds its own oracle from the game spec so estimators never
share evaluation counters, and all cells with the same seed see the same
game realization regardless of estimator.  Rows are emitted in fixed grid
order, so output bytes are reproducible for a given spec; wall-clock
timing is opt-in because it would break that reproducibility.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .estimators import FAMILIES, EstimatorConfig, estimate
from .exact import (
    MAX_BRUTE_FORCE_PLAYERS,
    MAX_EXPLICIT_SYSTEM_PLAYERS,
    FullSystem,
    build_full_system,
    exact_constrained_regression,
    exact_shapley,
    gamma_of,
)
from .games import NoiseConfig, memoized, with_noise
from .gamespec import GameSpec, parse_game_spec

__all__ = [
    "CSV_COLUMNS",
    "DEFAULT_M_FACTORS",
    "DEFAULT_SIGMA_GRID",
    "DEFAULT_GAMMA_GRID",
    "ExperimentSpec",
    "MetricRow",
    "run_size_sweep",
    "run_noise_sweep",
    "run_gamma_sweep",
    "aggregate",
    "write_csv",
    "rows_to_csv_bytes",
    "summary_json",
]

CSV_COLUMNS = [
    "game", "n", "estimator", "m", "sigma", "gamma", "seed",
    "l2_error", "objective_ratio", "evals_used", "wall_ms",
]

DEFAULT_M_FACTORS = (5, 10, 20, 40, 80, 160)
DEFAULT_SIGMA_GRID = (0.0, 5e-3, 1e-2, 5e-2, 1e-1, 5e-1, 1.0)
DEFAULT_GAMMA_GRID = (0.1, 1.0, 10.0)

# stream tag separating observation-noise seeding from estimator seeding
_NOISE_STREAM = 0x5EED


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: a game, an estimator set, grids, and a seed count."""

    game: str
    n: int | None = None
    estimators: tuple[str, ...] = ("leverage", "kernel_optimized", "kernel")
    m_grid: tuple[int, ...] = ()
    sigma_grid: tuple[float, ...] = DEFAULT_SIGMA_GRID
    gamma_grid: tuple[float, ...] = DEFAULT_GAMMA_GRID
    seeds: int = 10
    jobs: int = 1
    record_timing: bool = False

    def __post_init__(self):
        if self.seeds < 1:
            raise ValueError("need at least one seed")
        if self.jobs < 1:
            raise ValueError("need at least one worker")
        for family in self.estimators:
            if family not in FAMILIES:
                raise ValueError(f"unknown estimator {family!r}")
        if any(s < 0 for s in self.sigma_grid):
            raise ValueError("noise levels must be nonnegative")


@dataclass
class MetricRow:
    """One benchmark cell; absent metrics serialize to empty CSV fields.

    l2_error is the squared distance to the ground truth; objective_ratio
    divides the full weighted objective at the estimate by its optimum and
    is filled only when the explicit system fits in memory.
    """

    game: str
    n: int
    estimator: str
    m: int
    sigma: float
    gamma: float | None
    seed: int
    l2_error: float | None
    objective_ratio: float | None
    evals_used: int | None
    wall_ms: float | None
    error: str | None = None

    def csv_values(self) -> list:
        def cell(x):
            return "" if x is None else x

        return [
            self.game, self.n, self.estimator, self.m, self.sigma,
            cell(self.gamma), self.seed, cell(self.l2_error),
            cell(self.objective_ratio), cell(self.evals_used), cell(self.wall_ms),
        ]


@dataclass
class _Truth:
    """Shared per-game ground truth, computed once from the noiseless oracle."""

    phi: np.ndarray
    system: FullSystem | None
    best_objective: float | None


def _noise_seed(seed: int) -> int:
    return int(np.random.SeedSequence((seed, _NOISE_STREAM)).generate_state(1)[0])


def _ground_truth(game: GameSpec) -> _Truth:
    n = game.player_count()
    analytic = game.exact_phi()
    if analytic is not None:
        phi = analytic
    else:
        if n > MAX_BRUTE_FORCE_PLAYERS:
            raise ValueError(
                f"no ground truth for {game.display}: n = {n} exceeds brute force "
                f"limit {MAX_BRUTE_FORCE_PLAYERS} and no analytic values exist"
            )
        phi = exact_shapley(memoized(game.build()), n).phi
    system = best = None
    if n <= MAX_EXPLICIT_SYSTEM_PLAYERS:
        system = build_full_system(memoized(game.build()), n)
        best = system.objective(exact_constrained_regression(system).phi)
        # a (near-)zero optimum means the ratio is 0/0 noise; leave it absent
        if best <= 1e-18 * (1.0 + float(system.y @ system.y)):
            best = None
    return _Truth(phi, system, best)


def _run_cell(
    game: GameSpec,
    truth: _Truth,
    family: str,
    m: int,
    sigma: float,
    gamma: float | None,
    seed: int,
    record_timing: bool,
) -> MetricRow:
    n = game.player_count()
    base = dict(
        game=game.display, n=n, estimator=family, m=m, sigma=sigma, gamma=gamma, seed=seed,
    )
    try:
        oracle = game.build()
        if sigma > 0:
            oracle = with_noise(oracle, NoiseConfig(sigma, seed=_noise_seed(seed)))
        config = EstimatorConfig(family, m=m, seed=seed)
        t0 = time.perf_counter()
        result = estimate(oracle, config, n)
        wall = (time.perf_counter() - t0) * 1e3 if record_timing else None
        diff = result.phi - truth.phi
        ratio = None
        if truth.system is not None and truth.best_objective is not None:
            ratio = truth.system.objective(result.phi) / truth.best_objective
        return MetricRow(
            l2_error=float(diff @ diff),
            objective_ratio=ratio,
            evals_used=result.evals_used,
            wall_ms=wall,
            **base,
        )
    except Exception as exc:  # cell failures become error rows, sweep continues
        return MetricRow(
            l2_error=None, objective_ratio=None, evals_used=None, wall_ms=None,
            error=f"{type(exc).__name__}: {exc}", **base,
        )


def _execute(cells: list[tuple], jobs: int) -> list[MetricRow]:
    if jobs <= 1:
        rows = [_run_cell(*cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_cell, *cell) for cell in cells]
            rows = [f.result() for f in futures]  # submission order, not completion
    for row in rows:
        if row.error:
            print(f"warning: cell {row.estimator} m={row.m} sigma={row.sigma} "
                  f"seed={row.seed} failed: {row.error}", file=sys.stderr)
    return rows


def _resolved_m_grid(spec: ExperimentSpec, n: int) -> tuple[int, ...]:
    grid = spec.m_grid or tuple(f * n for f in DEFAULT_M_FACTORS)
    for m in grid:
        if m < n:
            raise ValueError(f"budget {m} below player count {n}")
    return grid


def run_size_sweep(spec: ExperimentSpec) -> list[MetricRow]:
    """Error versus budget on the noiseless game; shared seeds across estimators."""
    game = parse_game_spec(spec.game, spec.n)
    n = game.player_count()
    truth = _ground_truth(game)
    cells = [
        (game, truth, family, m, 0.0, None, seed, spec.record_timing)
        for m in _resolved_m_grid(spec, n)
        for family in spec.estimators
        for seed in range(spec.seeds)
    ]
    return _execute(cells, spec.jobs)


def run_noise_sweep(spec: ExperimentSpec) -> list[MetricRow]:
    """Error versus observation noise; ground truth stays noiseless."""
    game = parse_game_spec(spec.game, spec.n)
    n = game.player_count()
    truth = _ground_truth(game)
    cells = [
        (game, truth, family, m, sigma, None, seed, spec.record_timing)
        for sigma in spec.sigma_grid
        for m in _resolved_m_grid(spec, n)
        for family in spec.estimators
        for seed in range(spec.seeds)
    ]
    return _execute(cells, spec.jobs)


def run_gamma_sweep(spec: ExperimentSpec) -> list[MetricRow]:
    """Error versus the residual-to-signal ratio of constructed games.

    The spec's game must be the `gamma` family; each grid entry overrides
    the target and the row's gamma column records the achieved ratio.
    """
    base = parse_game_spec(spec.game, spec.n)
    if base.name != "gamma":
        raise ValueError("gamma sweeps need a gamma:... game spec")
    n = base.player_count()
    cells = []
    for target in spec.gamma_grid:
        game = replace(base, options={**base.options, "target": float(target)})
        truth = _ground_truth(game)
        phi_vec = exact_constrained_regression(truth.system)
        achieved = gamma_of(truth.system, phi_vec)
        cells += [
            (game, truth, family, m, 0.0, achieved, seed, spec.record_timing)
            for m in _resolved_m_grid(spec, n)
            for family in spec.estimators
            for seed in range(spec.seeds)
        ]
    return _execute(cells, spec.jobs)


def _quartiles(values: np.ndarray) -> dict:
    return {
        "mean": float(values.mean()),
        "q1": float(np.percentile(values, 25, method="linear")),
        "median": float(np.percentile(values, 50, method="linear")),
        "q3": float(np.percentile(values, 75, method="linear")),
    }


def aggregate(rows: list[MetricRow]) -> list[dict]:
    """Mean and quartiles per (game, n, estimator, m, sigma, gamma) group.

    Quartiles interpolate linearly between order statistics.  Groups whose
    every row failed are omitted with a warning.
    """
    groups: dict[tuple, list[MetricRow]] = {}
    for row in rows:
        groups.setdefault(
            (row.game, row.n, row.estimator, row.m, row.sigma, row.gamma), []
        ).append(row)
    out = []
    for key, members in groups.items():
        l2 = np.array([r.l2_error for r in members if r.l2_error is not None])
        if l2.size == 0:
            print(f"warning: dropping empty group {key}", file=sys.stderr)
            continue
        entry = {
            "game": key[0], "n": key[1], "estimator": key[2],
            "m": key[3], "sigma": key[4], "gamma": key[5],
            "count": int(l2.size),
            "l2_error": _quartiles(l2),
        }
        ratios = np.array([r.objective_ratio for r in members if r.objective_ratio is not None])
        if ratios.size:
            entry["objective_ratio"] = _quartiles(ratios)
        out.append(entry)
    return out


def rows_to_csv_bytes(rows: list[MetricRow]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_values())
    return buf.getvalue().encode("utf-8")


def write_csv(rows: list[MetricRow], path) -> None:
    with open(path, "wb") as fh:
        fh.write(rows_to_csv_bytes(rows))


def summary_json(rows: list[MetricRow]) -> str:
    """Aggregated groups as JSON lines (one object per group)."""
    return "\n".join(json.dumps(entry, sort_keys=True) for entry in aggregate(rows))
