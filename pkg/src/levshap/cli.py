"""Command-line entry point.

Subcommands: estimate, exact, sweep-size, sweep-noise, sweep-gamma,
ablate, verify.  All numeric flags are validated before any oracle is
constructed or evaluated.  Exit codes: 0 success, 1 estimation/runtime
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench
from .estimators import FAMILIES, EstimatorConfig, ablation_grid, estimate
from .exact import exact_shapley
from .gamespec import parse_game_spec
from .games import memoized
from .verify import format_report, run_identity_checks


class UsageError(ValueError):
    """Flag-level problem; reported through argparse with exit code 2."""


def _parse_m_grid(text: str, n: int) -> tuple[int, ...]:
    grid = []
    for token in text.split(","):
        token = token.strip().lower()
        if not token:
            continue
        try:
            value = int(token[:-1]) * n if token.endswith("n") else int(token)
        except ValueError:
            raise UsageError(f"bad m-grid entry {token!r} (use e.g. '5n' or '64')")
        if value < n:
            raise UsageError(f"m-grid entry {token!r} is below the player count {n}")
        grid.append(value)
    if not grid:
        raise UsageError("m-grid is empty")
    return tuple(grid)


def _parse_float_grid(text: str, label: str) -> tuple[float, ...]:
    try:
        grid = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise UsageError(f"bad {label} entry in {text!r}")
    if not grid:
        raise UsageError(f"{label} is empty")
    return grid


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected KEY=VALUE, got {line!r}")
                key, _, value = line.partition("=")
                values[key.strip().replace("_", "-")] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    return values


def _apply_config(args: argparse.Namespace, mapping: dict[str, str]) -> None:
    """Fill unset flags from a config file; explicit flags win."""
    for key, value in mapping.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def _estimator_config(args: argparse.Namespace, family: str) -> EstimatorConfig:
    paired = None if args.paired is None else (args.paired == "on")
    return EstimatorConfig(
        family,
        m=args.m,
        paired=paired,
        replacement=args.replacement,
        deterministic_counts=bool(args.deterministic_counts),
        seed=args.seed,
        solver=args.solver,
    )


def _emit_diagnostics(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=sys.stderr)


def _cmd_estimate(args) -> int:
    if args.game is None:
        raise UsageError("--game is required")
    if args.m is None:
        raise UsageError("--m is required")
    if args.estimator not in FAMILIES:
        raise UsageError(f"--estimator must be one of {FAMILIES}")
    try:
        game = parse_game_spec(args.game, args.n)
        n = game.player_count()
        config = _estimator_config(args, args.estimator)
    except ValueError as exc:
        raise UsageError(str(exc))
    if config.m < n:
        raise UsageError(f"--m {config.m} is below the player count {n}")

    oracle = game.build()
    try:
        result = estimate(oracle, config, n)
    finally:
        close = getattr(oracle, "close", None)
        if close:
            close()
    print(json.dumps(
        {"phi": result.phi.tolist(), "v1_minus_v0": result.phi_hat.v1_minus_v0},
        sort_keys=True,
    ))
    _emit_diagnostics(
        {
            "estimator": args.estimator,
            "c": result.c,
            "evals_used": result.evals_used,
            "size_counts": {str(k): v for k, v in sorted(result.size_counts.items())},
            "solver": result.solver_diagnostics,
            "seed": result.seed,
        },
        args.diagnostics,
    )
    return 0


def _cmd_exact(args) -> int:
    if args.game is None:
        raise UsageError("--game is required")
    try:
        game = parse_game_spec(args.game, args.n)
        n = game.player_count()
    except ValueError as exc:
        raise UsageError(str(exc))
    oracle = game.build()
    try:
        result = exact_shapley(memoized(oracle), n)
    finally:
        close = getattr(oracle, "close", None)
        if close:
            close()
    print(json.dumps(
        {"phi": result.phi.tolist(), "v1_minus_v0": result.v1_minus_v0}, sort_keys=True
    ))
    return 0


def _experiment_spec(args, kind: str) -> bench.ExperimentSpec:
    if args.config:
        _apply_config(args, _load_config_file(args.config))
    if args.out is None:
        raise UsageError("--out is required for sweeps")
    game = args.game
    if game is None:
        game = "gamma:seed=0" if kind == "gamma" else "interaction:seed=0"
    try:
        n = int(args.n) if args.n is not None else None
        probe = parse_game_spec(game, n)
        players = probe.player_count()
    except ValueError as exc:
        raise UsageError(str(exc))
    estimators = tuple(
        tok.strip() for tok in (args.estimator or ",".join(bench.ExperimentSpec.estimators)).split(",") if tok.strip()
    )
    m_grid = _parse_m_grid(args.m_grid, players) if args.m_grid else ()
    if kind in ("noise", "gamma") and not m_grid:
        m_grid = (10 * players,)
    sigma_grid = (
        _parse_float_grid(args.sigma_grid, "sigma-grid")
        if args.sigma_grid
        else bench.DEFAULT_SIGMA_GRID
    )
    gamma_grid = (
        _parse_float_grid(args.gamma_grid, "gamma-grid")
        if args.gamma_grid
        else bench.DEFAULT_GAMMA_GRID
    )
    try:
        return bench.ExperimentSpec(
            game=game,
            n=n,
            estimators=estimators,
            m_grid=m_grid,
            sigma_grid=sigma_grid,
            gamma_grid=gamma_grid,
            seeds=int(args.seeds) if args.seeds is not None else 10,
            jobs=int(args.jobs) if args.jobs is not None else 1,
            record_timing=bool(args.record_timing),
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def _run_sweep(args, kind: str) -> int:
    spec = _experiment_spec(args, kind)
    runner = {
        "size": bench.run_size_sweep,
        "noise": bench.run_noise_sweep,
        "gamma": bench.run_gamma_sweep,
    }[kind]
    rows = runner(spec)
    bench.write_csv(rows, args.out)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(bench.summary_json(rows) + "\n")
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def _cmd_ablate(args) -> int:
    if args.game is None:
        raise UsageError("--game is required")
    if args.m is None:
        raise UsageError("--m is required")
    if args.out is None:
        raise UsageError("--out is required")
    try:
        seeds = int(args.seeds) if args.seeds is not None else 10
        game = parse_game_spec(args.game, args.n)
        n = game.player_count()
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.m < n:
        raise UsageError(f"--m {args.m} is below the player count {n}")

    truth = exact_shapley(memoized(game.build()), n)
    rows = []
    grid = ablation_grid(game.build(), n, args.m, seeds=range(seeds))
    for cell in grid:
        result = cell["result"]
        label = "{}/{}/{}-replacement".format(
            cell["distribution"], "paired" if cell["paired"] else "unpaired", cell["replacement"]
        )
        diff = result.phi - truth.phi
        rows.append(
            bench.MetricRow(
                game=game.display, n=n, estimator=label, m=args.m, sigma=0.0,
                gamma=None, seed=cell["seed"], l2_error=float(diff @ diff),
                objective_ratio=None, evals_used=result.evals_used, wall_ms=None,
            )
        )
    bench.write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def _cmd_verify(args) -> int:
    ns = range(2, 11)
    results = run_identity_checks(ns)
    print(format_report(results))
    return 0 if all(r.passed for r in results) else 1


def _add_common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--game", help="game spec, e.g. additive:1,2,3 or external:'cmd'")
    sp.add_argument("--n", type=int, help="player count (games without an implied size)")
    sp.add_argument("--seed", type=int, default=0, help="estimator seed")


def _add_estimator_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--estimator", default="leverage", help=f"one of {FAMILIES}")
    sp.add_argument("--m", type=int, help="evaluation budget (>= n)")
    sp.add_argument("--paired", choices=("on", "off"))
    sp.add_argument("--replacement", choices=("with", "without"))
    sp.add_argument("--deterministic-counts", action="store_true")
    sp.add_argument("--solver", choices=("projected", "lagrange"))
    sp.add_argument("--diagnostics", help="write run diagnostics JSON to this path")


def _add_sweep_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--estimator", help="comma list of estimator families")
    sp.add_argument("--m-grid", help="comma list; entries may end in 'n' (e.g. 5n,10n)")
    sp.add_argument("--sigma-grid", help="comma list of noise levels")
    sp.add_argument("--gamma-grid", help="comma list of ratio targets")
    sp.add_argument("--seeds", type=int, help="number of seeds (default 10)")
    sp.add_argument("--jobs", type=int, help="worker threads (default 1)")
    sp.add_argument("--out", help="CSV output path")
    sp.add_argument("--summary", help="also write aggregated JSON here")
    sp.add_argument("--config", help="KEY=VALUE config file; explicit flags win")
    sp.add_argument("--record-timing", action="store_true",
                    help="fill wall_ms (breaks byte-reproducibility)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="levshap",
        description="Shapley value estimation via leverage-score-sampled regression",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("estimate", help="run one estimator on one game")
    _add_common_flags(sp)
    _add_estimator_flags(sp)
    sp.set_defaults(handler=_cmd_estimate)

    sp = sub.add_parser("exact", help="brute-force exact values (n <= 22)")
    _add_common_flags(sp)
    sp.set_defaults(handler=_cmd_exact)

    for kind, blurb in (
        ("size", "error vs budget"),
        ("noise", "error vs observation noise"),
        ("gamma", "error vs residual-to-signal ratio"),
    ):
        sp = sub.add_parser(f"sweep-{kind}", help=f"benchmark sweep: {blurb}")
        _add_common_flags(sp)
        _add_sweep_flags(sp)
        sp.set_defaults(handler=lambda a, k=kind: _run_sweep(a, k))

    sp = sub.add_parser("ablate", help="distribution/paired/replacement grid")
    _add_common_flags(sp)
    sp.add_argument("--m", type=int, help="evaluation budget (>= n)")
    sp.add_argument("--seeds", type=int, help="number of seeds (default 10)")
    sp.add_argument("--out", help="CSV output path")
    sp.set_defaults(handler=_cmd_ablate)

    sp = sub.add_parser("verify", help="run the identity self-checks (n = 2..10)")
    sp.set_defaults(handler=_cmd_verify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        ap.exit(2, f"{ap.prog}: error: {exc}\n")
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"{ap.prog}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
