"""Self-check suite for the closed-form identities the solvers rely on.

Each check reports its worst deviation across a range of player counts so
a corrupted weight function, a broken system builder, or a bad solver is
caught immediately.  The weight function is injectable as a negative
control hook.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import build_full_system, exact_constrained_regression, exact_shapley
from .games import additive_game, glove_game, interaction_game, voting_game

__all__ = ["CheckResult", "numerical_leverages", "run_identity_checks", "format_report"]


@dataclass
class CheckResult:
    name: str
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def numerical_leverages(A: np.ndarray) -> np.ndarray:
    """Row leverage scores from a thin SVD with a standard rank cutoff.

    Squared row norms of the left singular vectors spanning the numerical
    range; a naive Gram pseudo-inverse can invert a numerically-zero
    eigenvalue and is avoided on purpose.
    """
    U, S, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(S > S[0] * max(A.shape) * np.finfo(A.dtype).eps))
    return np.sum(U[:, :rank] ** 2, axis=1)


def _fixtures(n: int, games_per_n: int):
    yield interaction_game(n, seed=0)
    if games_per_n > 1:
        yield interaction_game(n, seed=1)
    rng = np.random.default_rng(n)
    yield additive_game(rng.standard_normal(n))
    if n == 3:
        yield glove_game()
        yield voting_game([1.0, 1.0, 1.0], quota=2.0)


def run_identity_checks(
    ns=range(2, 11), *, weight_fn=None, games_per_n: int = 2
) -> list[CheckResult]:
    """Run the identity suite over player counts `ns`.

    `weight_fn(n, s)` overrides the kernel weight used to build the
    explicit systems; passing a wrong function must break the
    summation-vs-regression check (negative control).
    """
    ns = list(ns)
    dev_equivalence = 0.0
    dev_gram = 0.0
    dev_leverage = 0.0
    dev_isometry = 0.0
    for n in ns:
        P = np.eye(n) - np.ones((n, n)) / n
        for oracle in _fixtures(n, games_per_n):
            brute = exact_shapley(oracle, n)
            try:
                regression = exact_constrained_regression(
                    build_full_system(oracle, n, weight_fn=weight_fn)
                )
                gap = float(np.max(np.abs(brute.phi - regression.phi)))
            except Exception:  # a broken system counts as a failed equivalence
                gap = math.inf
            dev_equivalence = max(dev_equivalence, gap)

        # the design side (Z, A) depends only on n and the weight function
        system = build_full_system(additive_game(np.ones(n)), n, weight_fn=weight_fn)
        dev_gram = max(dev_gram, float(np.linalg.norm(system.A.T @ system.A - P / n, "fro")))

        lev = numerical_leverages(system.A)
        closed = 1.0 / np.array([math.comb(n, int(s)) for s in system.sizes])
        dev_leverage = max(dev_leverage, float(np.max(np.abs(lev - closed))))

        rng = np.random.default_rng(1000 + n)
        for _ in range(5):
            d = rng.standard_normal(n)
            d -= d.mean()  # difference of two constraint-satisfying vectors
            lhs = n * float(np.sum((system.A @ d) ** 2))
            rhs = float(d @ d)
            dev_isometry = max(dev_isometry, abs(lhs - rhs) / max(rhs, 1e-300))

    return [
        CheckResult("summation-vs-regression", dev_equivalence, 1e-8),
        CheckResult("gram-identity", dev_gram, 1e-10),
        CheckResult("closed-form-leverage", dev_leverage, 1e-10),
        CheckResult("norm-isometry", dev_isometry, 1e-10),
    ]


def format_report(results: list[CheckResult]) -> str:
    lines = [f"{'check':<28}{'max deviation':>16}{'tolerance':>12}  status"]
    for r in results:
        status = "ok" if r.passed else "FAIL"
        lines.append(f"{r.name:<28}{r.max_deviation:>16.3e}{r.tolerance:>12.0e}  {status}")
    return "\n".join(lines)
