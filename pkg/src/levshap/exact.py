"""Ground-truth computations on explicitly enumerated systems.

Everything here is exponential in the player count and guarded by explicit
size limits: brute-force attribution values, the full weighted regression
system, its exact constrained solution (by two independent routes), and
construction of games with a prescribed residual-to-signal ratio.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import shapley_weight
from .errors import GammaUndefinedError, SolverError
from .games import TableOracle, ValueOracle, memoized
from .masks import masks_from_ints

__all__ = [
    "ShapleyVector",
    "FullSystem",
    "row_masks",
    "exact_shapley",
    "build_full_system",
    "exact_constrained_regression",
    "gamma_of",
    "make_gamma_game",
]

MAX_BRUTE_FORCE_PLAYERS = 22
MAX_EXPLICIT_SYSTEM_PLAYERS = 15
_EVAL_CHUNK = 1 << 14


@dataclass(frozen=True)
class ShapleyVector:
    """Attribution values plus the efficiency total they must sum to."""

    phi: np.ndarray
    v1_minus_v0: float

    def __post_init__(self):
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=np.float64))

    @property
    def n(self) -> int:
        return self.phi.size

    def efficiency_gap(self) -> float:
        """|sum(phi) - (v(full) - v(empty))|, ideally ~0."""
        return abs(float(self.phi.sum()) - self.v1_minus_v0)


@dataclass(frozen=True)
class FullSystem:
    """The complete weighted regression system for a game with n <= 15.

    Rows are ordered by ascending set size and lexicographically within a
    size.  Z carries sqrt-weighted indicator rows, A = Z P projects off the
    all-ones direction, and b is the correspondingly shifted target.
    """

    n: int
    masks: np.ndarray   # (2^n - 2, n) uint8
    sizes: np.ndarray   # (2^n - 2,) int64 row set sizes
    Z: np.ndarray       # (2^n - 2, n)
    y: np.ndarray       # (2^n - 2,)
    A: np.ndarray       # (2^n - 2, n)
    b: np.ndarray       # (2^n - 2,)
    v0: float
    v1: float

    @property
    def v1_minus_v0(self) -> float:
        return self.v1 - self.v0

    def objective(self, phi: np.ndarray) -> float:
        """||Z phi - y||^2 for a candidate attribution vector."""
        r = self.Z @ np.asarray(phi, dtype=np.float64) - self.y
        return float(r @ r)


def row_masks(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All 2^n - 2 proper nonempty masks: sizes ascending, lexicographic within size."""
    rows = np.zeros((2**n - 2, n), dtype=np.uint8)
    sizes = np.empty(2**n - 2, dtype=np.int64)
    i = 0
    for s in range(1, n):
        for combo in itertools.combinations(range(n), s):
            rows[i, combo] = 1
            sizes[i] = s
            i += 1
    return rows, sizes


def _all_values(oracle: ValueOracle, n: int) -> np.ndarray:
    """Evaluate v on every subset once; index = packed mask bits."""
    values = np.empty(2**n)
    for start in range(0, 2**n, _EVAL_CHUNK):
        codes = np.arange(start, min(start + _EVAL_CHUNK, 2**n), dtype=np.int64)
        values[start : start + codes.size] = oracle.eval_batch(masks_from_ints(codes, n))
    return values


def exact_shapley(oracle: ValueOracle, n: int | None = None) -> ShapleyVector:
    """Brute-force attribution by the size-weighted marginal-contribution sum.

    Every subset value is evaluated exactly once (2^n evaluations), then the
    per-player sums accumulate the marginal differences directly.
    """
    n = oracle.n if n is None else n
    if n > MAX_BRUTE_FORCE_PLAYERS:
        raise ValueError(
            f"brute force needs 2**{n} = {2**n} evaluations; refusing above "
            f"n = {MAX_BRUTE_FORCE_PLAYERS}"
        )
    values = _all_values(oracle, n)
    codes = np.arange(2**n, dtype=np.int64)
    inv_choose = 1.0 / np.array([math.comb(n - 1, s) for s in range(n)])
    phi = np.empty(n)
    for i in range(n):
        without = codes[(codes >> i) & 1 == 0]
        sizes = np.bitwise_count(without).astype(np.int64)
        diffs = values[without | (1 << i)] - values[without]
        phi[i] = float(diffs @ inv_choose[sizes]) / n
    return ShapleyVector(phi, float(values[-1] - values[0]))


def build_full_system(oracle: ValueOracle, n: int | None = None, *, weight_fn=None) -> FullSystem:
    """Materialize Z, y, A, b for a game with n <= 15.

    `weight_fn(n, s)` overrides the kernel weight; used by verification
    negative controls.
    """
    n = oracle.n if n is None else n
    if n > MAX_EXPLICIT_SYSTEM_PLAYERS:
        raise ValueError(
            f"explicit system has 2**{n} - 2 rows; refusing above "
            f"n = {MAX_EXPLICIT_SYSTEM_PLAYERS}"
        )
    wfn = weight_fn or shapley_weight
    masks, sizes = row_masks(n)
    v0 = oracle.eval_one(np.zeros(n, dtype=np.uint8))
    v1 = oracle.eval_one(np.ones(n, dtype=np.uint8))
    vals = oracle.eval_batch(masks)
    sqrt_w = np.sqrt(np.array([wfn(n, s) for s in range(1, n)]))[sizes - 1]
    zf = masks.astype(np.float64)
    Z = sqrt_w[:, None] * zf
    y = sqrt_w * (vals - v0)
    delta = v1 - v0
    A = sqrt_w[:, None] * (zf - sizes[:, None] / n)
    b = y - sqrt_w * sizes * (delta / n)
    return FullSystem(n, masks, sizes, Z, y, A, b, float(v0), float(v1))


def _project_centered(u: np.ndarray) -> np.ndarray:
    return u - u.mean()


def exact_constrained_regression(system: FullSystem) -> ShapleyVector:
    """Exact constrained least-squares attribution, cross-checked two ways.

    Route 1 removes the constraint by centering (the Gram pseudo-inverse is
    n times the centering projector).  Route 2 solves the original problem
    with a Lagrange multiplier.  The routes must agree to 1e-8; their
    disagreement signals a broken system.
    """
    n = system.n
    delta = system.v1_minus_v0
    # projection route
    x = n * _project_centered(system.A.T @ system.b)
    phi_proj = x + delta / n

    # multiplier route on the raw (Z, y) system
    G = system.Z.T @ system.Z
    r = system.Z.T @ system.y
    ones = np.ones(n)
    try:
        u = np.linalg.solve(G, r)
        t = np.linalg.solve(G, ones)
    except np.linalg.LinAlgError as exc:
        raise SolverError(
            "Gram matrix of the full system is singular",
            {"cond": float(np.linalg.cond(G))},
        ) from exc
    half_lambda = (ones @ u - delta) / (ones @ t)
    phi_lagrange = u - half_lambda * t

    scale = max(1.0, float(np.max(np.abs(phi_proj))))
    gap = float(np.max(np.abs(phi_proj - phi_lagrange)))
    if gap > 1e-8 * scale:
        raise SolverError(
            "projection and multiplier routes disagree",
            {"max_abs_gap": gap, "cond": float(np.linalg.cond(G))},
        )
    return ShapleyVector(phi_proj, delta)


def gamma_of(system: FullSystem, phi: ShapleyVector) -> float:
    """Residual-to-signal ratio ||A phi - b||^2 / ||A phi||^2.

    Also cross-checks the norm identity ||A phi||^2 = (||phi||^2 -
    (v1 - v0)^2 / n) / n, which holds whenever phi is the exact minimizer.
    """
    p = np.asarray(phi.phi, dtype=np.float64)
    a_phi = system.A @ p
    signal = float(a_phi @ a_phi)
    if signal <= 1e-300:
        raise GammaUndefinedError("constant game: ||A phi|| = 0, ratio undefined")
    expected = (float(p @ p) - system.v1_minus_v0**2 / system.n) / system.n
    if abs(signal - expected) > 1e-8 * max(abs(expected), 1e-300):
        raise ValueError(
            f"norm identity violated: ||A phi||^2 = {signal!r}, expected {expected!r}; "
            "phi is not the exact minimizer of this system"
        )
    resid = a_phi - system.b
    return float(resid @ resid) / signal


def make_gamma_game(
    n: int, gamma_target: float, seed: int
) -> tuple[ValueOracle, float]:
    """Build a game whose residual-to-signal ratio equals `gamma_target`.

    The target vector is assembled as b = u + sqrt(gamma) * r from a seeded
    unit vector u inside the column span of A and a seeded unit vector r
    orthogonal to it, then the value function is backed out row by row with
    v(empty) = 0 and v(full) = 1.  Returns the (memoized) oracle and the
    ratio recomputed from the built system.
    """
    if gamma_target < 0:
        raise ValueError(f"gamma target must be >= 0, got {gamma_target}")
    if n > MAX_EXPLICIT_SYSTEM_PLAYERS:
        raise ValueError(f"needs the explicit system; n <= {MAX_EXPLICIT_SYSTEM_PLAYERS}")
    # A depends only on n, never on the game, so build it from a placeholder.
    masks, sizes = row_masks(n)
    zf = masks.astype(np.float64)
    sqrt_w = np.sqrt(np.array([shapley_weight(n, s) for s in range(1, n)]))[sizes - 1]
    A = sqrt_w[:, None] * (zf - sizes[:, None] / n)

    rng = np.random.default_rng(seed)
    span = A @ rng.standard_normal(n)
    span_norm = float(np.linalg.norm(span))
    if span_norm < 1e-12:
        raise ValueError("degenerate seed: span direction collapsed")
    u = span / span_norm

    h = rng.standard_normal(A.shape[0])
    proj = A @ (n * _project_centered(A.T @ h))
    resid_dir = h - proj
    resid_norm = float(np.linalg.norm(resid_dir))
    if gamma_target > 0 and resid_norm < 1e-9:
        raise ValueError(
            "cannot reach a positive ratio: the seeded residual direction lies "
            "in the column span"
        )
    b = u if gamma_target == 0 else u + math.sqrt(gamma_target) * (resid_dir / resid_norm)

    # back out v: b_z = sqrt(w) (v(z) - v0 - s (v1-v0)/n) with v0 = 0, v1 = 1
    v0, v1 = 0.0, 1.0
    vals = b / sqrt_w + sizes * ((v1 - v0) / n)
    table = np.empty(2**n)
    codes = masks.astype(np.int64) @ (np.int64(1) << np.arange(n, dtype=np.int64))
    table[codes] = vals
    table[0] = v0
    table[-1] = v1
    label = f"gamma(n={n},target={gamma_target:g},seed={seed})"
    oracle = memoized(TableOracle(n, table, label))

    phi = n * _project_centered(A.T @ b) + (v1 - v0) / n
    a_phi = A @ phi
    resid = a_phi - b
    achieved = float(resid @ resid) / float(a_phi @ a_phi)
    return oracle, achieved
