"""Solvers for the subsampled weighted regression problems.

Both solvers minimize the same strictly convex objective on the efficiency
hyperplane when the sample has full rank; they differ in route.  The
projected solver centers the design to remove the constraint and works on
the n x n normal equations; the multiplier solver keeps the raw binary
design and eliminates the constraint with a Lagrange multiplier, which is
how the classical weighted-regression formulation is usually solved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError
from .exact import ShapleyVector
from .masks import as_mask_matrix

__all__ = ["SampledSystem", "solve_projected", "solve_lagrange"]

# Residual slack (relative to the data scale) above which a normal-equation
# solve is treated as numerically singular.
_RESIDUAL_RTOL = 1e-8


@dataclass
class SampledSystem:
    """A weighted subsample of the regression rows.

    `b` holds the shifted targets v(z) - v(empty) - |z| (v1 - v0) / n per
    row; weights carry both the kernel weight and the sampling correction.
    """

    n: int
    masks: np.ndarray          # (k, n) uint8, 0 < popcount < n per row
    weights: np.ndarray        # (k,) positive finite
    b: np.ndarray              # (k,)
    v1_minus_v0: float
    sizes: np.ndarray = field(init=False)

    def __post_init__(self):
        self.masks = as_mask_matrix(self.masks, self.n)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        k = self.masks.shape[0]
        if k == 0:
            raise ValueError("sampled system needs at least one row")
        if self.weights.shape != (k,) or self.b.shape != (k,):
            raise ValueError("weights and targets must match the row count")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights <= 0):
            raise ValueError("regression weights must be positive and finite")
        self.sizes = self.masks.sum(axis=1).astype(np.int64)
        if np.any((self.sizes == 0) | (self.sizes == self.n)):
            raise ValueError("rows must be proper nonempty subsets")

    @property
    def row_count(self) -> int:
        return self.masks.shape[0]


def _solve_with_residual_check(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Dense solve that flags near-singular systems LAPACK lets through."""
    x = np.linalg.solve(M, rhs)
    slack = _RESIDUAL_RTOL * (np.linalg.norm(rhs) + np.linalg.norm(M) * np.linalg.norm(x))
    if not np.all(np.isfinite(x)) or np.linalg.norm(M @ x - rhs) > slack:
        raise np.linalg.LinAlgError("solution failed the residual check")
    return x


def solve_projected(system: SampledSystem) -> tuple[ShapleyVector, dict]:
    """Centered weighted least squares, then shift back onto the constraint.

    The Gram matrix G of the centered rows is singular along the all-ones
    direction by construction, so the solve runs on G + 11'; because the
    right side is orthogonal to the all-ones vector, the solution lies in
    the zero-sum hyperplane whenever G has maximal rank.  Rank-deficient
    samples fall back to a min-norm least-squares solve.
    """
    n = system.n
    delta = system.v1_minus_v0
    centered = system.masks.astype(np.float64) - (system.sizes / n)[:, None]
    w = system.weights
    G = (centered * w[:, None]).T @ centered
    r = centered.T @ (w * system.b)
    M = G + np.ones((n, n))
    diagnostics: dict = {"method": "normal", "cond": float(np.linalg.cond(M))}
    try:
        x = _solve_with_residual_check(M, r)
    except np.linalg.LinAlgError:
        sqrt_w = np.sqrt(w)
        x, _, rank, _ = np.linalg.lstsq(sqrt_w[:, None] * centered, sqrt_w * system.b, rcond=None)
        diagnostics = {"method": "lstsq", "rank": int(rank), "cond": float(np.linalg.cond(M))}
        if not np.all(np.isfinite(x)):
            raise SolverError("rank-deficient sample: fallback solve failed", diagnostics)
    x = x - x.mean()  # keep the zero-sum component exact
    phi = ShapleyVector(x + delta / n, delta)
    return phi, diagnostics


def solve_lagrange(system: SampledSystem) -> tuple[ShapleyVector, dict]:
    """Constrained weighted least squares via a Lagrange multiplier.

    Solves for the stationary point of ||W^(1/2)(Z x - y)||^2 with the
    sum constraint eliminated through the multiplier; requires the raw
    weighted Gram matrix to be invertible.
    """
    n = system.n
    delta = system.v1_minus_v0
    zf = system.masks.astype(np.float64)
    w = system.weights
    # restore the unshifted targets y = v(z) - v(empty)
    y = system.b + system.sizes * (delta / n)
    G = (zf * w[:, None]).T @ zf
    r = zf.T @ (w * y)
    ones = np.ones(n)
    diagnostics = {"method": "lagrange", "cond": float(np.linalg.cond(G))}
    try:
        u = _solve_with_residual_check(G, r)
        t = _solve_with_residual_check(G, ones)
    except np.linalg.LinAlgError as exc:
        raise SolverError(
            "sampled Gram matrix is singular; add rows or use the projected solver",
            diagnostics,
        ) from exc
    half_lambda = (ones @ u - delta) / (ones @ t)
    phi = ShapleyVector(u - half_lambda * t, delta)
    return phi, diagnostics
