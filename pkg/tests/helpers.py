"""Shared independent oracles for the test suite.

These deliberately avoid the library's own computation paths so they can
serve as cross-checks.
"""

import itertools
import math

import numpy as np


def permutation_shapley(oracle, n: int) -> np.ndarray:
    """Average marginal contribution over all n! orderings (n <= 8)."""
    phi = np.zeros(n)
    for order in itertools.permutations(range(n)):
        z = np.zeros(n, dtype=np.uint8)
        prev = oracle.eval_one(z)
        for i in order:
            z = z.copy()
            z[i] = 1
            cur = oracle.eval_one(z)
            phi[i] += cur - prev
            prev = cur
    return phi / math.factorial(n)


def summation_shapley(oracle, n: int) -> np.ndarray:
    """Direct evaluation of the size-weighted marginal sums (n <= 12).

    Loops over subsets as Python sets; independent of the library's packed
    enumeration and vectorized accumulation.
    """
    phi = np.zeros(n)
    for i in range(n):
        others = [j for j in range(n) if j != i]
        for r in range(n):
            for combo in itertools.combinations(others, r):
                z = np.zeros(n, dtype=np.uint8)
                z[list(combo)] = 1
                zi = z.copy()
                zi[i] = 1
                phi[i] += (oracle.eval_one(zi) - oracle.eval_one(z)) / math.comb(n - 1, r)
    return phi / n


def random_constraint_pair(n: int, total: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Two random vectors whose entries each sum to `total`."""
    out = []
    for _ in range(2):
        v = rng.standard_normal(n)
        v += (total - v.sum()) / n
        out.append(v)
    return out[0], out[1]
