"""Value-function oracles: built-in games, wrappers, and an external client.

Every oracle evaluates batches of subset masks and counts single-set
evaluations.  Built-in oracles are deterministic; randomness enters only
through the explicit noise wrapper.
"""

from __future__ import annotations

import json
import math
import shlex
import subprocess
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import OracleProtocolError
from .masks import as_mask_matrix, mask_key, mask_to_wire

__all__ = [
    "ValueOracle",
    "FunctionOracle",
    "TableOracle",
    "NoiseConfig",
    "additive_game",
    "voting_game",
    "glove_game",
    "interaction_game",
    "with_noise",
    "memoized",
    "external_oracle",
    "ExternalOracle",
]


class ValueOracle:
    """Batch-evaluable black-box set function v with evaluation counting."""

    def __init__(self, n: int, label: str):
        if n < 2:
            raise ValueError(f"player count must be >= 2, got {n}")
        self.n = n
        self.label = label
        self._eval_count = 0

    @property
    def eval_count(self) -> int:
        """Total single-set evaluations so far (monotone)."""
        return self._eval_count

    def eval_batch(self, masks) -> np.ndarray:
        zs = as_mask_matrix(masks, self.n)
        values = np.asarray(self._evaluate(zs), dtype=np.float64)
        if values.shape != (zs.shape[0],):
            raise ValueError(f"oracle returned shape {values.shape} for {zs.shape[0]} masks")
        self._eval_count += zs.shape[0]
        return values

    def eval_one(self, mask) -> float:
        return float(self.eval_batch(np.asarray(mask, dtype=np.uint8).reshape(1, -1))[0])

    def _evaluate(self, zs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label!r} n={self.n}>"


class FunctionOracle(ValueOracle):
    """Oracle backed by a vectorized callable (k, n) uint8 -> (k,) floats."""

    def __init__(self, n: int, fn: Callable[[np.ndarray], np.ndarray], label: str):
        super().__init__(n, label)
        self._fn = fn

    def _evaluate(self, zs: np.ndarray) -> np.ndarray:
        return self._fn(zs)


class TableOracle(ValueOracle):
    """Oracle backed by a full value table indexed by packed mask bits.

    Only valid for n <= 25 or so; the table has 2**n entries.
    """

    def __init__(self, n: int, values: np.ndarray, label: str):
        super().__init__(n, label)
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (2**n,):
            raise ValueError(f"table must have 2**{n} entries, got {values.shape}")
        self._values = values

    def _evaluate(self, zs: np.ndarray) -> np.ndarray:
        codes = zs.astype(np.int64) @ (np.int64(1) << np.arange(self.n, dtype=np.int64))
        return self._values[codes]


def additive_game(coefficients, offset: float = 0.0) -> ValueOracle:
    """v(S) = offset + sum of per-player coefficients over S."""
    a = np.asarray(coefficients, dtype=np.float64)
    if a.ndim != 1 or a.size < 2:
        raise ValueError("need a 1-D coefficient vector with at least two players")
    n = a.size

    def fn(zs: np.ndarray) -> np.ndarray:
        return offset + zs.astype(np.float64) @ a

    return FunctionOracle(n, fn, f"additive(n={n})")


def voting_game(weights, quota: float) -> ValueOracle:
    """v(S) = 1 if the total weight of S reaches the quota, else 0."""
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError("voting weights must be nonnegative")
    if quota <= 0:
        raise ValueError("quota must be positive")
    n = w.size

    def fn(zs: np.ndarray) -> np.ndarray:
        return (zs.astype(np.float64) @ w >= quota).astype(np.float64)

    return FunctionOracle(n, fn, f"voting(n={n},quota={quota:g})")


def glove_game() -> ValueOracle:
    """Three-player market fixture: v(S) = 1 iff 3 in S and S meets {1, 2}.

    Exact attribution is (1/6, 1/6, 2/3).
    """

    def fn(zs: np.ndarray) -> np.ndarray:
        return ((zs[:, 2] == 1) & ((zs[:, 0] == 1) | (zs[:, 1] == 1))).astype(np.float64)

    return FunctionOracle(3, fn, "glove")


def interaction_game(n: int, seed: int) -> ValueOracle:
    """Random interaction game with seeded standard normal a, B.

    v(S) = a.x + x'Bx + sum_j ((B_j / sqrt(n)) . x)^3 / n over rows B_j.

    The quadratic term keeps the regression residual strictly positive.
    The cubic term matters for benchmarking: the complement-pair difference
    v(z) - v(complement z) of any purely quadratic game is affine in z, so
    paired samplers would recover the exact attribution from any full-rank
    sample and the estimators could not be compared on it.  Odd-order
    interactions leave paired sampling with genuine error.  B = 0 still
    degenerates to the additive game on a.
    """
    if n < 2:
        raise ValueError(f"player count must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(n)
    b = rng.standard_normal((n, n))
    b_scaled = b / math.sqrt(n)

    def fn(zs: np.ndarray) -> np.ndarray:
        x = zs.astype(np.float64)
        quad = np.einsum("ki,ij,kj->k", x, b, x)
        cubic = ((x @ b_scaled.T) ** 3).sum(axis=1) / n
        return x @ a + quad + cubic

    return FunctionOracle(n, fn, f"interaction(n={n},seed={seed})")


@dataclass(frozen=True)
class NoiseConfig:
    """Additive Gaussian observation noise: each evaluation returns v(S) + N(0, sigma^2)."""

    sigma: float
    seed: int | None = None

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"noise sigma must be >= 0, got {self.sigma}")


class _NoisyOracle(ValueOracle):
    def __init__(self, inner: ValueOracle, config: NoiseConfig):
        super().__init__(inner.n, f"{inner.label}+noise(sigma={config.sigma:g})")
        self._inner = inner
        self._sigma = config.sigma
        self._rng = np.random.default_rng(config.seed)

    @property
    def eval_count(self) -> int:
        return self._inner.eval_count

    def eval_batch(self, masks) -> np.ndarray:
        values = self._inner.eval_batch(masks)
        if self._sigma == 0.0:
            return values
        # Noise is drawn per evaluation event, so re-evaluating the same
        # mask returns a fresh observation.
        return values + self._rng.normal(0.0, self._sigma, size=values.shape)


def with_noise(oracle: ValueOracle, config: NoiseConfig) -> ValueOracle:
    """Wrap an oracle with per-event Gaussian noise; sigma = 0 is the identity."""
    return _NoisyOracle(oracle, config)


class _MemoizedOracle(ValueOracle):
    def __init__(self, inner: ValueOracle):
        super().__init__(inner.n, f"{inner.label}+memo")
        self._inner = inner
        self._cache: dict[bytes, float] = {}
        self._lock = threading.Lock()

    @property
    def eval_count(self) -> int:
        # only cache misses reach the wrapped oracle
        return self._inner.eval_count

    def eval_batch(self, masks) -> np.ndarray:
        zs = as_mask_matrix(masks, self.n)
        keys = [mask_key(z) for z in zs]
        with self._lock:
            missing: dict[bytes, int] = {}
            for idx, key in enumerate(keys):
                if key not in self._cache and key not in missing:
                    missing[key] = idx
            if missing:
                fresh = self._inner.eval_batch(zs[list(missing.values())])
                for key, value in zip(missing, fresh):
                    self._cache[key] = float(value)
            return np.array([self._cache[key] for key in keys])


def memoized(oracle: ValueOracle) -> ValueOracle:
    """Cache repeated masks; requires the wrapped oracle to be deterministic."""
    return _MemoizedOracle(oracle)


class ExternalOracle(ValueOracle):
    """Client for a value-function process speaking the stdio line protocol.

    One JSON object per line, UTF-8:

        -> {"op": "init", "n": 8}              <- {"ok": true}
        -> {"op": "eval", "masks": ["0110..."]} <- {"values": [0.25, ...]}
        -> {"op": "shutdown"}                   (process exits 0)

    Mask strings are exactly n characters of '0'/'1'; character j is
    player j+1.  Any malformed reply raises :class:`OracleProtocolError`
    with the offending batch attached.
    """

    def __init__(self, command, n: int, label: str | None = None):
        super().__init__(n, label or "external")
        args = shlex.split(command) if isinstance(command, str) else list(command)
        self._proc = subprocess.Popen(
            args,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        reply = self._roundtrip({"op": "init", "n": n}, batch=None)
        if reply.get("ok") is not True:
            raise OracleProtocolError(f"init rejected by external oracle: {reply!r}")

    def _roundtrip(self, message: dict, batch: list[str] | None) -> dict:
        if self._proc.poll() is not None:
            raise OracleProtocolError(
                f"external oracle exited with code {self._proc.returncode}", batch
            )
        try:
            self._proc.stdin.write(json.dumps(message) + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise OracleProtocolError(f"external oracle pipe failed: {exc}", batch) from exc
        if not line:
            raise OracleProtocolError("external oracle closed its output", batch)
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise OracleProtocolError(f"non-JSON reply: {line!r}", batch) from exc
        if not isinstance(reply, dict):
            raise OracleProtocolError(f"reply is not an object: {reply!r}", batch)
        if "error" in reply:
            raise OracleProtocolError(f"external oracle error: {reply['error']!r}", batch)
        return reply

    def _evaluate(self, zs: np.ndarray) -> np.ndarray:
        batch = [mask_to_wire(z) for z in zs]
        reply = self._roundtrip({"op": "eval", "masks": batch}, batch)
        values = reply.get("values")
        if not isinstance(values, list) or len(values) != len(batch):
            raise OracleProtocolError(f"expected {len(batch)} values, got {values!r}", batch)
        out = np.asarray(values, dtype=np.float64)
        if not np.all(np.isfinite(out)):
            raise OracleProtocolError("external oracle returned non-finite values", batch)
        return out

    def close(self) -> None:
        """Send shutdown and wait for a clean exit."""
        if self._proc.poll() is None:
            try:
                self._proc.stdin.write(json.dumps({"op": "shutdown"}) + "\n")
                self._proc.stdin.flush()
                self._proc.stdin.close()
            except (BrokenPipeError, OSError):
                pass
            self._proc.wait(timeout=10)
        if self._proc.returncode != 0:
            raise OracleProtocolError(
                f"external oracle exited with code {self._proc.returncode}"
            )

    def __enter__(self) -> "ExternalOracle":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        try:
            self.close()
        except OracleProtocolError:
            if exc_type is None:
                raise


def external_oracle(command, n: int, label: str | None = None) -> ExternalOracle:
    """Start an external value-function process and wire it up as an oracle."""
    return ExternalOracle(command, n, label)
