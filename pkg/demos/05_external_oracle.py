"""Evaluating a value function that lives in another process.

The estimator only ever sees masks and floats, so any model in any
runtime can serve values over the line protocol: one JSON object per
line on stdin/stdout.

    -> {"op": "init", "n": 6}                 <- {"ok": true}
    -> {"op": "eval", "masks": ["010110"]}    <- {"values": [1.9]}
    -> {"op": "shutdown"}                     (exit 0)

This demo is its own server: run with --serve and it answers the
protocol for a fixed quadratic model instead of estimating.
"""

import json
import sys

N = 6


def model(bits):
    # fixed quadratic: linear part (i+1)/2 per member plus a pairwise bonus
    total = sum((i + 1) / 2 for i, b in enumerate(bits) if b == 1)
    total += 0.25 * sum(bits[i] * bits[j] for i in range(N) for j in range(i + 1, N))
    return total


def serve() -> int:
    for line in sys.stdin:
        msg = json.loads(line)
        if msg["op"] == "init":
            print(json.dumps({"ok": msg["n"] == N}), flush=True)
        elif msg["op"] == "eval":
            values = [model([int(ch) for ch in mask]) for mask in msg["masks"]]
            print(json.dumps({"values": values}), flush=True)
        elif msg["op"] == "shutdown":
            return 0
    return 0


if __name__ == "__main__" and "--serve" in sys.argv:
    sys.exit(serve())

import numpy as np

from levshap import EstimatorConfig, estimate, exact_shapley, external_oracle, memoized

command = [sys.executable, __file__, "--serve"]
with external_oracle(command, n=N) as oracle:
    estimated = estimate(oracle, EstimatorConfig("leverage", m=2**N, seed=0))
with external_oracle(command, n=N) as oracle:
    truth = exact_shapley(memoized(oracle))

print("estimate over the wire:", np.round(estimated.phi, 6))
print("exact over the wire:   ", np.round(truth.phi, 6))
print("max abs gap:           ", float(np.max(np.abs(estimated.phi - truth.phi))))
