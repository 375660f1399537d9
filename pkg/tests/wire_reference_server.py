"""Reference additive value-function server for protocol tests.

Speaks the line protocol: one JSON object per line on stdin/stdout.
v(S) = offset + sum of (i+1)/10 over members i (0-based), so values are
reproducible in-process for cross-checking.

Usage: python3 wire_reference_server.py [--offset X] [--fail-on-eval N]
"""

import argparse
import json
import sys


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--offset", type=float, default=0.25)
    ap.add_argument("--fail-on-eval", type=int, default=-1,
                    help="reply with an error object on the k-th eval request")
    args = ap.parse_args()

    n = None
    evals_seen = 0
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
            op = msg["op"]
        except (json.JSONDecodeError, KeyError, TypeError):
            print(json.dumps({"error": "malformed request"}), flush=True)
            continue
        if op == "init":
            n = int(msg["n"])
            print(json.dumps({"ok": True}), flush=True)
        elif op == "eval":
            if n is None:
                print(json.dumps({"error": "eval before init"}), flush=True)
                continue
            if evals_seen == args.fail_on_eval:
                print(json.dumps({"error": "injected failure"}), flush=True)
                evals_seen += 1
                continue
            evals_seen += 1
            values = []
            bad = False
            for wire in msg["masks"]:
                if len(wire) != n or any(c not in "01" for c in wire):
                    bad = True
                    break
                values.append(args.offset + sum((i + 1) / 10 for i, c in enumerate(wire) if c == "1"))
            if bad:
                print(json.dumps({"error": f"bad mask in batch"}), flush=True)
            else:
                print(json.dumps({"values": values}), flush=True)
        elif op == "shutdown":
            return 0
        else:
            print(json.dumps({"error": f"unknown op {op!r}"}), flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
