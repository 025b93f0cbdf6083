#!/usr/bin/env python3
"""Compare the JIT and pure-numpy scan backends on representative workloads.

Usage: python benchmarks/bench_backends.py [--horizon N] [--repeat R]

Reports per-scan wall time for each backend on the same inputs and checks
that both produce identical minima.  The numba path pays a one-time
compilation cost on first use; the table separates warm-up from steady
state.
"""

from __future__ import annotations

import argparse
import time

from multcong.engine import EngineConfig, scan_valuation
from multcong.functions import phi, sigma

WORKLOADS = [
    ("divisor count, p=2, 12n+3", sigma(0), 2, 12, 3),
    ("divisor count, p=2, 399n+37", sigma(0), 2, 399, 37),
    ("sigma_1, p=2, 8n+7", sigma(1), 2, 8, 7),
    ("sigma_11, p=2, 4n+3", sigma(11), 2, 4, 3),
    ("sigma_3, p=7, 7n+3", sigma(3), 7, 7, 3),
    ("totient, p=3, 21n+14", phi(), 3, 21, 14),
]


def run(backend: str, horizon: int, repeat: int):
    cfg = EngineConfig(horizon=horizon, backend=backend)
    rows = []
    for label, fn, p, A, B in WORKLOADS:
        # first call may compile / build tables
        first = time.perf_counter()
        result = scan_valuation(fn, p, A, B, horizon, stop_below=0, config=cfg)
        first = time.perf_counter() - first
        t0 = time.perf_counter()
        for _ in range(repeat):
            scan_valuation(fn, p, A, B, horizon, stop_below=0, config=cfg)
        steady = (time.perf_counter() - t0) / repeat
        rows.append((label, first, steady, result.value.to_json(), result.witness))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--horizon", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    results = {}
    for backend in ("numba", "numpy"):
        try:
            results[backend] = run(backend, args.horizon, args.repeat)
        except ImportError as exc:
            print(f"{backend}: unavailable ({exc})")

    print(f"\nfull scans at horizon {args.horizon} (stop_below=0, no early exit)")
    print(f"{'workload':34} {'numba first':>12} {'numba':>10} {'numpy':>10} {'ratio':>7}  min@witness")
    for i, (label, *_rest) in enumerate(WORKLOADS):
        nb = results.get("numba")
        np_ = results.get("numpy")
        if nb and np_:
            assert nb[i][3] == np_[i][3] and nb[i][4] == np_[i][4], \
                f"backend mismatch on {label}"
            ratio = np_[i][2] / nb[i][2]
            print(f"{label:34} {nb[i][1]*1e3:10.1f}ms {nb[i][2]*1e3:8.1f}ms "
                  f"{np_[i][2]*1e3:8.1f}ms {ratio:6.1f}x  "
                  f"{nb[i][3]}@n={nb[i][4]}")


if __name__ == "__main__":
    main()
