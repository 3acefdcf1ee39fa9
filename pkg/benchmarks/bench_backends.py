"""Compare the compiled Monte-Carlo kernels against the NumPy fallback.

Runs a few representative simulation workloads on the active backend, then
re-executes itself with ``LAYERCAST_PURE_PYTHON=1`` to time the fallback,
and checks that both backends return bit-identical counts before printing
the timing table.

    python3 benchmarks/bench_backends.py [--trials N]
"""

import argparse
import json
import os
import subprocess
import sys
import time

from layercast.galois import (
    active_backend,
    simulate_ew_recovery,
    simulate_full_rank,
    simulate_now_recovery,
)
from layercast.message import LayeredMessage

MESSAGE = LayeredMessage((5, 5, 5))


def _workloads(trials):
    yield "full-rank 8x5 GF(2)", lambda: simulate_full_rank(5, 8, 2, trials, 7)
    yield "full-rank 8x5 GF(256)", lambda: simulate_full_rank(5, 8, 256, trials, 7)
    yield "NOW recovery (5,5,5) GF(16)", lambda: simulate_now_recovery(
        MESSAGE, (8, 8, 8), 0.1, 16, trials, 7
    )
    yield "EW recovery (5,5,5) GF(2)", lambda: simulate_ew_recovery(
        MESSAGE, (8, 13, 18), 0.1, 2, trials, 7
    )
    yield "EW recovery (5,5,5) GF(256)", lambda: simulate_ew_recovery(
        MESSAGE, (8, 13, 18), 0.1, 256, trials, 7
    )


def measure(trials):
    results = {}
    for name, task in _workloads(trials):
        task()  # warm caches outside the timed region
        start = time.perf_counter()
        outcome = task()
        results[name] = {
            "seconds": time.perf_counter() - start,
            "counts": [int(c) for c in outcome.counts],
        }
    return results


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=50_000)
    parser.add_argument("--emit", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args(argv)

    mine = measure(args.trials)
    if args.emit:
        print(json.dumps(mine))
        return 0

    if active_backend() != "compiled":
        print(f"active backend: {active_backend()} (compiled kernels unavailable)")
        for name, data in mine.items():
            print(f"  {name:<30} {data['seconds']:8.3f}s")
        return 0

    env = dict(os.environ, LAYERCAST_PURE_PYTHON="1")
    raw = subprocess.run(
        [sys.executable, __file__, "--emit", "--trials", str(args.trials)],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    ).stdout
    fallback = json.loads(raw)

    print(f"{args.trials} trials per workload")
    print(f"{'workload':<30} {'compiled':>10} {'python':>10} {'speedup':>9}")
    for name, data in mine.items():
        other = fallback[name]
        if data["counts"] != other["counts"]:
            raise SystemExit(f"backends disagree on counts for {name!r}")
        ratio = other["seconds"] / data["seconds"]
        print(
            f"{name:<30} {data['seconds']:9.3f}s {other['seconds']:9.3f}s "
            f"{ratio:8.1f}x"
        )
    print("counts bit-identical across backends for every workload")
    return 0


if __name__ == "__main__":
    sys.exit(main())
