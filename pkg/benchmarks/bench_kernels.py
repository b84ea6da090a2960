"""Compiled vs pure-Python enumeration kernel.

Times ``kernels.count_animals`` for each backend on the same (dim, nmax)
workloads, checks that both return identical counts, and prints one row per
workload. Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

from bpreduce import kernels

WORKLOADS = ((2, 8), (2, 10), (3, 6), (3, 7))


def time_backend(backend: str, dim: int, nmax: int, repeat: int) -> tuple[float, tuple]:
    times, result = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = kernels.count_animals(dim, nmax, backend=backend)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3, help="timings per backend (median reported)")
    p.add_argument("--json", default=None, help="also write the rows as JSON here")
    args = p.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; only the Python fallback is timed", file=sys.stderr)
    rows = []
    print(f"{'dim':>3} {'nmax':>4} {'c_nmax':>12} " + " ".join(f"{b + ' [s]':>12}" for b in backends)
          + f" {'speedup':>8}")
    for dim, nmax in WORKLOADS:
        timings, results = {}, {}
        for b in backends:
            timings[b], results[b] = time_backend(b, dim, nmax, args.repeat)
        if len({repr(r) for r in results.values()}) != 1:
            raise SystemExit(f"backends disagree at dim={dim}, nmax={nmax}")
        speedup = timings["python"] / timings["cython"] if "cython" in timings else None
        c_n = results["python"][1][nmax]
        rows.append({"dim": dim, "nmax": nmax, "c_nmax": c_n, "seconds": timings, "speedup": speedup})
        print(f"{dim:>3} {nmax:>4} {c_n:>12} " + " ".join(f"{timings[b]:>12.4f}" for b in backends)
              + (f" {speedup:>8.1f}" if speedup else ""))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"schema": "bpreduce.bench/1", "repeat": args.repeat, "rows": rows}, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
