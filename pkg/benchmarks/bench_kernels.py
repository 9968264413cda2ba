"""Numba vs NumPy backend timings for the hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Times three workloads on each backend (after a JIT warm-up), checks that both
backends return the same numbers, and prints a table:

* ``eval_F grid``  one 401 x 401 scan of F(lambda1, lambda2) (the grid oracle's inner loop)
* ``dd_minimize``  one exact DD solve of f(xi, Q) on a 48-sample instance
* ``solve``        the full xi / Q search on the same instance
"""
from __future__ import annotations

import argparse
import json
import statistics
import time

import numpy as np

from drnv import kernels
from drnv.dd_solver import dd_minimize
from drnv.inner_eval import eval_F_plane
from drnv.model import make_instance
from drnv.outer_solver import solve
from drnv.verify import synthetic_tesla_like


def _workloads():
    inst = make_instance(synthetic_tesla_like(), 2.5, 20.0, 10.0)
    L1, L2 = np.meshgrid(np.linspace(0, 2, 401), np.linspace(-60, 60, 401), indexing="ij")
    l1, l2 = L1.ravel(), L2.ravel()
    return {
        "eval_F grid": lambda: float(np.min(eval_F_plane(l1, l2, 0.8, 11.0, inst))),
        "dd_minimize": lambda: dd_minimize(inst, 0.8, 11.0).f_value,
        "solve": lambda: solve(inst).worst_case_cost,
    }


def _time(fn, repeat: int):
    value = fn()  # warm-up (JIT compilation on the numba backend)
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return value, statistics.median(runs)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write results to this file")
    args = ap.parse_args(argv)

    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    previous = kernels.backend()
    results: dict = {}
    try:
        for b in backends:
            kernels.set_backend(b)
            for name, fn in _workloads().items():
                reps = 1 if name == "solve" else args.repeat
                results.setdefault(name, {})[b] = _time(fn, reps)
    finally:
        kernels.set_backend(previous)

    print(f"{'workload':<14} " + " ".join(f"{b + ' [ms]':>12}" for b in backends) + f" {'speedup':>8} {'max |diff|':>11}")
    for name, per in results.items():
        ms = [per[b][1] * 1e3 for b in backends]
        vals = [per[b][0] for b in backends]
        speed = f"{ms[0] / ms[1]:7.1f}x" if len(ms) == 2 else "    n/a"
        diff = max(vals) - min(vals)
        print(f"{name:<14} " + " ".join(f"{m:12.2f}" for m in ms) + f" {speed:>8} {diff:11.2e}")
    if not kernels.HAVE_NUMBA:
        print("numba not installed: only the numpy backend was timed")
    if args.json:
        doc = {name: {b: {"value": v, "seconds": s} for b, (v, s) in per.items()} for name, per in results.items()}
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
