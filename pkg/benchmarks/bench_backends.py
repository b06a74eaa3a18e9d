"""Compare the numba and pure-numpy kernel backends.

    python benchmarks/bench_backends.py [--trials 1000000] [--repeat 3]

Each backend runs in its own interpreter because the choice is made at
import time from ``TAILSIM_BACKEND``.
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from tailsim import kernels
from tailsim.engine import SimulationPlan, simulate
from tailsim.terms import CASE_STUDY_CONTRACTS, term_arrays

trials, repeat = int(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(0)
p = rng.random(3 * trials) + 1e-300
counts = rng.poisson(3, trials).astype(np.int64)
losses = rng.lognormal(1.15, 1.52, counts.sum())
logw = rng.normal(0, 0.2, counts.sum())
terms = term_arrays(CASE_STUDY_CONTRACTS)
plan = SimulationPlan(trials, 3.0, 10.0, 30.0, (1, 2), CASE_STUDY_CONTRACTS)

def best(fn):
    fn()  # warm-up (includes JIT compilation)
    times = []
    for _ in range(repeat):
        t = time.perf_counter(); fn(); times.append(time.perf_counter() - t)
    return min(times)

net, tw = kernels.year_chunk(counts, losses, logw, *terms)
out = {
    "backend": kernels.BACKEND,
    "ndtri_upper": best(lambda: kernels.ndtri_upper(p)),
    "year_chunk": best(lambda: kernels.year_chunk(counts, losses, logw, *terms)),
    "moment_sums": best(lambda: kernels.moment_sums(net, tw)),
    "simulate(k=1,2)": best(lambda: simulate(plan)),
}
print(json.dumps(out))
"""


def run_backend(name, trials, repeat):
    env = dict(os.environ, TAILSIM_BACKEND=name)
    proc = subprocess.run(
        [sys.executable, "-c", CHILD, str(trials), str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--trials", type=int, default=10**6)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rows = [run_backend(b, args.trials, args.repeat) for b in ("numpy", "numba")]
    if rows[1]["backend"] != "numba":
        print("numba not importable; only the numpy backend was measured")
    keys = [k for k in rows[0] if k != "backend"]
    print(f"{'kernel':<18}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for k in keys:
        a, b = rows[0][k], rows[1][k]
        print(f"{k:<18}{a:>12.4f}{b:>12.4f}{a / b:>9.2f}x")


if __name__ == "__main__":
    main()
