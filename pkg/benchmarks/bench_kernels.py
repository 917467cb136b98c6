"""Compiled vs. numpy coherent-overlap kernel, alone and inside one bound verification.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from cpfinetti import _kernels_py

try:
    from cpfinetti import _kernels
except ImportError:
    _kernels = None

CASES = [(2048, 1, 60), (2048, 15, 160), (8192, 63, 400)]

END_TO_END = """
import time
from cpfinetti.definetti import verify_bound
from cpfinetti.quadrature import profile_adapted_grid
from cpfinetti.weight_basis import SuperpositionProfile, from_profile
p = SuperpositionProfile(((1.0, 1.0), (-1.0, 1.0)))
psi = from_profile(p, 64)
grid = profile_adapted_grid(p, 64, 1)
times = []
for _ in range({repeat}):
    start = time.perf_counter()
    verify_bound(psi, 1, grid)
    times.append(time.perf_counter() - start)
print(min(times))
"""


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    print(f"{'nodes':>6} {'m':>4} {'w_max':>6} {'python ms':>10} {'compiled ms':>12} {'speedup':>8}")
    for nodes, m, w_max in CASES:
        alphas = (rng.normal(size=nodes) + 1j * rng.normal(size=nodes)) * 0.7
        py = min(timeit.repeat(lambda: _kernels_py.coherent_rows(alphas, float(m), w_max),
                               number=1, repeat=repeat))
        if _kernels is None:
            print(f"{nodes:>6} {m:>4} {w_max:>6} {py * 1e3:>10.2f} {'n/a':>12} {'n/a':>8}")
            continue
        cy = min(timeit.repeat(lambda: _kernels.coherent_rows(alphas, float(m), w_max),
                               number=1, repeat=repeat))
        print(f"{nodes:>6} {m:>4} {w_max:>6} {py * 1e3:>10.2f} {cy * 1e3:>12.2f} {py / cy:>8.1f}x")


def end_to_end(repeat):
    script = END_TO_END.format(repeat=repeat)
    for label, extra in (("python", {"CPFINETTI_PURE": "1"}), ("compiled", {})):
        env = {k: v for k, v in os.environ.items() if k != "CPFINETTI_PURE"} | extra
        out = subprocess.run([sys.executable, "-c", script], env=env, capture_output=True,
                             text=True, check=True)
        print(f"verify_bound even cat n=64 k=1, {label:>8} backend: {float(out.stdout):.3f}s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    kernel_table(args.repeat)
    end_to_end(max(1, args.repeat // 2))


if __name__ == "__main__":
    main()
