"""Compare the compiled and numpy spectral summation backends.

Run with ``python benchmarks/bench_spectral.py``.  Uses the problem size of
one wavepacket measurement (8 channels, 16384 nodes, 8192 positions).
"""

import argparse
import time

import numpy as np

from diracshift import _kernel


def make_problem(channels, nodes, samples, seed=0):
    rng = np.random.default_rng(seed)
    coef = rng.normal(size=(channels, nodes)) + 1j * rng.normal(size=(channels, nodes))
    z = np.linspace(-300.0, 300.0, samples)
    return coef, 1.5, 1e-4, z


def best_of(fn, args, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--channels", type=int, default=8)
    ap.add_argument("--nodes", type=int, default=16384)
    ap.add_argument("--samples", type=int, default=8192)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    problem = make_problem(args.channels, args.nodes, args.samples)
    results = {}
    for name, fn in _kernel.available_backends().items():
        t, out = best_of(fn, problem, args.repeat)
        results[name] = out
        print(f"{name:8s} {t:8.3f} s")
    if "cython" in results:
        ref = results["numpy"]
        err = np.max(np.abs(results["cython"] - ref)) / np.max(np.abs(ref))
        print(f"max relative difference {err:.2e}")
    else:
        print("compiled backend not built; only numpy timed")
    print(f"default backend: {_kernel.BACKEND}")


if __name__ == "__main__":
    main()
