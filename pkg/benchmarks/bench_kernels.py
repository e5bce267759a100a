#!/usr/bin/env python3
"""Timing comparison of the compiled kernels against the NumPy fallback.

Runs the Walsh-Hadamard butterfly and the cyclic Jacobi eigensolver on both
backends over a range of sizes and prints per-call times plus the speedup.
Results from the two backends are also cross-checked against each other so a
fast-but-wrong kernel cannot slip through a benchmark run.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hamlb import kernels


def _time_call(fn, *args, repeats: int, setup=None) -> float:
    best = float("inf")
    for _ in range(repeats):
        payload = setup() if setup is not None else args
        t0 = time.perf_counter()
        fn(*payload)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_fwht(backend, n: int, repeats: int, rng: np.random.Generator) -> float:
    base = rng.normal(size=1 << n)
    return _time_call(
        backend.fwht_inplace, repeats=repeats, setup=lambda: (base.copy(),)
    )


def bench_jacobi(backend, dim: int, repeats: int, rng: np.random.Generator) -> float:
    R = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    A = 0.5 * (R + R.conj().T)
    return _time_call(
        backend.jacobi_eigh, repeats=repeats, setup=lambda: (A.copy(), 1e-13, 64)
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fwht-n", default="10,14,18,20",
                    help="comma-separated log2 sizes for the transform")
    ap.add_argument("--jacobi-dim", default="16,32,64,128",
                    help="comma-separated matrix dimensions for the eigensolver")
    ap.add_argument("--repeats", type=int, default=5, help="take the best of N runs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not kernels.HAVE_COMPILED:
        print("compiled backend not available; timing the fallback only")
    backends = [("python", kernels.python_backend)]
    if kernels.HAVE_COMPILED:
        backends.insert(0, ("compiled", kernels.compiled_backend))

    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<22}{'size':>8}", end="")
    for name, _ in backends:
        print(f"{name + ' (ms)':>16}", end="")
    if len(backends) == 2:
        print(f"{'speedup':>10}", end="")
    print()

    for n in (int(x) for x in args.fwht_n.split(",")):
        times = [bench_fwht(b, n, args.repeats, rng) for _, b in backends]
        print(f"{'fwht_inplace':<22}{f'2^{n}':>8}", end="")
        for t in times:
            print(f"{t * 1e3:>16.3f}", end="")
        if len(times) == 2:
            print(f"{times[1] / times[0]:>10.2f}", end="")
        print()
        if len(backends) == 2:
            a = rng.normal(size=1 << n)
            b1, b2 = a.copy(), a.copy()
            backends[0][1].fwht_inplace(b1)
            backends[1][1].fwht_inplace(b2)
            assert np.allclose(b1, b2, atol=1e-9), "backend mismatch in fwht"

    for dim in (int(x) for x in args.jacobi_dim.split(",")):
        times = [bench_jacobi(b, dim, args.repeats, rng) for _, b in backends]
        print(f"{'jacobi_eigh':<22}{dim:>8}", end="")
        for t in times:
            print(f"{t * 1e3:>16.3f}", end="")
        if len(times) == 2:
            print(f"{times[1] / times[0]:>10.2f}", end="")
        print()
        if len(backends) == 2:
            R = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            A = 0.5 * (R + R.conj().T)
            w1 = backends[0][1].jacobi_eigh(A.copy(), 1e-13, 64)[0]
            w2 = backends[1][1].jacobi_eigh(A.copy(), 1e-13, 64)[0]
            assert np.allclose(w1, w2, atol=1e-9), "backend mismatch in jacobi"


if __name__ == "__main__":
    main()
