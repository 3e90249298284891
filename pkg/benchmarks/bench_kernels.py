"""Compare the numba and numpy kernel backends.

Usage: ``python benchmarks/bench_kernels.py [--repeat 5] [--d 2] [--N 30]``.
Prints the best-of-``repeat`` wall time of each kernel per backend and the
largest deviation between the two results.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from ncclark import _kernels as K
from ncclark._basis import monomial_basis
from ncclark.freealg import orbit_size


def _workloads(d: int, N: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    basis = monomial_basis(d, N)
    n = len(basis)
    a = (rng.normal(size=n) + 1j * rng.normal(size=n)) / (1 + basis.degrees) ** 2
    b = (rng.normal(size=n) + 1j * rng.normal(size=n)) / (1 + basis.degrees) ** 2
    a[0] = 2.0
    half = monomial_basis(d, N // 2)
    orbit = np.array([float(orbit_size(tuple(e))) for e in half.exps])
    pts = rng.normal(size=(64, d)) + 1j * rng.normal(size=(64, d))
    pts *= 0.5 / np.linalg.norm(pts, axis=1, keepdims=True)
    return {
        "series_mul": lambda: K.series_mul(a, b, basis),
        "series_reciprocal": lambda: K.series_reciprocal(a, basis),
        "gram_block": lambda: K.gram_block(half.exps, half.exps, a, basis, orbit, orbit),
        "series_eval": lambda: K.series_eval(a, basis.exps, pts),
    }


def run(d: int, N: int, repeat: int) -> list[dict]:
    rows = []
    saved = K.BACKEND
    try:
        for name in _workloads(d, N):
            timings, outputs = {}, {}
            for backend in ("numpy", "numba"):
                if backend == "numba" and K.numba_impl is None:
                    continue
                K.BACKEND = backend
                fn = _workloads(d, N)[name]
                outputs[backend] = fn()  # warm-up and JIT compile
                timings[backend] = min(timeit.repeat(fn, number=1, repeat=repeat))
            dev = float(np.max(np.abs(outputs["numpy"] - outputs["numba"]))) if len(outputs) == 2 else float("nan")
            rows.append({"kernel": name, **timings, "maxDeviation": dev})
    finally:
        K.BACKEND = saved
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--N", type=int, default=30)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    rows = run(args.d, args.N, args.repeat)
    print(f"d={args.d} N={args.N} basis size={len(monomial_basis(args.d, args.N))}")
    print(f"{'kernel':<20}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max dev':>12}")
    for r in rows:
        nb = r.get("numba", float("nan"))
        print(f"{r['kernel']:<20}{r['numpy']:>12.4g}{nb:>12.4g}{r['numpy'] / nb:>10.1f}{r['maxDeviation']:>12.2e}")


if __name__ == "__main__":
    main()
