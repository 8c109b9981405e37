"""Timing comparison of the numba kernels against their numpy fallbacks.

Runs each hot kernel on growing problem sizes and prints the median wall
time per call for both variants, plus the speedup.  numba compilation is
paid once per kernel in a warmup call and excluded from the timings.

    python benchmarks/bench_kernels.py [--sizes 11,13,15] [--repeat 7]
"""

import argparse
import time
from math import comb
from statistics import median

import numpy as np

from spinbus import ChainSpec, build_basis, heisenberg_hamiltonian
from spinbus import _kernels


def timed(fn, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return median(runs)


def fmt(seconds):
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} us"
    if seconds < 1.0:
        return f"{seconds * 1e3:8.2f} ms"
    return f"{seconds:8.3f} s "


def bench_sector_basis(N, repeat):
    n_up = (N + 1) // 2
    count = comb(N, n_up)
    a = timed(lambda: _kernels.sector_basis_numpy(N, n_up), repeat)
    b = timed(lambda: _kernels.sector_basis_numba(N, n_up, count), repeat)
    return a, b, f"N={N}, {count} states"


def bench_entries(N, repeat):
    states = _kernels.sector_basis_numpy(N, (N + 1) // 2)
    pi = np.arange(N - 1, dtype=np.int64)
    pj = pi + 1
    cs = np.ones(N - 1)
    a = timed(lambda: _kernels.heisenberg_entries_numpy(states, pi, pj, cs),
              repeat)
    b = timed(lambda: _kernels.heisenberg_entries_numba(states, pi, pj, cs),
              repeat)
    return a, b, f"N={N}, {states.size} states"


def bench_matvec(N, repeat):
    H = heisenberg_hamiltonian(ChainSpec(N), build_basis(N, sector=0.5))
    indptr, indices, data = H.csr()
    rng = np.random.default_rng(0)
    x = rng.normal(size=H.dim) + 1j * rng.normal(size=H.dim)
    a = timed(lambda: _kernels.coo_matvec_numpy(H.rows, H.cols, H.vals, x,
                                                H.dim), repeat)
    b = timed(lambda: _kernels.csr_matvec_numba(indptr, indices, data, x),
              repeat)
    return a, b, f"N={N}, dim {H.dim}, {data.size} nonzeros"


BENCHES = [
    ("sector_basis", bench_sector_basis),
    ("heisenberg_entries", bench_entries),
    ("matvec", bench_matvec),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="11,13,15",
                    help="comma-separated odd chain lengths")
    ap.add_argument("--repeat", type=int, default=7,
                    help="timed repetitions per point (median reported)")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; nothing to compare against.")
        return

    # warm up jit compilation outside the timings
    _kernels.sector_basis_numba(5, 3, comb(5, 3))
    st = _kernels.sector_basis_numpy(5, 3)
    _kernels.heisenberg_entries_numba(
        st, np.array([0], dtype=np.int64), np.array([1], dtype=np.int64),
        np.array([1.0]))
    _kernels.csr_matvec_numba(np.array([0, 1]), np.array([0]),
                              np.array([1.0]), np.ones(1, dtype=complex))

    print(f"{'kernel':<20} {'case':<28} {'numpy':>11} {'numba':>11} "
          f"{'speedup':>8}")
    for name, bench in BENCHES:
        for N in sizes:
            t_np, t_nb, case = bench(N, args.repeat)
            print(f"{name:<20} {case:<28} {fmt(t_np)} {fmt(t_nb)} "
                  f"{t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
