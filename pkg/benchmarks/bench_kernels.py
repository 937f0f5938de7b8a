#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot kernels (ladder application, hop, two-level rotation)
on a random sparse register state and prints the per-call medians plus
speedups.  Both backends are imported directly, bypassing the
EXCHANGE_LAB_KERNEL dispatcher, so one process measures both.

Usage: python benchmarks/bench_kernels.py [--modes 24] [--entries 200000]
"""

import argparse
import statistics
import time

import numpy as np

from exchange_lab.fock import RegisterLayout
from exchange_lab.kernels import numba_backend, numpy_backend


def _workload(modes: int, entries: int, seed: int):
    rng = np.random.default_rng(seed)
    dim = 1 << modes
    indices = np.sort(rng.choice(dim, size=min(entries, dim // 2), replace=False)).astype(np.int64)
    amps = rng.standard_normal(indices.shape[0]) + 1j * rng.standard_normal(indices.shape[0])
    amps = (amps / np.linalg.norm(amps)).astype(np.complex128)
    return indices, amps


def _time(fn, repeats: int = 7) -> float:
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--modes", type=int, default=24)
    parser.add_argument("--entries", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    layout = RegisterLayout.fermionic(args.modes)
    indices, amps = _workload(args.modes, args.entries, args.seed)
    src, dst = 2, args.modes - 1
    src_mask, dst_mask = 1 << (src - 1), 1 << (dst - 1)
    prefix_src = int(layout.prefix_anti_mask[src - 1])
    prefix_dst = int(layout.prefix_anti_mask[dst - 1])
    between = layout.between_anti_mask(src, dst)

    cases = {
        "ladder": lambda backend: backend.ladder_contributions(
            indices, amps, src_mask, prefix_src, False
        ),
        "hop": lambda backend: backend.hop_contributions(
            indices, amps, src_mask, dst_mask, prefix_src, prefix_dst, between
        ),
        "rotation": lambda backend: backend.rotation_contributions(
            indices, amps, src_mask, dst_mask, prefix_src, prefix_dst, 0.6, 0.8
        ),
    }

    # warm up the numba compilations before timing
    for case in cases.values():
        case(numba_backend)

    print(f"modes={args.modes} entries={indices.shape[0]}")
    print(f"{'kernel':<10} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>9}")
    for name, case in cases.items():
        t_numpy = _time(lambda: case(numpy_backend))
        t_numba = _time(lambda: case(numba_backend))
        print(f"{name:<10} {t_numpy * 1e3:>12.3f} {t_numba * 1e3:>12.3f} {t_numpy / t_numba:>8.1f}x")


if __name__ == "__main__":
    main()
