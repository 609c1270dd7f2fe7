"""Time the numba kernels against their numpy forms.

    python benchmarks/bench_kernels.py [--repeat 5]

Compilation is triggered once before timing. With QXFORM_DISABLE_NUMBA set
only the numpy column is filled.
"""

import argparse
import time

import numpy as np

from qxform import fock, kernels
from qxform._accel import HAVE_NUMBA
from qxform.kerr import KerrParams, generator_parts


def best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def cases():
    nodes = np.linspace(0.0, 5.0, 4001)
    v = 1.0 + 0.05 * nodes[:-1]
    ermakov_args = (nodes, v, np.full(4000, 0.05), np.full(4000, 8, dtype=np.int64), 1.0, 0.0, 1e-6)

    rho = fock.pure_density(fock.coherent_amplitudes(1.0, 32))
    kerr_args = (rho, 0.5, 0.1, 1.0)

    h, jumps = generator_parts(KerrParams(0.5, 0.1, 16))
    rho16 = fock.pure_density(fock.coherent_amplitudes(1.0, 16))
    lind_args = (rho16, h, np.ascontiguousarray(jumps), 1e-3, 2000)
    return [
        ("ermakov_rk4 (32k steps)", kernels.ermakov_rk4_jit, kernels.ermakov_rk4_numpy, ermakov_args),
        ("kerr_fock_sum N=32", kernels.kerr_fock_sum_jit, kernels.kerr_fock_sum_numpy, kerr_args),
        ("kerr_fock_sum N=32 loops", kernels.kerr_fock_sum_jit, kernels.kerr_fock_sum_loops, kerr_args),
        ("lindblad_rk4 N=16 x2000", kernels.lindblad_rk4_jit, kernels.lindblad_rk4_numpy, lind_args),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"numba active: {HAVE_NUMBA}")
    print(f"{'kernel':28s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s}")
    for name, jit, ref, a in cases():
        t_ref = best_of(ref, a, args.repeat)
        if jit is None:
            print(f"{name:28s} {'-':>11s} {t_ref:11.4f} {'-':>8s}")
            continue
        jit(*a)  # compile
        t_jit = best_of(jit, a, args.repeat)
        print(f"{name:28s} {t_jit:11.4f} {t_ref:11.4f} {t_ref / t_jit:8.1f}x")


if __name__ == "__main__":
    main()
