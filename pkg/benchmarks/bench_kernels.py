#!/usr/bin/env python3
"""Benchmark the compiled RK4 kernels against the pure-numpy fallback.

Runs the two workloads that dominate scenario runtime (the three-level
closed propagation and the 8-dim Lindblad propagation) through both kernel
implementations and reports wall times plus the worst entrywise deviation
between the backends.

    python benchmarks/bench_kernels.py [--steps N] [--repeat K]
"""
import argparse
import time

import numpy as np

from msdsim import _kernels_py
from msdsim.dynamics import (
    DissipationSpec,
    HybridSystemSpec,
    TimeGrid,
    _hybrid_jumps,
    hybrid_hamiltonian,
)
from msdsim.hamiltonians import msd_hamiltonian
from msdsim.pulses import transfer_waveform

try:
    from msdsim import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def _time(fn, repeat):
    best = np.inf
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    waveform = transfer_waveform(1.6, 0.75, 0.25, 0.408)
    spec = HybridSystemSpec(g_over_2pi=20.0, delta_over_2pi=200.0,
                            omega0_over_2pi=16.0, t1=0.75, t2=0.25, width=0.408)

    grid3 = TimeGrid(-0.2, 1.2, args.steps)
    h3 = np.ascontiguousarray(msd_hamiltonian(waveform).table(grid3.stage_times()))
    psi0 = np.array([0, 1, 0], dtype=complex)

    grid8 = TimeGrid(0.0, 1.2, args.steps)
    h8 = np.ascontiguousarray(hybrid_hamiltonian(spec, "msd").table(grid8.stage_times()))
    rho0 = np.zeros((8, 8), dtype=complex)
    rho0[2, 2] = 1.0
    jump_ops, rates = _hybrid_jumps(DissipationSpec(1 / 50, 1 / 6000, 1 / 600))
    jump_ops = np.ascontiguousarray(jump_ops)

    workloads = [
        ("schrodinger d=3", lambda mod: mod.schrodinger_rk4(h3, psi0, grid3.h)),
        ("lindblad    d=8", lambda mod: mod.lindblad_rk4(h8, rho0, grid8.h,
                                                         jump_ops, rates)),
    ]

    print(f"steps = {args.steps}, best of {args.repeat} runs")
    print(f"{'workload':18s} {'python':>10s} {'compiled':>10s} "
          f"{'speedup':>8s} {'max |diff|':>11s}")
    for name, run in workloads:
        t_py, ref = _time(lambda: run(_kernels_py), args.repeat)
        if _kernels_c is None:
            print(f"{name:18s} {t_py:9.3f}s {'absent':>10s}")
            continue
        t_c, got = _time(lambda: run(_kernels_c), args.repeat)
        diff = float(np.abs(ref - got).max())
        print(f"{name:18s} {t_py:9.3f}s {t_c:9.3f}s {t_py / t_c:7.1f}x {diff:11.2e}")


if __name__ == "__main__":
    main()
