"""Benchmark the compiled stepping kernel against the numpy fallback.

Runs the same midpoint-exponential propagation (strong pair coupling,
selectable truncation) through both kernel implementations and reports
wall time and the max deviation between the two trajectories.

Usage: python benchmarks/bench_propagate.py [--n-max 16] [--t-end 30] [--repeat 3]
"""

import argparse
import time

import numpy as np

from fermibos import _kernels
from fermibos.evolve import IntegratorConfig
from fermibos.fock import build_basis
from fermibos.model import FieldScenario, field_monomials
from fermibos.modes import CouplingProfile


def build_problem(n_max: int, t_end: float):
    p = CouplingProfile(g1=0.1, g2=1.0, sigma_t=4.0, T=30.0, delta=0.0)
    s = FieldScenario(p, build_basis(n_max))
    cfg = IntegratorConfig(t_end=t_end)
    monos = field_monomials(s)
    mid = (np.arange(cfg.n_steps) + 0.5) * cfg.dt
    mats = np.array([m.matrix for m in monos])
    coeffs = np.column_stack([m.coefficient(mid) for m in monos]).astype(complex)
    psi0 = s.basis.state(1, 1, 0)
    return mats, coeffs, cfg.dt, psi0


def timed(kernel, args, repeat: int):
    best = float("inf")
    states = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        states = kernel(*args)
        best = min(best, time.perf_counter() - t0)
    return best, states


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=16)
    ap.add_argument("--t-end", type=float, default=30.0)
    ap.add_argument("--repeat", type=int, default=3)
    opts = ap.parse_args()

    args = build_problem(opts.n_max, opts.t_end)
    dim = args[0].shape[1]
    n_steps = args[1].shape[0]
    print(f"dimension {dim}, {n_steps} steps, best of {opts.repeat}")

    t_py, states_py = timed(_kernels.propagate_kernel_python, args, opts.repeat)
    print(f"python kernel: {t_py:8.3f} s")

    if _kernels.propagate_kernel_cython is None:
        print("cython kernel: not built")
        return
    t_cy, states_cy = timed(_kernels.propagate_kernel_cython, args, opts.repeat)
    diff = float(np.max(np.abs(states_py - states_cy)))
    print(f"cython kernel: {t_cy:8.3f} s   (speedup {t_py / t_cy:.2f}x, max diff {diff:.2e})")


if __name__ == "__main__":
    main()
