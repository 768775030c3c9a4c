"""Benchmark the compiled kernel extension against the pure-numpy fallback.

Times the four hot entry points (curvature, residual, objective, fd
gradient) on several grid sizes, plus one end-to-end solve, and prints the
speedups.  Run as ``python benchmarks/bench_kernels.py``.
"""

import time

import numpy as np

from ymtorus import kernels
from ymtorus.solver import SolverConfig, solve


def time_call(fn, *args, min_time=0.2):
    fn(*args)  # warm up
    n_calls, elapsed = 0, 0.0
    t0 = time.perf_counter()
    while elapsed < min_time:
        fn(*args)
        n_calls += 1
        elapsed = time.perf_counter() - t0
    return elapsed / n_calls


def bench_kernels():
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not available; nothing to compare")
        return
    pure = kernels.get_backend("pure")
    comp = kernels.get_backend("compiled")
    rng = np.random.default_rng(0)
    print(f"{'grid':>6} {'kernel':>12} {'pure':>12} {'compiled':>12} {'speedup':>8}")
    for n, m in ((2, 2), (4, 4), (8, 8), (16, 16)):
        x = rng.uniform(-0.5, 0.5, size=6 * n * m)
        rows = (
            ("curvature", lambda mod: mod.curvature(x, n, m)),
            ("residual", lambda mod: mod.residual(x, n, m, True)),
            ("objective", lambda mod: mod.objective(x, n, m, True)),
            ("gradient_fd", lambda mod: mod.gradient_fd(x, n, m, True, 1e-6)),
        )
        for name, call in rows:
            tp = time_call(call, pure)
            tc = time_call(call, comp)
            print(
                f"{n}x{m:<4} {name:>12} {tp * 1e6:>10.1f}us {tc * 1e6:>10.1f}us "
                f"{tp / tc:>7.1f}x"
            )
        print()


def bench_solve():
    if "compiled" not in kernels.available_backends():
        return
    cfg = SolverConfig(n=2, m=2, seed=0, scale=0.05)
    print(f"{'backend':>10} {'solve time':>12} {'iterations':>12}")
    original = kernels.active_backend()
    try:
        for backend in ("pure", "compiled"):
            kernels.use_backend(backend)
            t0 = time.perf_counter()
            _, trace = solve(cfg)
            dt = time.perf_counter() - t0
            print(f"{backend:>10} {dt:>11.2f}s {trace.rows[-1].iteration:>12}")
    finally:
        kernels.use_backend(original)


if __name__ == "__main__":
    print(f"available backends: {', '.join(kernels.available_backends())}")
    print(f"default backend: {kernels.active_backend()}\n")
    bench_kernels()
    bench_solve()
