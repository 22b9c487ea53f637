"""Compare the compiled and pure-Python RK4 kernels on the four scenarios.

Run with ``python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]``.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from gkls import kernels
from gkls.dynamics import gkls_field
from gkls.scenarios import SCENARIOS, build_scenario

START = {"qbit": np.array([0.6, 0.2, -0.5]), "gaussian": np.array([3.0, 1.0, -1.5])}


def time_backend(module, A, c, p0, kind_code, steps, repeat) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        module.rk4_affine(A, c, p0, 0.0, 1e-3, steps, 0.0, 10, kind_code, 1e3)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    mods = kernels.backends()
    print(f"backends available: {', '.join(mods)}; steps per run: {args.steps}")
    print(f"{'scenario':<16}" + "".join(f"{name + ' [ms]':>16}" for name in mods) + f"{'speedup':>10}")
    for name in SCENARIOS:
        s = build_scenario(name)
        fd = gkls_field(s.h, s.d)
        A, c = np.ascontiguousarray(fd.A), np.ascontiguousarray(fd.c)
        code = 0 if s.kind.value == "qbit" else 1
        times = {k: time_backend(m, A, c, START[s.kind.value], code, args.steps, args.repeat) for k, m in mods.items()}
        speedup = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<16}" + "".join(f"{1e3 * t:>16.2f}" for t in times.values()) + f"{speedup:>10.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
