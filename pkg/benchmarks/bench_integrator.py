"""Compare the compiled and pure-Python integrator backends.

    python benchmarks/bench_integrator.py --steps 20000 --repeat 3
"""

import argparse
import time

import numpy as np

from sleeping_top import kernels
from sleeping_top.dynamics import IntegratorConfig, integrate
from sleeping_top.model import PhasePoint, TopParameters
from sleeping_top.rotation import exp_so3


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--python-steps", type=int, default=2_000,
                    help="steps for the (slow) pure-Python backend")
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    p = TopParameters(1.0, 1.0, 1.0, 1.0, 1.5)
    z0 = PhasePoint(exp_so3((0.4, -0.3, 0.2)), np.array([0.7, -0.4, 2.1]))
    names = ["python"] + (["cython"] if kernels.compiled is not None else [])

    print(f"{'scheme':<12} {'backend':<8} {'steps':>8} {'us/step':>10}")
    for scheme in ("lierk4", "liemidpoint"):
        per_step = {}
        for name in names:
            n = args.python_steps if name == "python" else args.steps
            cfg = IntegratorConfig(dt=args.dt, t_end=n * args.dt, scheme=scheme)
            elapsed, _ = best_time(lambda: integrate(p, z0, cfg, name), args.repeat)
            per_step[name] = elapsed / cfg.nsteps
            print(f"{scheme:<12} {name:<8} {cfg.nsteps:>8} {1e6 * per_step[name]:>10.2f}")
        if len(per_step) == 2:
            cfg = IntegratorConfig(dt=args.dt, t_end=args.python_steps * args.dt, scheme=scheme)
            a, b = (integrate(p, z0, cfg, name) for name in names)
            gap = max(np.max(np.abs(a.attitudes - b.attitudes)), np.max(np.abs(a.momenta - b.momenta)))
            print(f"{scheme:<12} speedup {per_step['python'] / per_step['cython']:.0f}x, "
                  f"max backend difference {gap:.1e}")
    if len(names) == 1:
        print("compiled kernel not built; only the pure-Python backend was timed")


if __name__ == "__main__":
    main()
