"""Benchmark the accelerated kernels against the pure-numpy fallback.

The backend is chosen at import time via the ELASTICA_FIT_NO_NUMBA
environment variable, so the script re-executes itself once per backend in a
subprocess and prints a comparison table.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _time(fn, repeats, warmup=2):
    for _ in range(warmup):
        fn()
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmarks(repeats):
    import numpy as np

    from elastica_fit._accel import NUMBA_ENABLED
    from elastica_fit.curve import sample
    from elastica_fit.elastica import ElasticaCurve, ElasticaParams
    from elastica_fit.elliptic import jacobi
    from elastica_fit.elastica import segment_eval_many
    from elastica_fit.fitting import gradient_hessian, objective

    p = ElasticaParams(k=0.8, s0=0.2, ell=3.0, w=1.5, phi=0.7,
                       x0=2.0, y0=-1.0)
    target = sample(ElasticaCurve(p), 1024)
    t_grid = np.linspace(0.0, 1.0, 2049)
    u_vals = np.linspace(-8.0, 8.0, 2000)

    results = {
        "backend": "numba" if NUMBA_ENABLED else "numpy-fallback",
        "jacobi_2000_calls": _time(
            lambda: [jacobi(u, 0.7) for u in u_vals], repeats),
        "segment_eval_2049_nodes": _time(
            lambda: segment_eval_many(p, t_grid), repeats),
        "objective_1024_nodes": _time(
            lambda: objective(p, target), repeats),
        "gradient_hessian_1024_nodes": _time(
            lambda: gradient_hessian(p, target), repeats),
    }
    return results


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.child:
        json.dump(run_benchmarks(args.repeats), sys.stdout)
        return

    rows = []
    for no_numba in ("0", "1"):
        env = dict(os.environ, ELASTICA_FIT_NO_NUMBA=no_numba)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__),
             "--child", "--repeats", str(args.repeats)],
            env=env, capture_output=True, text=True, check=True)
        rows.append(json.loads(out.stdout))

    names = [k for k in rows[0] if k != "backend"]
    width = max(len(n) for n in names)
    print(f"{'kernel':<{width}}  {rows[0]['backend']:>14}  "
          f"{rows[1]['backend']:>14}  {'speedup':>8}")
    for name in names:
        a, b = rows[0][name], rows[1][name]
        print(f"{name:<{width}}  {a * 1e3:>12.3f}ms  {b * 1e3:>12.3f}ms  "
              f"{b / a:>7.1f}x")


if __name__ == "__main__":
    main()
