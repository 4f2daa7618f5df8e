"""Benchmark: compiled convolution kernels vs the numpy fallback.

Times the raw kernels on engine-shaped data plus the two end-to-end
pipelines (forward normal form + curve, and the inverse solver).  Run with

    python benchmarks/bench_kernels.py

The backend is selected per-process, so the script re-executes itself with
FOLIJET_PURE_PYTHON=1 to collect the fallback column.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time

import numpy as np


def bench_kernels(reps: int = 200) -> dict:
    from folijet import kernels

    rng = np.random.default_rng(0)
    k0 = 8
    rows, m, n = k0 + 1, 2 * k0 + 6, 3 * k0 + 8
    w = m + n + 1

    def engine_like_grid():
        # row r carries x-order r: zero below the valuation, pole depth ~2r
        g = np.zeros((rows, w), dtype=np.complex128)
        for r in range(1, rows):
            lo = max(0, m - 2 * r)
            g[r, lo: m + n - r] = (rng.normal(size=m + n - r - lo)
                                   + 1j * rng.normal(size=m + n - r - lo))
        return g

    grid_a = engine_like_grid()
    grid_b = engine_like_grid()
    dpows = np.zeros((rows, rows, w), dtype=np.complex128)
    dpows[0, 0, m] = 1.0
    for t in range(1, rows):
        dpows[t] = engine_like_grid()
        dpows[t, :t, :] = 0.0
    row = rng.normal(size=w) + 1j * rng.normal(size=w)

    out = {"backend": kernels.BACKEND}
    t0 = time.perf_counter()
    for _ in range(reps):
        kernels.axis_mul(grid_a, grid_b, m)
    out["axis_mul_us"] = (time.perf_counter() - t0) / reps * 1e6
    t0 = time.perf_counter()
    for _ in range(reps):
        kernels.taylor_shift_row(dpows, row, m)
    out["taylor_shift_us"] = (time.perf_counter() - t0) / reps * 1e6
    t0 = time.perf_counter()
    for _ in range(reps):
        kernels.row_product(grid_a, grid_b, k0, m)
    out["row_product_us"] = (time.perf_counter() - t0) / reps * 1e6
    return out


def bench_pipeline(trials: int = 8) -> dict:
    from folijet.normalform import compute_normal_form
    from folijet.random_data import random_pair
    from folijet.realize import realize
    from folijet.tangency import tangency_curves

    rng = np.random.default_rng(1)
    pairs = [random_pair(rng, 3, 2, 8, scale=0.3, tau_range=(0.5, 1.0),
                         resonance_margin=0.35) for _ in range(trials)]
    t0 = time.perf_counter()
    curves = []
    for fp in pairs:
        curves.append(tangency_curves(fp, compute_normal_form(fp)))
    forward = (time.perf_counter() - t0) / trials
    t0 = time.perf_counter()
    for fp, curve in zip(pairs, curves):
        realize(fp, curve)
    backward = (time.perf_counter() - t0) / trials
    return {"forward_ms": forward * 1e3, "realize_ms": backward * 1e3}


def run_current_backend() -> dict:
    report = bench_kernels()
    report.update(bench_pipeline())
    return report


def main() -> None:
    if os.environ.get("FOLIJET_BENCH_CHILD"):
        print(json.dumps(run_current_backend()))
        return
    here = run_current_backend()
    env = dict(os.environ, FOLIJET_PURE_PYTHON="1", FOLIJET_BENCH_CHILD="1")
    child = subprocess.run([sys.executable, __file__], env=env,
                           capture_output=True, text=True, check=True)
    other = json.loads(child.stdout.strip().splitlines()[-1])
    columns = [here, other] if here["backend"] != other["backend"] else [here]
    names = [c["backend"] for c in columns]
    print(f"{'metric':<18}" + "".join(f"{n:>14}" for n in names)
          + ("" if len(columns) == 1 else f"{'speedup':>10}"))
    for key, unit in (("axis_mul_us", "us"), ("taylor_shift_us", "us"),
                      ("row_product_us", "us"), ("forward_ms", "ms"),
                      ("realize_ms", "ms")):
        vals = [c[key] for c in columns]
        line = f"{key:<18}" + "".join(f"{v:>12.1f} {unit[:2]}" for v in vals)
        if len(vals) == 2:
            line += f"{vals[1] / vals[0]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
