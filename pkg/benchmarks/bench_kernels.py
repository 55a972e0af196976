"""Numba kernels vs their pure-numpy twins.

Times the two hot kernels directly, then runs a small end-to-end workload
(grand norms on a quadrature space and primal solves on atomic spaces) in
subprocesses with BSLSPACES_PURE_NUMPY=0 and =1.

    python benchmarks/bench_kernels.py [--repeat 20]
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from bslspaces import _kernels

WORKLOAD = """
import time, numpy as np
from bslspaces import BACKEND, MeasureSpace, SampledFunction, PsiFunction, grand_norm, sl_norm_primal
psi = PsiFunction.zeta(1.0, 3.0, 1.0, 2.0)
sp = MeasureSpace.real_line()
f = SampledFunction.from_log(sp, -0.4 * sp.log_r - 0.1 * sp.log_r ** 2)
grand_norm(f, psi)
rng = np.random.default_rng(0)
t = time.perf_counter()
for _ in range(20):
    grand_norm(f, psi)
tg = time.perf_counter() - t
t = time.perf_counter()
vals = []
for _ in range(10):
    a = MeasureSpace.atomic(rng.uniform(0.1, 2, 4))
    vals.append(sl_norm_primal(SampledFunction.from_values(a, rng.uniform(-1, 1, 4)), psi).value)
tp = time.perf_counter() - t
print(BACKEND, tg, tp, repr(float(sum(vals))))
"""


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def kernel_table(repeat):
    rng = np.random.default_rng(1)
    n = 2048
    logw = rng.normal(size=n)
    logabs = rng.normal(size=n)
    edge = np.zeros(n, dtype=bool)
    edge[:16] = True
    ps = np.linspace(1.01, 6.0, 128)
    w = rng.uniform(0.1, 2.0, 4)
    y = rng.uniform(0.0, 1.0, 4)
    grid = np.linspace(1.05, 2.95, 64)
    cases = [
        ("log_moments 2048 nodes x 128 p", lambda: _kernels.log_moments(logw, logabs, ps, edge),
         lambda: _kernels.log_moments_np(logw, logabs, ps, edge)),
        ("norms_and_gradients 4 atoms x 64 p", lambda: _kernels.norms_and_gradients(w, y, grid),
         lambda: _kernels.norms_and_gradients_np(w, y, grid)),
    ]
    print(f"backend in this process: {_kernels.BACKEND}")
    print(f"{'kernel':40s} {'numba':>12s} {'numpy':>12s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, fast, slow in cases:
        a, b = fast(), slow()
        diff = max(float(np.max(np.abs(x - z) / np.maximum(np.abs(z), 1e-300)))
                   for x, z in zip(a, b) if np.all(np.isfinite(z)))
        tf, ts = best_of(fast, repeat), best_of(slow, repeat)
        print(f"{name:40s} {tf * 1e6:10.1f}us {ts * 1e6:10.1f}us {ts / tf:8.2f} {diff:13.2e}")


def end_to_end():
    print("\nend to end (20 grand norms, 10 primal solves):")
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, BSLSPACES_PURE_NUMPY=flag)
        res = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True,
                             text=True, check=True)
        backend, tg, tp, total = res.stdout.split()
        out[backend] = total
        print(f"  {backend:6s} grand {float(tg):7.3f}s  primal {float(tp):7.3f}s  checksum {total}")
    vals = [float(v) for v in out.values()]
    print(f"  checksum rel diff {abs(vals[0] - vals[-1]) / abs(vals[-1]):.2e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    kernel_table(ap.parse_args().repeat)
    end_to_end()
