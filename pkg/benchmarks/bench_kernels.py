#!/usr/bin/env python3
"""Benchmark: compiled kernel extension vs the pure-Python fallback.

Times the hot array kernels on a quadrature-node-sized workload, then the
end-to-end certification paths in subprocesses (so BECERT_PURE can switch
the backend selector).

Run: python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from becert.constants import UNIVERSAL


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_kernels(repeat):
    from becert import _kernels_py
    backends = [("python", _kernels_py)]
    try:
        from becert import _kernels
        backends.insert(0, ("compiled", _kernels))
    except ImportError:
        print("compiled extension unavailable; benchmarking pure backend only")

    ts = np.linspace(1e-6, 12.0, 1_000_000)
    ts_open = np.linspace(1e-6, 1.0 - 1e-6, 1_000_000)
    cases = [
        ("chi_arr(1e6)", lambda m: m.chi_arr(ts, 0.985)),
        ("f2_arr(1e6)", lambda m: m.f2_arr(ts, 0.985)),
        ("fmaj_arr(1e6, n=200)", lambda m: m.fmaj_arr(ts, 0.985, 200)),
        ("inner_g_finite_arr(1e6, n=5)", lambda m: m.inner_g_finite_arr(ts, 1.08, 5)),
        ("smoothing_weight_arr(1e6)", lambda m: m.smoothing_weight_arr(ts_open)),
        ("rtilde3_arr(1e6)", lambda m: m.rtilde3_arr(ts, 0.985)),
    ]
    header = f"{'kernel':<32}" + "".join(f"{name:>14}" for name, _ in backends)
    if len(backends) == 2:
        header += "ratio".rjust(10)
    print(header)
    for label, call in cases:
        times = []
        for _, mod in backends:
            mod.configure(UNIVERSAL.theta0, UNIVERSAL.kappa)
            times.append(_best_of(lambda m=mod: call(m), repeat))
        row = f"{label:<32}" + "".join(f"{t * 1e3:>11.1f} ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)


END_TO_END = {
    "theorem-1 point (n=5 finite)":
        "certifier.evaluate_certificate(0.822, 0.425, ('finite', 5), 0.385, 5.755)",
    "uniform optimize (eps=0.985)":
        "certifier.optimize_t0_T(0.985, 1.0, ('uniform', 200))",
    "C(0.5) uniform-tail":
        "certifier.c_of_epsilon(0.5, 1.0, certifier.SweepPolicy())",
}

_TIMER = """
import time
from becert import certifier
{stmt}
best = 1e9
for _ in range({repeat}):
    t = time.perf_counter()
    {stmt}
    best = min(best, time.perf_counter() - t)
print(best)
"""


def bench_end_to_end(repeat):
    print()
    print(f"{'end-to-end (excludes import)':<32}{'compiled':>14}{'python':>14}"
          f"{'ratio':>10}")
    for label, stmt in END_TO_END.items():
        times = []
        for pure in (False, True):
            env = dict(os.environ)
            env.pop("BECERT_PURE", None)
            if pure:
                env["BECERT_PURE"] = "1"
            code = _TIMER.format(stmt=stmt, repeat=repeat)
            out = subprocess.run([sys.executable, "-c", code], env=env,
                                 capture_output=True, text=True, check=True)
            times.append(float(out.stdout.strip()))
        print(f"{label:<32}{times[0] * 1e3:>11.1f} ms{times[1] * 1e3:>11.1f} ms"
              f"{times[1] / times[0]:>9.1f}x")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    bench_kernels(args.repeat)
    bench_end_to_end(args.repeat)
