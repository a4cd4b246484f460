"""Time the compiled kernels against the pure-Python fallback.

Run after installing the package::

    python benchmarks/bench_kernels.py

Measures the three right-hand-side kernels on representative states and a
full stiff integration of a cooling pulse with each backend.
"""

import time

import numpy as np

from nvcool import kernels, kernels_py
from nvcool.cumulant import Phase, integrate, thermal_state
from nvcool.params import preset


def time_call(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_rhs():
    rng = np.random.default_rng(7)
    params = preset("high-frequency")
    from nvcool.cumulant import pack_params
    par = pack_params(params, xi=1e5)

    cases = [
        ("undriven (12-dim)", "undriven_rhs_flat", kernels.N_UNDRIVEN),
        ("driven   (30-dim)", "driven_rhs_flat", kernels.N_DRIVEN),
        ("rate     (8-dim)", "rate_rhs_flat", kernels.N_RATE),
    ]
    n_calls = 20000
    print(f"kernel throughput ({n_calls} calls each)")
    for label, name, dim in cases:
        y = rng.uniform(0.0, 0.2, size=dim)
        y[7] = 650.0
        out = np.empty(dim)

        def many(fn, y=y, out=out):
            for _ in range(n_calls):
                fn(y, out, par)

        row = [label]
        timings = {}
        for backend_label, module in (("python", kernels_py),):
            timings[backend_label] = time_call(many, getattr(module, name))
        if kernels.BACKEND == "cython":
            from nvcool import _kernels
            timings["cython"] = time_call(many, getattr(_kernels, name))
        py = timings["python"]
        line = f"  {label}: python {py / n_calls * 1e6:8.3f} us/call"
        if "cython" in timings:
            cy = timings["cython"]
            line += (f"   cython {cy / n_calls * 1e6:8.3f} us/call"
                     f"   speedup x{py / cy:.1f}")
        print(line)


def bench_integration():
    import os
    params = preset("high-frequency")
    phases = [Phase(0.0, 0.02, xi=2195.9), Phase(0.02, 0.04, xi=0.0)]
    state = thermal_state(params)

    def run():
        integrate(params, state, phases, points_per_phase=200)

    print(f"\ncooling-pulse integration (backend: {kernels.BACKEND})")
    print(f"  active backend: {time_call(run, repeat=3) * 1e3:9.1f} ms")
    if kernels.BACKEND == "cython":
        print("  (set NVCOOL_PURE_PYTHON=1 and rerun to time the fallback)")
    elif os.environ.get("NVCOOL_PURE_PYTHON"):
        print("  (unset NVCOOL_PURE_PYTHON to time the compiled backend)")


if __name__ == "__main__":
    print(f"selected backend: {kernels.BACKEND}")
    bench_rhs()
    bench_integration()
