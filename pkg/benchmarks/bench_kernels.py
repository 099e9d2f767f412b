"""Compare the compiled and pure-Python kernel backends.

Usage: python benchmarks/bench_kernels.py [--sizes 100 1000 10000] [--repeat 5]
"""
import argparse
import subprocess
import sys
import time

import numpy as np

from mmfuse import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(n, rng):
    values = np.round(rng.normal(size=n), 2)
    labels = rng.integers(0, 2, n).astype(np.intp)
    a, b = rng.integers(0, 4, n).astype(np.intp), rng.integers(0, 3, n).astype(np.intp)
    positive = labels == 0
    return {
        "best_split": lambda be: kernels.best_split(values, labels, 2, 1, backend=be),
        "foil_best": lambda be: kernels.foil_best(values, positive, backend=be),
        "midranks": lambda be: kernels.midranks(values, backend=be),
        "contingency": lambda be: kernels.contingency(a, b, 4, 3, backend=be),
    }


def cv_time(backend):
    """Wall time of a merge_all grid in a fresh interpreter pinned to ``backend``."""
    code = ("import time; from mmfuse.harness import default_config, run_pipeline;"
            "t=time.perf_counter(); run_pipeline(default_config(env={}, modes=('merge_all',)));"
            "print(time.perf_counter()-t)")
    env = {"MMFUSE_PURE_PYTHON": "1" if backend == "python" else "0", "PATH": ""}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--no-cv", action="store_true", help="skip the end-to-end grid timing")
    args = ap.parse_args(argv)
    try:
        kernels.get_backend("cython")
    except ImportError:
        print("compiled backend not built; run `pip install -e . --no-build-isolation` first")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12} {'n':>7} {'cython ms':>10} {'python ms':>10} {'speedup':>8}")
    for n in args.sizes:
        for name, fn in kernel_cases(n, rng).items():
            tc = best_of(lambda: fn(kernels.get_backend("cython")), args.repeat)
            tp = best_of(lambda: fn(kernels.get_backend("python")), args.repeat)
            print(f"{name:<12} {n:>7} {tc * 1e3:>10.3f} {tp * 1e3:>10.3f} {tp / tc:>7.1f}x")
    if not args.no_cv:
        tc, tp = cv_time("cython"), cv_time("python")
        print(f"\nmerge_all grid (12 cells, 10-fold CV): cython {tc:.2f}s, python {tp:.2f}s, "
              f"speedup {tp / tc:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
