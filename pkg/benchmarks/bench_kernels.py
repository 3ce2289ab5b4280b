"""Time the dense kernels on both backends.

    python3 benchmarks/bench_kernels.py [--sizes 6 8 10] [--repeat 5]

Reports the best-of-``repeat`` wall time for one collective-operator
application on a density matrix, one trace contraction, and a full
one-photon postselection step, per backend.
"""
import argparse
import time

import numpy as np

from postselect_squeeze import _kernels_py, kernels


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def postselect_step(backend, rho, w):
    zero = np.zeros_like(w)
    half = backend.apply_site_sum(rho, w, zero, zero)
    return backend.apply_site_sum(np.ascontiguousarray(half.conj().T), w, zero, zero)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    backends = {"numpy": _kernels_py}
    if "cython" in kernels.BACKENDS:
        backends["cython"] = kernels.BACKENDS["cython"]
    else:
        print("compiled extension not built; timing the numpy backend only")

    print(f"{'n':>3} {'kernel':<12} " + " ".join(f"{b:>12}" for b in backends) + "   speedup")
    for n in args.sizes:
        dim = 1 << n
        rho = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        a, b, c = (rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(3))
        cases = {
            "apply": lambda be: be.apply_site_sum(rho, a, b, c),
            "trace": lambda be: be.trace_site_sum(rho, a, b, c),
            "postselect": lambda be: postselect_step(be, rho, a),
        }
        for name, fn in cases.items():
            times = {k: best_time(lambda: fn(be), args.repeat) for k, be in backends.items()}
            speed = times["numpy"] / times["cython"] if "cython" in times else float("nan")
            cells = " ".join(f"{times[k] * 1e3:10.2f}ms" for k in backends)
            print(f"{n:>3} {name:<12} {cells}   {speed:6.2f}x")


if __name__ == "__main__":
    main()
