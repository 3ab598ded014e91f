"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--n 256] [--repeat 5]
"""
import argparse
import time

import numpy as np

from wams import kernels


def _system(rng, ny, nx):
    diag = rng.uniform(0.01, 0.1, (ny, nx))
    ex = rng.uniform(1.0, 5.0, (ny, nx - 1))
    ey = rng.uniform(1.0, 5.0, (ny - 1, nx)) if ny > 1 else np.zeros((0, nx))
    return diag, ex, ey


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n, rng):
    diag, ex, ey = _system(rng, n, n)
    x = rng.standard_normal((n, n))
    d1, e1, _ = _system(rng, 1, n * n)
    b1 = rng.standard_normal(n * n)
    px, py = rng.uniform(-1, 1, (2, n * n))
    segs = rng.uniform(-1, 1, (16, 4))
    return {
        f"edge_apply {n}x{n}": lambda k: k.edge_apply(x, diag, ex, ey),
        f"pcg {n}x{n} (200 it)": lambda k: k.pcg(diag, ex, ey, x, np.zeros_like(x), 1e-30, 200),
        f"tridiag_solve {n * n}": lambda k: k.tridiag_solve(d1.ravel(), e1.ravel(), b1),
        f"segment_distance {n * n} pts x 16": lambda k: k.segment_distance(px, py, segs),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256, help="grid side length")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = {"python": kernels.get_backend("python")}
    try:
        backends["cython"] = kernels.get_backend("cython")
    except ImportError:
        print("compiled extension not built; timing the numpy fallback only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}")
    for name, fn in cases(args.n, rng).items():
        t = {b: _best(lambda: fn(k), args.repeat) for b, k in backends.items()}
        speed = f"{t['python'] / t['cython']:9.1f}x" if "cython" in t else ""
        print(f"{name:36s}" + "".join(f"{t[b] * 1e3:10.2f}ms" for b in backends) + f" {speed}")


if __name__ == "__main__":
    main()
