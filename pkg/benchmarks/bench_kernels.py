"""Compare the compiled and pure-Python numeric kernels.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Prints the
best-of-N wall time per call for each backend and the speed-up.
"""
import argparse
import timeit

import numpy as np

from ktt import _pykernels

try:
    from ktt import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases(rng):
    u = rng.uniform(-8, 8, 2000)
    s = np.linspace(0.0, 1.3, 2000)
    x = rng.uniform(0, 20, 2000)
    p = rng.uniform(0, 1, 2000)
    z = rng.normal(size=2000)
    return {
        "fresnel (2000 pts)": lambda k: k.fresnel(u),
        "gfresnel (scalar, nk=3)": lambda k: k.gfresnel(3, 2.5, -1.2),
        "clothoid_xy (2000 pts)": lambda k: k.clothoid_xy(0.1, 0.2, 0.3, 1.5, -2.0, s),
        "gammainc (2000 pts)": lambda k: k.gammainc(3.5, x),
        "betainc (2000 pts)": lambda k: k.betainc(2.5, 4.0, p),
        "norm_cdf (2000 pts)": lambda k: k.norm_cdf(z),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<26} {'python':>12} {'cython':>12} {'speed-up':>9}")
    for name, fn in cases(rng).items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=args.number,
                                 repeat=args.repeat)) / args.number
        if _ckernels is None:
            print(f"{name:<26} {t_py * 1e6:10.1f}us {'n/a':>12} {'n/a':>9}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=args.number,
                                repeat=args.repeat)) / args.number
        print(f"{name:<26} {t_py * 1e6:10.1f}us {t_c * 1e6:10.1f}us {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
