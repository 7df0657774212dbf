"""Compare the compiled and pure-Python polynomial kernels.

Runs the workload behind ``udisc sweep`` and ``udisc asp``: every PSP block
polynomial of one configuration evaluated over many overlaps.

    python3 benchmarks/bench_kernels.py [--points 20000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from udisc import _pykernels
from udisc.discriminator import CopyConfig, Priors, _plan

try:
    from udisc import _kernels as _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    cos2 = rng.random(args.points)
    sin2 = 1.0 - cos2
    print(f"{'config':>12} {'blocks':>6} {'python s':>10} {'cython s':>10} {'speedup':>8} {'max |diff|':>11}")
    for key in [(1, 1, 1), (3, 2, 3), (6, 4, 6), (10, 2, 4)]:
        plan = _plan(CopyConfig(*key), Priors(0.4))
        work = (plan.coeffs, plan.vexp, plan.weights, cos2, sin2)
        t_py, ref = best_of(lambda: _pykernels.weighted_blocks(*work), args.repeat)
        if _ckernels is None:
            print(f"{str(key):>12} {len(plan.rows):>6} {t_py:>10.4f} {'n/a':>10}")
            continue
        t_c, out = best_of(lambda: _ckernels.weighted_blocks(*work), args.repeat)
        diff = float(np.max(np.abs(out - ref)))
        print(f"{str(key):>12} {len(plan.rows):>6} {t_py:>10.4f} {t_c:>10.4f} {t_py / t_c:>8.1f} {diff:>11.1e}")


if __name__ == "__main__":
    main()
