"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each row runs the same inputs through both backends, checks that the
results are identical and reports the best-of-N wall time.
"""

import argparse
import itertools
import sys
import time

import numpy as np

from hypercount._kernels import compiled_backend, python_backend
from hypercount.core import RngStream, make_params
from hypercount.configmodel import sample_configuration


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def perms(n, limit=None):
    rows = itertools.permutations(range(n))
    if limit:
        rows = itertools.islice(rows, limit)
    return np.array(list(rows), dtype=np.int64)


def random_perms(p, count, seed):
    out = []
    for k in range(count):
        c = sample_configuration(p, RngStream(seed, k))
        out.append(c.perms[0])
    return np.array(out, dtype=np.int64)


def cases(quick):
    yield "subsets r=3 m=3 d=4", lambda b: b.count_regular_subsets(3, 3, 4)
    yield "subsets r=2 m=5 d=2", lambda b: b.count_regular_subsets(2, 5, 2)
    if not quick:
        yield "subsets r=4 m=2 d=4", lambda b: b.count_regular_subsets(4, 2, 4)
    P6 = perms(6)
    yield "profile r=3 m=3 d=2", lambda b: b.profile_histogram(3, 3, 2, P6)
    P8 = perms(8, 20 if quick else 100)
    yield f"census m=4 d=2 ({len(P8)} rows)", lambda b: b.switching_census(4, 2, P8)
    R = random_perms(make_params(3, 8, 2), 2 if quick else 8, seed=7)
    yield f"census m=8 d=2 ({len(R)} rows)", lambda b: b.switching_census(8, 2, R)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)

    if compiled_backend is None:
        print("compiled kernels are not built; only the fallback can run", file=sys.stderr)
        return 1
    print(f"{'case':34s} {'python (s)':>11s} {'compiled (s)':>13s} {'speedup':>9s}  match")
    ok = True
    for name, fn in cases(args.quick):
        tp, rp = best_time(lambda: fn(python_backend), 1)
        tc, rc = best_time(lambda: fn(compiled_backend), args.repeat)
        match = same(rp, rc)
        ok &= match
        print(f"{name:34s} {tp:11.4f} {tc:13.5f} {tp / max(tc, 1e-9):9.1f}  {'yes' if match else 'NO'}", flush=True)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
