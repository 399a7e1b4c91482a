"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--sizes 1000 10000 100000] [--repeat 3]
"""

import argparse
import timeit

import numpy as np

from tracetrim import _pykernels, kernels


def lloyd_input(n, rng):
    xs = np.concatenate([rng.normal(200, 20, n - n // 5), rng.normal(800, 50, n // 5)])
    rng.shuffle(xs)
    return xs


def stream_input(n, rng, n_ctx=8):
    # shaped like a first-tier log: BEGIN, client RECEIVE, SEND, END per request
    reqs = n // 4
    atype = np.tile(np.array([0, 3, 2, 1], dtype=np.int8), reqs)
    ctx = np.repeat(rng.integers(0, n_ctx, reqs), 4)
    dst = np.tile(np.array([-1, 80, 41000, -1]), reqs)
    size = np.repeat(np.where(rng.random(reqs) < 0.8, 200, 800), 4) * (atype >= 2)
    return atype, ctx, dst, size, n_ctx


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    impls = {"python": _pykernels}
    if kernels.BACKEND == "cython":
        impls["cython"] = kernels.BACKENDS["cython"]
    else:
        print("compiled kernels not built; timing the fallback only")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'n':>9}" + "".join(f"{name + ' ms':>13}" for name in impls) + f"{'speedup':>10}")
    for n in args.sizes:
        xs = lloyd_input(n, rng)
        stream = stream_input(n, rng)
        cases = {
            "lloyd_two_means": lambda m: m.lloyd_two_means(xs, 100),
            "elimination_mask": lambda m: m.elimination_mask(*stream, 500.0, 80),
        }
        for label, fn in cases.items():
            times = {
                name: min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) * 1e3
                for name, mod in impls.items()
            }
            speed = f"{times['python'] / times['cython']:.1f}x" if "cython" in times else "-"
            print(f"{label:<18}{n:>9}" + "".join(f"{t:>13.2f}" for t in times.values()) + f"{speed:>10}")


if __name__ == "__main__":
    main()
