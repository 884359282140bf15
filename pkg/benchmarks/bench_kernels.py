"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from karica import _fallback, kernels


def cases(rng):
    n = 64 * 64
    valid = rng.random(n) < 0.8
    succ = np.where(valid, rng.integers(-1, n, n), -1)
    # a long chain, the worst case for pointer doubling
    chain = np.arange(1, n + 1)
    chain[-1] = -1
    op = (np.arange(4)[:, None] + np.arange(4)[None, :]) % 4
    gamma = rng.integers(0, 4, (256, n))
    return {
        "path_lengths random": lambda m: m.path_lengths(succ, valid, 64),
        "path_lengths chain": lambda m: m.path_lengths(chain, np.ones(n, bool), n),
        "step_batch 256x4096": lambda m: m.step_batch(op, gamma, succ),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = {"python": _fallback}
    if kernels.BACKEND == "cython":
        from karica import _kernels
        impls["cython"] = _kernels
    else:
        print("compiled kernels not built; timing the fallback only")
    print(f"{'case':24} " + " ".join(f"{k:>10}" for k in impls))
    for name, fn in cases(np.random.default_rng(0)).items():
        times = [min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeat)) for m in impls.values()]
        print(f"{name:24} " + " ".join(f"{t * 1e3:9.2f}ms" for t in times))


if __name__ == "__main__":
    main()
