"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run on identical inputs with both backends; the outputs are
checked for bit-identity before any timing is reported.
"""
import argparse
import itertools
import timeit

import numpy as np

from chaos_bounds import kernels
from chaos_bounds.distributions import sharpness_form


def cases():
    rng = np.random.default_rng(0)
    w = rng.integers(-3, 4, size=1 << 20).astype(np.float64)
    keys = np.array(list(itertools.combinations(range(12), 3)), dtype=np.int64)
    coeffs = rng.integers(-3, 4, size=len(keys)).astype(np.float64)
    x = 2.0 * rng.integers(0, 2, size=(20_000, 12)) - 1.0
    xs = 2.0 * rng.integers(0, 2, size=(20_000, 160)) - 1.0
    return [
        ("walsh_hadamard n=20", lambda pure: kernels.walsh_hadamard(w, pure=pure)),
        ("evaluate_batch k=3 n=12 B=20000", lambda pure: kernels.evaluate_batch(keys, coeffs, x, pure=pure)),
        ("elementary_symmetric k=2 n=160 B=20000", lambda pure: kernels.elementary_symmetric(xs, 2, pure=pure)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    print(f"compiled backend available: {kernels.BACKEND == 'cython'}")
    print(f"{'kernel':42s} {'cython ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, fn in cases():
        if not np.array_equal(fn(False), fn(True)):
            raise SystemExit(f"{name}: backends disagree")
        fast = min(timeit.repeat(lambda: fn(False), number=1, repeat=args.repeat)) * 1e3
        slow = min(timeit.repeat(lambda: fn(True), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:42s} {fast:10.2f} {slow:10.2f} {slow / fast:7.1f}x")
    form = sharpness_form(2, 160, 1.0)
    print(f"(sharpness form with n=160 has {len(form.coeffs)} keys; the uniform path avoids them)")


if __name__ == "__main__":
    main()
