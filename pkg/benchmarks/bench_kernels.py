"""Time the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Each row reports the best
of several repeats and the speedup of the compiled backend.
"""

import argparse
import timeit

import numpy as np

from witnesskit import _pykernels, kernels
from witnesskit.bell import klyshko_coefficients
from witnesskit.sampling import random_product_batch

try:
    from witnesskit import _ckernels
except ImportError:
    _ckernels = None


def _cases(rng):
    for dims in [(2, 2), (3, 3), (2, 2, 2), (2, 2, 2, 2)]:
        d = int(np.prod(dims))
        h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = h + h.conj().T
        vecs = random_product_batch(dims, 1, rng)[0]
        batch = random_product_batch(dims, 1000, rng)
        yield f"seesaw_contract {dims}", lambda impl, h=h, dims=dims, v=vecs: kernels.seesaw_contract(
            h, dims, v, 0, impl=impl
        )
        yield f"product_expectations {dims} x1000", lambda impl, h=h, dims=dims, b=batch: (
            kernels.product_expectations(h, dims, b, impl=impl)
        )
    for n in [3, 5, 7]:
        corr = rng.normal(size=(3,) * n)
        dirs = rng.normal(size=(n, 2, 3))
        coeffs = klyshko_coefficients(n)
        yield f"klyshko_fields n={n}", lambda impl, c=corr, k=coeffs, d=dirs: kernels.klyshko_fields(
            c, k, d, 0, impl=impl
        )


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--number", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<38}{'python us':>12}{'cython us':>12}{'speedup':>10}")
    for name, fn in _cases(rng):
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=args.number, repeat=args.repeat))
        t_py = 1e6 * t_py / args.number
        if _ckernels is None:
            print(f"{name:<38}{t_py:>12.2f}{'n/a':>12}{'n/a':>10}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=args.number, repeat=args.repeat))
        t_c = 1e6 * t_c / args.number
        print(f"{name:<38}{t_py:>12.2f}{t_c:>12.2f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
