"""Benchmark: compiled evaluation kernel versus the pure-numpy fallback.

Times CompiledPoly.__call__ (whichever kernel was selected at import, which
should be the compiled one) against CompiledPoly.eval_pure on random
polynomials across a range of sizes, and checks the outputs agree.

Run:  python benchmarks/bench_eval.py
"""

import time

import numpy as np

from ncgeom.evaluate import KERNEL, CompiledPoly, MatrixTuple
from ncgeom.ncpoly import NcPolynomial, words_up_to


def random_poly(rng, g, d, delta, n_terms):
    words = list(words_up_to(g, d))
    terms = {}
    for _ in range(n_terms):
        terms[words[rng.integers(0, len(words))]] = rng.standard_normal(
            (delta, delta))
    return NcPolynomial(g, delta, delta, terms)


def bench(cp, X, fn, repeats):
    fn(X)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(X)
    return (time.perf_counter() - t0) / repeats


def main():
    rng = np.random.default_rng(0)
    print(f"selected kernel: {KERNEL}")
    print(f"{'case':<28} {'compiled':>12} {'pure':>12} {'speedup':>9}")
    cases = [
        (2, 2, 1, 6, 4, 2000),
        (2, 4, 1, 12, 8, 500),
        (3, 4, 2, 20, 16, 100),
        (2, 6, 2, 30, 32, 20),
        (3, 5, 3, 40, 64, 5),
    ]
    for g, d, delta, n_terms, n, repeats in cases:
        p = random_poly(rng, g, d, delta, n_terms)
        cp = CompiledPoly(p)
        mats = rng.standard_normal((g, n, n))
        X = MatrixTuple((mats + mats.transpose(0, 2, 1)) / 2.0)
        dev = np.max(np.abs(cp(X) - cp.eval_pure(X)))
        assert dev < 1e-10, f"kernels disagree by {dev:.2e}"
        tc = bench(cp, X, cp.__call__, repeats)
        tp = bench(cp, X, cp.eval_pure, repeats)
        label = f"g={g} d={d} delta={delta} n={n}"
        print(f"{label:<28} {tc * 1e6:>10.1f}us {tp * 1e6:>10.1f}us "
              f"{tp / tc:>8.2f}x")


if __name__ == "__main__":
    main()
