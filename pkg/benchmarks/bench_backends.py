#!/usr/bin/env python3
"""Compare the compiled kernels against the numpy fallback.

Times the raw kernels on prepared inputs, then the end-to-end trial pipeline
with each backend wired into the estimator, and verifies along the way that
the two produce identical results. Run after `pip install -e .`:

    python benchmarks/bench_backends.py [--trials N] [--steps N] [--grid M]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from belllab import _core_py
from belllab import estimator
from belllab.backend import COMPILED_AVAILABLE
from belllab.quantum import make_singlet
from belllab.hvmodels import make_conditional_malus, make_factorized_sign

if COMPILED_AVAILABLE:
    from belllab import _core
else:
    _core = None


def timeit(fn, repeat):
    best = math.inf
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def fmt_row(name, py_t, c_t, agree):
    if c_t is None:
        return f"{name:<28} {py_t * 1e3:>10.2f} ms {'-':>12} {'-':>8} {agree}"
    return (f"{name:<28} {py_t * 1e3:>10.2f} ms {c_t * 1e3:>9.2f} ms "
            f"{py_t / c_t:>7.1f}x {agree}")


def bench_kernels(n, steps, grid, repeat):
    rng = np.random.default_rng(1234)
    rows = []

    cases = []
    x = rng.uniform(-1, 1, n)
    cases.append(("signs_pm1", lambda k: k.signs_pm1(x)))
    p, u = rng.random(n), rng.random(n)
    cases.append(("bernoulli_pm1", lambda k: k.bernoulli_pm1(p, u)))
    pb, ub, pp, pm, ua = (rng.random(n) for _ in range(5))
    cases.append(
        ("conditional_outcomes", lambda k: k.conditional_outcomes(pb, ub, pp, pm, ua))
    )
    cases.append(
        ("four_outcome_pairs", lambda k: k.four_outcome_pairs(0.25, 0.5, 0.75, u))
    )
    a8, b8 = _core_py.four_outcome_pairs(0.25, 0.5, 0.75, u)
    cases.append(("pair_counts", lambda k: k.pair_counts(a8, b8)))
    cases.append(("product_sum", lambda k: k.product_sum(a8, b8)))
    cases.append(
        ("leapfrog_trajectory",
         lambda k: k.leapfrog_trajectory(1.0, 1.0, 0.1, 1.0, 0.0, 0.0, 0.0,
                                         0.0095, steps))
    )
    e_grid = np.ascontiguousarray(rng.uniform(-1, 1, (grid, grid)))
    cases.append(("max_abs_form", lambda k: k.max_abs_form(e_grid)))

    for name, call in cases:
        py_t, py_res = timeit(lambda: call(_core_py), repeat)
        if _core is None:
            rows.append(fmt_row(name, py_t, None, ""))
            continue
        c_t, c_res = timeit(lambda: call(_core), repeat)
        agree = check_equal(py_res, c_res)
        rows.append(fmt_row(name, py_t, c_t, agree))
    return rows


def check_equal(a, b):
    def eq(x, y):
        if isinstance(x, np.ndarray):
            return np.array_equal(x, y)
        return x == y

    if isinstance(a, tuple):
        ok = all(eq(x, y) for x, y in zip(a, b))
    else:
        ok = eq(a, b)
    return "identical" if ok else "MISMATCH"


def bench_pipeline(n, repeat):
    """End-to-end seeded tallies with each backend wired into the estimator."""
    rows = []
    models = [
        ("singlet tally", make_singlet()),
        ("sign-model tally", make_factorized_sign()),
        ("malus tally", make_conditional_malus()),
    ]
    saved = estimator.kernels
    try:
        for name, model in models:
            estimator.kernels = _core_py
            py_t, py_res = timeit(
                lambda: estimator.simulate_tally(model, 0.0, math.pi / 8, n, seed=7),
                repeat,
            )
            if _core is None:
                rows.append(fmt_row(name, py_t, None, ""))
                continue
            estimator.kernels = _core
            c_t, c_res = timeit(
                lambda: estimator.simulate_tally(model, 0.0, math.pi / 8, n, seed=7),
                repeat,
            )
            rows.append(fmt_row(name, py_t, c_t,
                                "identical" if py_res == c_res else "MISMATCH"))
    finally:
        estimator.kernels = saved
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=1_000_000,
                        help="array length / trial count (default 1e6)")
    parser.add_argument("--steps", type=int, default=100_000,
                        help="leapfrog steps (default 1e5)")
    parser.add_argument("--grid", type=int, default=48,
                        help="angle grid size for the CHSH scan (default 48)")
    parser.add_argument("--repeat", type=int, default=3,
                        help="repetitions, best-of (default 3)")
    args = parser.parse_args()

    if not COMPILED_AVAILABLE:
        print("compiled kernels not built; timing the numpy fallback only\n")
    header = f"{'kernel':<28} {'python':>13} {'compiled':>12} {'speedup':>8} result"
    print(header)
    print("-" * len(header))
    for row in bench_kernels(args.trials, args.steps, args.grid, args.repeat):
        print(row)
    print()
    print("end-to-end (n = {:,} trials per tally)".format(args.trials))
    print("-" * len(header))
    for row in bench_pipeline(args.trials, args.repeat):
        print(row)


if __name__ == "__main__":
    main()
