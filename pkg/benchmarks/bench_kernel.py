#!/usr/bin/env python3
"""Benchmark the compiled kernel against its pure-Python twin.

Three workloads, matching how the library actually spends time:
  enum      backtracking enumeration of stratum-monotone binary maps
            on the four-element diamond (the exhaustive identity tier)
  dagger    a stratified fixed point sweep over every enumerated map
  check     monotonicity checks of random tables on the 49-element
            two-atom truth model (the randomized identity tier)

Usage: python3 benchmarks/bench_kernel.py [--repeat N]
"""

import argparse
import time

from stratfix import _kernel_py as pure
from stratfix import functions as FN
from stratfix import models as M

try:
    from stratfix import _kernel as compiled
except ImportError:
    compiled = None


def bench(fn, repeat):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def workloads():
    diamond = M.diamond_model(2)
    dpack = diamond.kernel_pack()
    dom2 = FN.domain_pack((diamond, diamond))
    d2 = diamond.n * diamond.n

    tables = pure.enum_monotone(d2, diamond.n, diamond.kappa, dom2, dpack["sq"])

    truth = M.truncated_truth_model(2, ["p", "q"])
    tpack = truth.kernel_pack()
    tdom = FN.domain_pack((truth,))
    # monotone tables force a full scan (non-monotone ones bail early)
    full_scan_tables = [
        bytes([c]) * truth.n for c in range(truth.n)
    ] * 7 + [bytes(range(truth.n))] * 7

    def enum(kernel):
        kernel.enum_monotone(d2, diamond.n, diamond.kappa, dom2, dpack["sq"])

    def dagger(kernel):
        for t in tables:
            kernel.dagger_table(
                t, diamond.n, diamond.n, diamond.kappa,
                dpack["sq"], dpack["join"], dpack["restrict"],
                dpack["bottom"],
            )

    def check(kernel):
        for t in full_scan_tables:
            kernel.check_monotone(
                t, truth.n, truth.n, truth.kappa, tdom, tpack["sq"]
            )

    return [
        (f"enum ({len(tables)} maps)", enum),
        (f"dagger sweep ({len(tables)} maps x {diamond.n} params)", dagger),
        (f"check ({len(full_scan_tables)} tables, 49 elements)", check),
    ]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"{'workload':<44} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for name, work in workloads():
        t_pure = bench(lambda: work(pure), args.repeat)
        if compiled is None:
            print(f"{name:<44} {t_pure:>9.3f}s {'n/a':>10} {'n/a':>8}")
            continue
        t_comp = bench(lambda: work(compiled), args.repeat)
        print(
            f"{name:<44} {t_pure:>9.3f}s {t_comp:>9.3f}s "
            f"{t_pure / t_comp:>7.1f}x"
        )
    if compiled is None:
        print("\ncompiled kernel not built; showing the pure lane only")


if __name__ == "__main__":
    main()
