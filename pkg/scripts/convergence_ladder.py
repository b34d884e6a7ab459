#!/usr/bin/env python3
"""Trend of normalized completion time over a geometric N ladder.

For each protocol, prints mean(T_n)/ln N and its ratio to the predicted
constant per rung; the ratio should drift toward 1 from above as N grows
(slowly: the correction terms die off like 1/ln N).
"""
import argparse

from gossipsim.core import Algorithm
from gossipsim.harness import convergence_sweep
from gossipsim.theory import constant


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", type=float, default=0.5)
    parser.add_argument("--exponents", type=int, nargs="+",
                        default=[14, 17, 20])
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=1729)
    args = parser.parse_args()

    ladder = [2 ** e for e in args.exponents]
    for alg in (Algorithm.NAIVE, Algorithm.CYCLIC, Algorithm.IMPROVED_CYCLIC):
        rows = convergence_sweep(alg, args.p, ladder, trials=args.trials,
                                 base_seed=args.seed)
        print(f"{alg.value}  (C({args.p}) = {constant(alg, args.p):.4f})")
        print(f"  {'N':>10}{'mean/lnN':>11}{'ratio':>9}{'se':>9}")
        for row in rows:
            print(f"  {row.N:>10}{row.mean_normalized:>11.4f}"
                  f"{row.ratio:>9.4f}{row.ratio_se:>9.4f}")
        print()


if __name__ == "__main__":
    main()
