"""Search minimal R-redundant cyclic bases and write them in base-file format.

Exhaustive search is used up to --exhaustive-max nodes, seeded randomized
search beyond that.
"""

import argparse
import time

from qcycles.quorum import find_min_redundant_base, format_base


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[14, 20, 24, 54])
    ap.add_argument("--r", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--exhaustive-max", type=int, default=30)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--budget", type=int, default=400_000)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    lines = ["# N R k members; exhaustive (minimal) for N <= %d, randomized otherwise" % args.exhaustive_max]
    for n in args.n:
        for r in args.r:
            t = time.time()
            strategy = "exhaustive" if n <= args.exhaustive_max else "randomized"
            b = find_min_redundant_base(n, r, strategy, seed=args.seed, budget=args.budget)
            lines.append(format_base(b) + f"  # {strategy}")
            print(lines[-1], f"({time.time() - t:.1f}s)")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
