"""Run the strategy comparison on every shipped backbone for R = 2 and 3.

Writes one output directory per (network, R) and prints the greedy versus
forward reductions.

    python scripts/run_sweep.py --mappings 20 --out results
"""

import argparse
import logging
import time
from pathlib import Path

from qcycles.experiment import (STRATEGIES, ExperimentConfig, compare_strategies,
                                format_summary, run_experiment)
from qcycles.topology import SHIPPED


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--networks", nargs="+", default=list(SHIPPED), choices=list(SHIPPED))
    ap.add_argument("--r", nargs="+", type=int, default=[2, 3])
    ap.add_argument("--mappings", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--fault-mode", choices=("segment", "whole"), default="segment")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING)

    for net in args.networks:
        for r in args.r:
            t0 = time.perf_counter()
            cfg = ExperimentConfig(topology=net, redundancy=r, strategies=STRATEGIES,
                                   mappings=args.mappings, seed=args.seed,
                                   fault_mode=args.fault_mode, compensation=True,
                                   workers=args.workers,
                                   output_dir=str(Path(args.out) / f"{net}-r{r}"))
            agg = run_experiment(cfg)
            print(format_summary(agg), end="")
            for red in compare_strategies(agg):
                print(f"  greedy vs forward {red.metric}: {red.formatted()}")
            print(f"  ({time.perf_counter() - t0:.1f}s)\n")


if __name__ == "__main__":
    main()
