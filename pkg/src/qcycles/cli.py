"""Command-line entry point: ``qcycles {quorum,route,direct,simulate,report}``.

Exit codes: 0 success, 1 usage, 2 infeasible, 3 I/O or malformed input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .direction import (assign_forward, assign_random, format_directions, format_pairs,
                        greedy_directions)
from .experiment import (ConfigError, compare_strategies, format_summary, load_any_topology,
                         read_aggregate, read_config, run_experiment)
from .quorum import (BudgetExhausted, InfeasibleError, QuorumError, QuorumSet,
                     find_min_redundant_base, format_base, lookup_base, parse_base_line,
                     read_bases)
from .routing import RoutingError, format_cycles, route_all
from .topology import TopologyError

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _routes(args):
    t = load_any_topology(args.topology)
    bases = read_bases(args.basefile)
    if args.r is None:
        base = next((b for b in bases if b.n == t.node_count), None)
    else:
        base = lookup_base(bases, t.node_count, args.r)
    if base is None:
        raise ConfigError(f"{args.basefile} has no base for N={t.node_count}")
    return t, route_all(t, QuorumSet.from_base(base))


def cmd_quorum_find(args) -> int:
    base = find_min_redundant_base(args.n, args.r, args.strategy, args.seed, args.budget)
    print(format_base(base))
    return EXIT_OK


def cmd_quorum_verify(args) -> int:
    status = EXIT_OK
    for lineno, raw in enumerate(Path(args.file).read_text().splitlines(), 1):
        try:
            base = parse_base_line(raw)
        except QuorumError as exc:
            print(f"{lineno}: FAIL {exc}")
            status = EXIT_INFEASIBLE
            continue
        if base is not None:
            print(f"{lineno}: ok N={base.n} R={base.redundancy} k={base.size}")
    return status


def cmd_route(args) -> int:
    _, cycles = _routes(args)
    sys.stdout.write(format_cycles(cycles))
    return EXIT_OK


def cmd_direct(args) -> int:
    t, cycles = _routes(args)
    n = t.node_count
    if args.strategy == "forward":
        a = assign_forward(cycles, n, args.members_only)
    elif args.strategy == "random":
        a = assign_random(cycles, args.seed, n, args.members_only)
    else:
        a = greedy_directions(cycles, n, args.members_only)[0]
    sys.stdout.write(format_directions(a.directions))
    if args.missing:
        Path(args.missing).write_text(format_pairs(a.missing))
    print(f"missing {len(a.missing)} of {n * (n - 1)} directed pairs", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = read_config(args.config)
    if args.out:
        cfg.output_dir = args.out
    agg = run_experiment(cfg)
    sys.stdout.write(format_summary(agg))
    print(f"outputs written to {cfg.output_dir}", file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    agg = read_aggregate(args.dir)
    sys.stdout.write(format_summary(agg))
    if "forward" in agg.strategies and "greedy" in agg.strategies:
        for red in compare_strategies(agg):
            print(f"greedy vs forward {red.metric}: {red.formatted()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcycles", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("quorum", help="search or verify cyclic quorum bases")
    qsub = q.add_subparsers(dest="quorum_command", required=True, parser_class=_Parser)
    f = qsub.add_parser("find", help="find a minimal R-redundant base for N nodes")
    f.add_argument("n", type=int)
    f.add_argument("r", type=int)
    f.add_argument("--strategy", choices=("exhaustive", "randomized"), default="exhaustive")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--budget", type=int, default=200_000)
    f.set_defaults(func=cmd_quorum_find)
    v = qsub.add_parser("verify", help="re-verify every line of a base-set file")
    v.add_argument("file")
    v.set_defaults(func=cmd_quorum_verify)

    for name, func, help_ in (("route", cmd_route, "route every quorum as a cycle"),
                              ("direct", cmd_direct, "route and assign cycle directions")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("topology", help="edge-list file or shipped name (nsfnet, arpanet, american, chinese)")
        s.add_argument("basefile")
        s.add_argument("--r", type=int, default=None, help="redundancy entry to pick from the base file")
        if name == "direct":
            s.add_argument("--strategy", choices=("forward", "random", "greedy"), default="greedy")
            s.add_argument("--seed", type=int, default=0)
            s.add_argument("--missing", help="write the missing-pair dump here")
            s.add_argument("--members-only", action="store_true",
                           help="ignore pass-through nodes when forming pairs")
        s.set_defaults(func=func)

    s = sub.add_parser("simulate", help="run a mapping sweep from a key=value config")
    s.add_argument("config")
    s.add_argument("--out", help="override output_dir")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("report", help="summarize a simulate output directory")
    s.add_argument("dir")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InfeasibleError, BudgetExhausted, RoutingError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, TopologyError, QuorumError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
