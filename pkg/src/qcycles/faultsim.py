"""Single-link failure sweeps over a directed cycle solution.

Two semantics for a cycle whose walk crosses the failed link:

``segment`` (default)
    The cut splits the trail into the piece before the break and the piece
    after it. Each piece keeps its downstream pairs; pairs that needed to
    cross the cut are lost.
``whole``
    The cycle provides no pairs at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .direction import Pair, PairCoverage, missing_pairs, pair_index, sequence_pair_index
from .routing import CycleRoute
from .topology import Edge, Topology, norm_edge

MODES = ("whole", "segment")


@dataclass
class FaultReport:
    per_edge: dict[Edge, tuple[frozenset[Pair], int]]
    mean_missing: float
    total_pairs: int
    coverage: float
    edges_swept: list[Edge]
    compensated: dict[Edge, int] | None = None

    @property
    def mean_compensated_missing(self) -> float | None:
        if self.compensated is None:
            return None
        return float(np.mean([self.compensated[e] for e in self.edges_swept]))

    def missing_counts(self) -> list[int]:
        return [self.per_edge[e][1] for e in self.edges_swept]


def _fragments(c: CycleRoute, edge: Edge) -> list[tuple[int, ...]]:
    seq = c.traversal()
    for p in range(len(seq) - 1):
        if norm_edge(seq[p], seq[p + 1]) == edge:
            return [seq[: p + 1], seq[p + 1 :]]
    return [seq]


def faulted_index(c: CycleRoute, edge: Edge, n: int, mode: str = "segment",
                  members_only: bool = False) -> np.ndarray:
    """Flat pair indices ``c`` still forms with ``edge`` cut (unique, sorted)."""
    nodes = c.members if members_only else None
    if edge not in c.edge_set():
        return sequence_pair_index(c.traversal(), n, nodes)
    if mode == "whole":
        return np.empty(0, dtype=np.int64)
    parts = [sequence_pair_index(f, n, nodes) for f in _fragments(c, edge)]
    return np.unique(np.concatenate(parts))


def pairs_under_fault(cycles: Sequence[CycleRoute], failed_edge: Edge,
                      topology: Topology | None = None, mode: str = "segment",
                      members_only: bool = False) -> set[Pair]:
    """Directed pairs still formed when ``failed_edge`` is cut.

    Each cycle contributes in its own ``direction``.
    """
    e = norm_edge(*failed_edge)
    if topology is not None and e not in topology.edges:
        raise ValueError(f"edge {e} is not in the topology")
    if mode not in MODES:
        raise ValueError(f"unknown fault mode {mode!r}")
    if not cycles:
        return set()
    n = max(max(c.walk) for c in cycles) + 1 if topology is None else topology.node_count
    flat = np.unique(np.concatenate([faulted_index(c, e, n, mode, members_only) for c in cycles]))
    return {(int(x) // n, int(x) % n) for x in flat}


def surviving_hubs(cycles: Iterable[CycleRoute], failed_edge: Edge | None = None) -> set[int]:
    e = None if failed_edge is None else norm_edge(*failed_edge)
    return {c.hub for c in cycles if e is None or e not in c.edge_set()}


def used_edges(cycles: Iterable[CycleRoute]) -> list[Edge]:
    s: set[Edge] = set()
    for c in cycles:
        s |= c.edge_set()
    return sorted(s)


def sweep_single_faults(topology: Topology, cycles: Sequence[CycleRoute], mode: str = "segment",
                        members_only: bool = False, compensate: bool = False) -> FaultReport:
    """Fail every edge used by at least one cycle, one at a time.

    With ``compensate`` each fault also records how many pairs stay missing
    after one relay through the hub of a cycle that avoids the failed edge.
    """
    if not cycles:
        raise ValueError("no cycles to sweep")
    if mode not in MODES:
        raise ValueError(f"unknown fault mode {mode!r}")
    n = topology.node_count
    swept = used_edges(cycles)
    full = [pair_index(c, n, members_only=members_only) for c in cycles]
    edge_sets = [c.edge_set() for c in cycles]
    total = PairCoverage(n)
    for ix in full:
        total.add(ix)
    per_edge: dict[Edge, tuple[frozenset[Pair], int]] = {}
    comp: dict[Edge, int] | None = {} if compensate else None
    universe = {(a, b) for a in range(n) for b in range(n) if a != b}
    for e in swept:
        pc = total.copy()
        for c, es, ix in zip(cycles, edge_sets, full):
            if e in es:
                pc.add(ix, -1)
                pc.add(faulted_index(c, e, n, mode, members_only))
        miss = frozenset(missing_pairs(pc))
        per_edge[e] = (miss, len(miss))
        if comp is not None:
            closed = compensated_pairs(universe - miss, surviving_hubs(cycles, e))
            comp[e] = len(universe) - len(closed)
    total_pairs = n * (n - 1)
    mean = float(np.mean([per_edge[e][1] for e in swept]))
    return FaultReport(per_edge, mean, total_pairs, 1.0 - mean / total_pairs, swept, comp)


def fault_coverage(report: FaultReport) -> float:
    """Coverage percentage, 100 * (1 - mean missing / total pairs)."""
    if report.total_pairs <= 0:
        raise ValueError("total_pairs must be positive")
    return 100.0 * (1.0 - report.mean_missing / report.total_pairs)


def compensated_pairs(covered: Iterable[Pair], hubs: Iterable[int]) -> set[Pair]:
    """Add pairs reachable through one O/E/O relay at a hub: (a, h) and (h, b) give (a, b)."""
    cov = set(covered)
    into: dict[int, set[int]] = {}
    outof: dict[int, set[int]] = {}
    for a, b in cov:
        into.setdefault(b, set()).add(a)
        outof.setdefault(a, set()).add(b)
    out = set(cov)
    for h in set(hubs):
        for a in into.get(h, ()):
            for b in outof.get(h, ()):
                if a != b:
                    out.add((a, b))
    return out
