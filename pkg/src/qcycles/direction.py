"""Directed pair formation on unidirectional cycles and direction assignment.

A cycle is a light-trail that starts and ends at its hub, so in traversal
order a node can reach every node that occurs later. The hub sits at both
ends: it reaches everyone on the cycle and everyone reaches it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .routing import BACKWARD, FORWARD, CycleRoute, Direction

Pair = tuple[int, int]
StepHook = Callable[[int, Sequence[Direction], "PairCoverage"], None]


def _positions(seq: Sequence[int], nodes: Iterable[int] | None):
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for p, v in enumerate(seq):
        first.setdefault(v, p)
        last[v] = p
    if nodes is not None:
        keep = set(nodes)
        first = {v: p for v, p in first.items() if v in keep}
        last = {v: p for v, p in last.items() if v in keep}
    return first, last


def ordered_pairs(c: CycleRoute, d: Direction | None = None,
                  members_only: bool = False) -> set[Pair]:
    """Directed pairs (a, b) where some occurrence of a precedes some occurrence of b.

    With ``members_only`` the pass-through nodes neither send nor receive.
    """
    seq = c.traversal(d)
    first, last = _positions(seq, c.members if members_only else None)
    return {(a, b) for a, pa in first.items() for b, pb in last.items() if a != b and pa < pb}


def pair_index(c: CycleRoute, n: int, d: Direction | None = None,
               members_only: bool = False) -> np.ndarray:
    """Flat indices ``a * n + b`` of :func:`ordered_pairs`, sorted."""
    return sequence_pair_index(c.traversal(d), n, c.members if members_only else None)


def sequence_pair_index(seq: Sequence[int], n: int,
                        nodes: Iterable[int] | None = None) -> np.ndarray:
    """Flat pair indices for one trail traversed in ``seq`` order."""
    first, last = _positions(seq, nodes)
    a = np.fromiter(first.keys(), dtype=np.int64)
    fa = np.fromiter(first.values(), dtype=np.int64)
    b = np.fromiter(last.keys(), dtype=np.int64)
    lb = np.fromiter(last.values(), dtype=np.int64)
    ok = (fa[:, None] < lb[None, :]) & (a[:, None] != b[None, :])
    flat = (a[:, None] * n + b[None, :])[ok]
    flat.sort()
    return flat


@dataclass
class PairCoverage:
    n: int
    counts: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros((self.n, self.n), dtype=np.int64)

    def add(self, idx: np.ndarray, sign: int = 1) -> None:
        self.counts.ravel()[idx] += sign

    def new_pairs(self, idx: np.ndarray) -> int:
        """How many of these pairs are currently at count 0."""
        return int(np.count_nonzero(self.counts.ravel()[idx] == 0))

    def missing(self) -> set[Pair]:
        return missing_pairs(self)

    def missing_count(self) -> int:
        zero = self.counts == 0
        return int(np.count_nonzero(zero) - np.count_nonzero(np.diagonal(zero)))

    def copy(self) -> "PairCoverage":
        return PairCoverage(self.n, self.counts.copy())

    def __eq__(self, other) -> bool:
        return (isinstance(other, PairCoverage) and self.n == other.n
                and np.array_equal(self.counts, other.counts))


@dataclass
class DirectionAssignment:
    directions: list[Direction]
    missing: frozenset[Pair]
    passes: int = 0

    def __len__(self) -> int:
        return len(self.directions)


def missing_pairs(pc: PairCoverage, universe: int | None = None) -> set[Pair]:
    n = pc.n if universe is None else universe
    sub = pc.counts[:n, :n]
    a, b = np.nonzero(sub == 0)
    return {(int(i), int(j)) for i, j in zip(a, b) if i != j}


def missing_fraction(pc: PairCoverage) -> float:
    return pc.missing_count() / (pc.n * (pc.n - 1))


def _infer_n(cycles: Sequence[CycleRoute]) -> int:
    return max(max(c.walk) for c in cycles) + 1


def rebuild_coverage(cycles: Sequence[CycleRoute], directions: Sequence[Direction],
                     n: int, members_only: bool = False) -> PairCoverage:
    pc = PairCoverage(n)
    for c, d in zip(cycles, directions):
        pc.add(pair_index(c, n, d, members_only))
    return pc


def _assignment(directions: list[Direction], pc: PairCoverage, passes: int = 0) -> DirectionAssignment:
    return DirectionAssignment(directions, frozenset(missing_pairs(pc)), passes)


def initial_cycle_direction(cycles: Sequence[CycleRoute], n: int | None = None,
                            members_only: bool = False,
                            on_step: StepHook | None = None,
                            ) -> tuple[DirectionAssignment, PairCoverage]:
    """Pick each cycle's direction in index order by new pairs formed; ties go forward."""
    if not cycles:
        raise ValueError("no cycles to direct")
    n = _infer_n(cycles) if n is None else n
    pc = PairCoverage(n)
    directions: list[Direction] = []
    for i, c in enumerate(cycles):
        fwd = pair_index(c, n, FORWARD, members_only)
        bwd = pair_index(c, n, BACKWARD, members_only)
        if pc.new_pairs(fwd) >= pc.new_pairs(bwd):
            directions.append(FORWARD)
            pc.add(fwd)
        else:
            directions.append(BACKWARD)
            pc.add(bwd)
        if on_step is not None:
            on_step(i, directions, pc)
    return _assignment(directions, pc), pc


def greedy_update_cycle_direction(cycles: Sequence[CycleRoute], assignment: DirectionAssignment,
                                  pc: PairCoverage, members_only: bool = False,
                                  on_step: StepHook | None = None) -> DirectionAssignment:
    """Flip single cycles while a flip strictly forms more new pairs; repeat until a pass is stable.

    ``pc`` is updated in place.
    """
    n = pc.n
    if len(assignment.directions) != len(cycles):
        raise ValueError("assignment length does not match cycle count")
    if rebuild_coverage(cycles, assignment.directions, n, members_only) != pc:
        raise ValueError("pair coverage is inconsistent with the assignment")
    directions = list(assignment.directions)
    idx = [(pair_index(c, n, FORWARD, members_only), pair_index(c, n, BACKWARD, members_only))
           for c in cycles]
    passes = 0
    changed = True
    while changed:
        changed = False
        passes += 1
        for i, (fwd, bwd) in enumerate(idx):
            current = fwd if directions[i] is FORWARD else bwd
            pc.add(current, -1)
            f, b = pc.new_pairs(fwd), pc.new_pairs(bwd)
            if f > b:
                pc.add(fwd)
                if directions[i] is not FORWARD:
                    directions[i] = FORWARD
                    changed = True
            elif b > f:
                pc.add(bwd)
                if directions[i] is not BACKWARD:
                    directions[i] = BACKWARD
                    changed = True
            else:
                pc.add(current)
            if on_step is not None:
                on_step(i, directions, pc)
    return _assignment(directions, pc, passes)


def greedy_directions(cycles: Sequence[CycleRoute], n: int | None = None,
                      members_only: bool = False) -> tuple[DirectionAssignment, PairCoverage]:
    init, pc = initial_cycle_direction(cycles, n, members_only)
    return greedy_update_cycle_direction(cycles, init, pc, members_only), pc


def assign_forward(cycles: Sequence[CycleRoute], n: int | None = None,
                   members_only: bool = False) -> DirectionAssignment:
    if not cycles:
        raise ValueError("no cycles to direct")
    n = _infer_n(cycles) if n is None else n
    directions = [FORWARD] * len(cycles)
    return _assignment(directions, rebuild_coverage(cycles, directions, n, members_only))


def assign_random(cycles: Sequence[CycleRoute], seed: int, n: int | None = None,
                  members_only: bool = False) -> DirectionAssignment:
    if not cycles:
        raise ValueError("no cycles to direct")
    n = _infer_n(cycles) if n is None else n
    coins = np.random.default_rng(seed).integers(0, 2, size=len(cycles))
    directions = [FORWARD if x == 0 else BACKWARD for x in coins]
    return _assignment(directions, rebuild_coverage(cycles, directions, n, members_only))


def expand_paired(cycles: Sequence[CycleRoute]) -> list[CycleRoute]:
    """Each cycle forward, followed by its reversed twin."""
    out = []
    for c in cycles:
        out.append(c.with_direction(FORWARD))
        out.append(c.with_direction(BACKWARD))
    return out


def apply_directions(cycles: Sequence[CycleRoute], directions: Sequence[Direction]) -> list[CycleRoute]:
    return [c.with_direction(d) for c, d in zip(cycles, directions)]


def format_directions(directions: Sequence[Direction]) -> str:
    return "".join(f"{i} {d.value}\n" for i, d in enumerate(directions))


def format_pairs(pairs: Iterable[Pair]) -> str:
    return "".join(f"{a} {b}\n" for a, b in sorted(pairs))
