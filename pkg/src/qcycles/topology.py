"""Network topology model, edge-list I/O and node relabeling."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]

SHIPPED = {
    "nsfnet": "nsfnet.txt",
    "arpanet": "arpanet.txt",
    "american": "american.txt",
    "chinese": "chinese.txt",
}


class TopologyError(ValueError):
    pass


class TopologyParseError(TopologyError):
    pass


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Topology:
    node_count: int
    edges: frozenset[Edge]
    name: str = ""
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.node_count < 1:
            raise TopologyError(f"node count must be positive, got {self.node_count}")
        adj: list[set[int]] = [set() for _ in range(self.node_count)]
        for u, v in self.edges:
            if (u, v) != norm_edge(u, v):
                raise TopologyError(f"edge {(u, v)} is not normalized")
            if u == v:
                raise TopologyError(f"self-loop at node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise TopologyError(f"edge {(u, v)} has endpoint outside [0, {self.node_count})")
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], name: str = "") -> "Topology":
        """Build a topology, rejecting self-loops and duplicate edges."""
        seen: set[Edge] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise TopologyError(f"self-loop at node {u}")
            e = norm_edge(u, v)
            if e in seen:
                raise TopologyError(f"duplicate edge {e}")
            seen.add(e)
        return cls(n, frozenset(seen), name)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self._adj[u]

    def has_edge(self, u: int, v: int) -> bool:
        return norm_edge(u, v) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def __len__(self) -> int:
        return self.node_count


@dataclass(frozen=True)
class NodeMapping:
    permutation: tuple[int, ...]
    seed: int = 0

    def __post_init__(self):
        if sorted(self.permutation) != list(range(len(self.permutation))):
            raise TopologyError("mapping is not a permutation of 0..N-1")

    def inverse(self) -> "NodeMapping":
        inv = [0] * len(self.permutation)
        for i, p in enumerate(self.permutation):
            inv[p] = i
        return NodeMapping(tuple(inv), self.seed)

    def __getitem__(self, i: int) -> int:
        return self.permutation[i]

    def __len__(self) -> int:
        return len(self.permutation)


def load_topology(text: str, name: str = "") -> Topology:
    """Parse an edge-list document.

    The first significant line holds N; every following significant line is
    ``u v``. Lines starting with ``#`` and blank lines are ignored.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise TopologyParseError(f"line {lineno}: non-integer token in {raw!r}") from None
        if n is None:
            if len(values) != 1:
                raise TopologyParseError(f"line {lineno}: expected node count, got {raw!r}")
            n = values[0]
            continue
        if len(values) != 2:
            raise TopologyParseError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append(values)
    if n is None:
        raise TopologyParseError("missing node-count header")
    return Topology.from_edges(n, edges, name)


def read_topology(path: str | Path) -> Topology:
    path = Path(path)
    return load_topology(path.read_text(), name=path.stem)


def serialize_topology(t: Topology) -> str:
    lines = [str(t.node_count)] + [f"{u} {v}" for u, v in t.sorted_edges()]
    return "\n".join(lines) + "\n"


def shipped_topology(name: str) -> Topology:
    """One of the four bundled backbones: nsfnet, arpanet, american, chinese."""
    try:
        fname = SHIPPED[name]
    except KeyError:
        raise TopologyError(f"unknown shipped topology {name!r}; choose from {sorted(SHIPPED)}") from None
    text = resources.files("qcycles.data").joinpath(fname).read_text()
    return load_topology(text, name=name)


def apply_mapping(t: Topology, m: NodeMapping) -> Topology:
    if len(m) != t.node_count:
        raise TopologyError(f"mapping length {len(m)} != node count {t.node_count}")
    edges = frozenset(norm_edge(m[u], m[v]) for u, v in t.edges)
    return Topology(t.node_count, edges, t.name)


def generate_mappings(n: int, count: int, seed: int) -> list[NodeMapping]:
    """Identity followed by ``count - 1`` seeded Fisher-Yates shuffles.

    Each shuffle draws from its own child of ``numpy.random.SeedSequence(seed)``
    so mapping ``i`` does not depend on how many mappings were requested.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out = [NodeMapping(tuple(range(n)), seed)]
    children = np.random.SeedSequence(seed).spawn(count - 1)
    for child in children:
        rng = np.random.Generator(np.random.PCG64(child))
        perm = list(range(n))
        # explicit Fisher-Yates so the permutation algorithm is pinned
        for i in range(n - 1, 0, -1):
            j = int(rng.integers(0, i + 1))
            perm[i], perm[j] = perm[j], perm[i]
        out.append(NodeMapping(tuple(perm), seed))
    return out


def find_bridges(t: Topology) -> list[Edge]:
    """Bridges via iterative Tarjan low-link DFS, sorted."""
    n = t.node_count
    disc = [-1] * n
    low = [0] * n
    bridges: list[Edge] = []
    timer = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        # frames: (node, parent, neighbor iterator)
        stack = [(root, -1, iter(t.neighbors(root)))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, u, iter(t.neighbors(w))))
                    advanced = True
                    break
                low[u] = min(low[u], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[u])
                if low[u] > disc[p]:
                    bridges.append(norm_edge(p, u))
    return sorted(bridges)


def has_bridge(t: Topology) -> tuple[bool, list[Edge]]:
    b = find_bridges(t)
    return bool(b), b


def is_connected(t: Topology) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in t.neighbors(u):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == t.node_count
