"""Route each quorum as an edge-simple closed walk through its members.

The router is a greedy nearest-member construction over the residual graph
(edges not yet used by the walk), followed by a detour-removal pass. If the
greedy pass strands itself it retries with backtracking over member order,
then falls back to an exhaustive trail search. Walks may revisit nodes and
pass through non-members but never reuse an undirected edge.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .quorum import QuorumSet
from .topology import Edge, Topology, find_bridges, norm_edge


class RoutingError(RuntimeError):
    def __init__(self, message: str, quorum_index: int | None = None):
        if quorum_index is not None:
            message = f"quorum {quorum_index}: {message}"
        super().__init__(message)
        self.quorum_index = quorum_index


class Direction(enum.Enum):
    FORWARD = "F"
    BACKWARD = "B"

    def flipped(self) -> "Direction":
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


FORWARD = Direction.FORWARD
BACKWARD = Direction.BACKWARD


@dataclass(frozen=True)
class CycleRoute:
    quorum_index: int
    hub: int
    walk: tuple[int, ...]
    members: tuple[int, ...] = ()
    direction: Direction = FORWARD

    def edges(self) -> list[Edge]:
        return [norm_edge(a, b) for a, b in zip(self.walk, self.walk[1:])]

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges())

    def nodes(self) -> frozenset[int]:
        return frozenset(self.walk)

    def traversal(self, direction: Direction | None = None) -> tuple[int, ...]:
        d = self.direction if direction is None else direction
        return self.walk if d is FORWARD else self.walk[::-1]

    def with_direction(self, d: Direction) -> "CycleRoute":
        return replace(self, direction=d)

    @property
    def length(self) -> int:
        return len(self.walk) - 1


def validate_route(c: CycleRoute, t: Topology | None = None) -> None:
    """Raise ``ValueError`` unless ``c`` is a well-formed edge-simple closed walk."""
    w = c.walk
    if len(w) < 3:
        raise ValueError(f"walk {w} too short")
    if w[0] != c.hub or w[-1] != c.hub:
        raise ValueError(f"walk {w} does not start and end at hub {c.hub}")
    edges = c.edges()
    if any(a == b for a, b in edges):
        raise ValueError(f"walk {w} has a self-step")
    if len(set(edges)) != len(edges):
        raise ValueError(f"walk {w} reuses an edge")
    missing = set(c.members) - set(w)
    if missing:
        raise ValueError(f"walk {w} skips members {sorted(missing)}")
    if t is not None:
        bad = [e for e in edges if e not in t.edges]
        if bad:
            raise ValueError(f"walk {w} uses non-edges {bad}")


def _bfs(t: Topology, src: int, used: set[Edge]) -> tuple[dict[int, int], dict[int, int]]:
    """Distances and parents from ``src`` over edges not in ``used``.

    Neighbors are scanned in ascending order, so each node's parent is the
    lowest-index predecessor at the previous level.
    """
    dist = {src: 0}
    parent: dict[int, int] = {}
    q = deque([src])
    while q:
        u = q.popleft()
        for w in t.neighbors(u):
            if w in dist or norm_edge(u, w) in used:
                continue
            dist[w] = dist[u] + 1
            parent[w] = u
            q.append(w)
    return dist, parent


def _path_to(parent: dict[int, int], src: int, dst: int) -> list[int]:
    path = [dst]
    while path[-1] != src:
        path.append(parent[path[-1]])
    return path[::-1]


def _reachable(t: Topology, src: int, used: set[Edge]) -> set[int]:
    return set(_bfs(t, src, used)[0])


def _two_edge_component(t: Topology, hub: int) -> set[int]:
    bridges = set(find_bridges(t))
    return _reachable(t, hub, bridges)


def _trail_feasible(t: Topology, used: set[Edge], src: int, dst: int,
                    need: set[int]) -> bool:
    """Necessary condition for an open trail src -> dst through ``need`` in the residual graph.

    A trail crosses each residual bridge at most once, so every needed node must
    lie in a 2-edge-connected block on the bridge-tree path from src to dst.
    """
    residual = Topology(t.node_count, t.edges - used)
    bridges = find_bridges(residual)
    blocked = set(bridges)
    block = [-1] * t.node_count
    for v in range(t.node_count):
        if block[v] == -1:
            for u in _reachable(residual, v, blocked):
                block[u] = v
    tree: dict[int, list[int]] = {}
    for a, b in bridges:
        tree.setdefault(block[a], []).append(block[b])
        tree.setdefault(block[b], []).append(block[a])
    start, goal = block[src], block[dst]
    prev = {start: start}
    q = deque([start])
    while q and goal not in prev:
        c = q.popleft()
        for y in tree.get(c, ()):
            if y not in prev:
                prev[y] = c
                q.append(y)
    if goal not in prev:
        return False
    on_path = {goal}
    c = goal
    while c != start:
        c = prev[c]
        on_path.add(c)
    return all(block[v] in on_path for v in need)


class _Greedy:
    """Nearest-member walk construction with optional backtracking."""

    def __init__(self, t: Topology, members: Sequence[int], hub: int, max_nodes: int):
        self.t = t
        self.hub = hub
        self.members = set(members)
        self.budget = max_nodes

    def _feasible(self, cur: int, used: set[Edge], remaining: set[int]) -> bool:
        return _trail_feasible(self.t, used, cur, self.hub, remaining)

    def run(self, backtrack: bool) -> list[int] | None:
        remaining = self.members - {self.hub}
        return self._extend([self.hub], set(), remaining, backtrack)

    def _extend(self, walk: list[int], used: set[Edge], remaining: set[int],
                backtrack: bool) -> list[int] | None:
        self.budget -= 1
        if self.budget < 0:
            return None
        cur = walk[-1]
        dist, parent = _bfs(self.t, cur, used)
        if not remaining:
            if self.hub not in dist or self.hub == cur:
                return None
            return walk + _path_to(parent, cur, self.hub)[1:]
        candidates = sorted((dist[m], m) for m in remaining if m in dist)
        for _, m in candidates:
            path = _path_to(parent, cur, m)
            new_used = used | {norm_edge(a, b) for a, b in zip(path, path[1:])}
            new_remaining = remaining - set(path)
            if not self._feasible(m, new_used, new_remaining):
                continue
            result = self._extend(walk + path[1:], new_used, new_remaining, backtrack)
            if result is not None or not backtrack:
                return result
        return None


def _exhaustive_trail(t: Topology, members: Iterable[int], hub: int,
                      max_nodes: int) -> list[int] | None:
    """Depth-first search over all edge-simple trails from ``hub``.

    Returns the first closed trail covering ``members``; ``None`` when the
    search space is exhausted. Raises ``RoutingError`` if ``max_nodes``
    expansions are not enough to decide.
    """
    need = set(members)
    budget = [max_nodes]
    walk = [hub]
    used: set[Edge] = set()

    def rec() -> bool:
        budget[0] -= 1
        if budget[0] < 0:
            raise RoutingError("exhaustive trail search exceeded its expansion limit")
        cur = walk[-1]
        if cur == hub and len(walk) > 1 and need <= set(walk):
            return True
        if not _trail_feasible(t, used, cur, hub, need - set(walk)):
            return False
        for w in t.neighbors(cur):
            e = norm_edge(cur, w)
            if e in used:
                continue
            used.add(e)
            walk.append(w)
            if rec():
                return True
            walk.pop()
            used.discard(e)
        return False

    return list(walk) if rec() else None


def _improve(t: Topology, walk: list[int], members: set[int]) -> list[int]:
    """Drop closed sub-trails and shorten detours without losing any member."""
    changed = True
    while changed:
        changed = _drop_subtrail(walk, members) or _shortcut(t, walk, members)
    return walk


def _drop_subtrail(walk: list[int], members: set[int]) -> bool:
    last = len(walk) - 1
    for i in range(last):
        for j in range(last, i, -1):
            if walk[j] != walk[i] or (i == 0 and j == last):
                continue
            kept = set(walk[: i + 1]) | set(walk[j:])
            if all(v in kept for v in walk[i + 1 : j] if v in members):
                del walk[i + 1 : j + 1]
                return True
    return False


def _shortcut(t: Topology, walk: list[int], members: set[int]) -> bool:
    # anchors: positions whose node must stay because it occurs nowhere else
    counts: dict[int, int] = {}
    for v in walk[:-1]:
        counts[v] = counts.get(v, 0) + 1
    anchors = [0] + [p for p in range(1, len(walk) - 1)
                     if walk[p] in members and counts[walk[p]] == 1] + [len(walk) - 1]
    for a, b in zip(anchors, anchors[1:]):
        if b - a < 2:
            continue
        kept = set(walk[: a + 1]) | set(walk[b:])
        if any(v in members and v not in kept for v in walk[a + 1 : b]):
            continue
        outside ={norm_edge(x, y) for x, y in zip(walk[:a + 1], walk[1:a + 1])}
        outside |= {norm_edge(x, y) for x, y in zip(walk[b:], walk[b + 1:])}
        dist, parent = _bfs(t, walk[a], outside)
        if walk[b] != walk[a] and dist.get(walk[b], b - a) < b - a:
            walk[a : b + 1] = _path_to(parent, walk[a], walk[b])
            return True
    return False


def route_cycle(t: Topology, members: Sequence[int], hub: int, quorum_index: int = 0,
                search_limit: int = 200_000) -> CycleRoute:
    """Edge-simple closed walk from ``hub`` through every node in ``members``.

    Members are visited in nearest-first order over residual shortest paths
    with lowest-index tie-breaking; legs that would strand the hub or a
    remaining member are skipped.
    """
    mset = set(members)
    if hub not in mset:
        raise RoutingError(f"hub {hub} is not a member", quorum_index)
    if len(mset) < 2:
        raise RoutingError("need at least two members", quorum_index)
    if not all(0 <= m < t.node_count for m in mset):
        raise RoutingError("member outside the topology", quorum_index)
    reach = _reachable(t, hub, set())
    if not mset <= reach:
        raise RoutingError(
            f"members {sorted(mset - reach)} disconnected from hub {hub}", quorum_index)
    # a closed trail lives inside one 2-edge-connected component
    comp = _two_edge_component(t, hub)
    if not mset <= comp:
        raise RoutingError(
            f"routing infeasible: members {sorted(mset - comp)} are separated from hub {hub} by a bridge",
            quorum_index)

    g = _Greedy(t, sorted(mset), hub, max_nodes=len(mset) + 1)
    walk = g.run(backtrack=False)
    if walk is None:
        walk = _Greedy(t, sorted(mset), hub, max_nodes=search_limit).run(backtrack=True)
    if walk is None:
        walk = _exhaustive_trail(t, mset, hub, search_limit)
    if walk is None:
        raise RoutingError("routing infeasible: no edge-simple closed walk covers the members",
                           quorum_index)
    walk = _improve(t, walk, mset)
    route = CycleRoute(quorum_index, hub, tuple(walk), tuple(members), FORWARD)
    validate_route(route, t)
    return route


def route_all(t: Topology, qs: QuorumSet) -> list[CycleRoute]:
    if len(qs) != t.node_count:
        raise RoutingError(f"quorum set has {len(qs)} quorums for {t.node_count} nodes")
    routes = []
    for i, q in enumerate(qs.quorums):
        try:
            routes.append(route_cycle(t, q, qs.hub(i), quorum_index=i))
        except RoutingError as exc:
            if exc.quorum_index is None:
                raise RoutingError(str(exc), i) from exc
            raise
    return routes


def links_used(cycles: Iterable[CycleRoute], paired: bool = False) -> int:
    total = sum(c.length for c in cycles)
    return 2 * total if paired else total


def format_cycles(cycles: Iterable[CycleRoute]) -> str:
    return "".join(f"{c.quorum_index} {c.hub}: {' '.join(map(str, c.walk))}\n" for c in cycles)


def parse_cycles(text: str) -> list[CycleRoute]:
    """Inverse of :func:`format_cycles`; members default to the walk's nodes."""
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, body = line.partition(":")
        i, hub = (int(x) for x in head.split())
        walk = tuple(int(x) for x in body.split())
        out.append(CycleRoute(i, hub, walk, tuple(sorted(set(walk)))))
    return out
