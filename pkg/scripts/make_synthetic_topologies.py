"""Regenerate the approximate ARPANET / American / Chinese backbone files.

Nodes are scattered in a plane with a seeded generator, a Delaunay
triangulation supplies candidate links, and the shortest links are kept on
top of a minimum spanning tree until the published link count is reached.
Candidates are retried until the result is bridge-free. Only node and link
counts match the published networks.
"""

import argparse
from pathlib import Path

import networkx as nx
import numpy as np
from scipy.spatial import Delaunay

from qcycles.topology import Topology, find_bridges, serialize_topology

TARGETS = {
    "arpanet": (20, 31, (1.6, 1.0)),
    "american": (24, 43, (2.0, 1.0)),
    "chinese": (54, 103, (1.3, 1.0)),
}


def synthesize(n, m, aspect, seed):
    rng = np.random.default_rng(seed)
    while True:
        pts = rng.random((n, 2)) * np.asarray(aspect)
        tri = Delaunay(pts)
        g = nx.Graph()
        for s in tri.simplices:
            for a in range(3):
                u, v = int(s[a]), int(s[(a + 1) % 3])
                g.add_edge(u, v, weight=float(np.linalg.norm(pts[u] - pts[v])))
        keep = {tuple(sorted(e)) for e in nx.minimum_spanning_edges(g, data=False)}
        for u, v, _ in sorted(g.edges(data="weight"), key=lambda e: (e[2], e[0], e[1])):
            if len(keep) >= m:
                break
            keep.add((min(u, v), max(u, v)))
        t = Topology.from_edges(n, keep)
        if len(t.edges) == m and not find_bridges(t) and min(len(t.neighbors(i)) for i in range(n)) >= 2:
            return t


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="src/qcycles/data")
    ap.add_argument("--seed", type=int, default=2016)
    args = ap.parse_args()
    for i, (name, (n, m, aspect)) in enumerate(TARGETS.items()):
        t = synthesize(n, m, aspect, args.seed + i)
        header = (f"# {name}: {n} nodes / {m} links\n"
                  "# approximate: synthesized planar mesh with the published node/link counts\n")
        Path(args.out, f"{name}.txt").write_text(header + serialize_topology(t))
        print(name, n, len(t.edges))


if __name__ == "__main__":
    main()
