import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import walk_pairs
from qcycles.direction import expand_paired, ordered_pairs
from qcycles.faultsim import (FaultReport, compensated_pairs, fault_coverage, pairs_under_fault,
                              sweep_single_faults, used_edges)
from qcycles.routing import BACKWARD, FORWARD, CycleRoute, route_all
from qcycles.quorum import QuorumBase, QuorumSet
from qcycles.topology import Topology, norm_edge, shipped_topology

ALL3 = {(a, b) for a in range(3) for b in range(3) if a != b}


def cyc(walk, i=0, d=FORWARD):
    return CycleRoute(i, walk[0], tuple(walk), direction=d)


def test_whole_single_cycle_dies(triangle):
    c = [cyc([0, 1, 2, 0])]
    assert pairs_under_fault(c, (1, 2), triangle, mode="whole") == set()
    rep = sweep_single_faults(triangle, c, mode="whole")
    assert rep.edges_swept == [(0, 1), (0, 2), (1, 2)]
    assert rep.mean_missing == 6 and rep.total_pairs == 6
    assert fault_coverage(rep) == 0.0


def test_whole_paired_dies(triangle):
    rep = sweep_single_faults(triangle, expand_paired([cyc([0, 1, 2, 0])]), mode="whole")
    assert fault_coverage(rep) == 0.0


def test_two_walks_on_triangle_share_every_edge(triangle):
    # any closed trail on K3 uses all three edges, so both walks cross (0, 1)
    cs = [cyc([0, 1, 2, 0]), cyc([0, 2, 1, 0], 1)]
    assert all(norm_edge(0, 1) in c.edge_set() for c in cs)
    assert pairs_under_fault(cs, (0, 1), triangle, mode="whole") == set()
    assert pairs_under_fault(cs, (0, 1), triangle, mode="segment") == ALL3


def test_disjoint_triangles_survivor():
    t = Topology.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    cs = [cyc([0, 1, 2, 0]), cyc([3, 4, 5, 3], 1)]
    got = pairs_under_fault(cs, (0, 1), t, mode="whole")
    assert got == ordered_pairs(cs[1]) and len(got) == 5


def test_unused_edge_is_noop(ring4):
    t = Topology.from_edges(4, sorted(ring4.edges) + [(0, 2)])
    cs = [cyc([0, 1, 2, 3, 0])]
    for mode in ("whole", "segment"):
        assert pairs_under_fault(cs, (0, 2), t, mode=mode) == ordered_pairs(cs[0])


def test_unknown_edge_rejected(triangle):
    with pytest.raises(ValueError):
        pairs_under_fault([cyc([0, 1, 2, 0])], (0, 5), triangle)
    with pytest.raises(ValueError):
        pairs_under_fault([cyc([0, 1, 2, 0])], (0, 1), triangle, mode="bogus")


def test_segment_single_triangle(triangle):
    rep = sweep_single_faults(triangle, [cyc([0, 1, 2, 0])], mode="segment")
    # edges sorted: cut (0,1) keeps [1,2,0], cut (0,2) keeps [0,1,2], cut (1,2) keeps [0,1] and [2,0]
    expect = {
        (0, 1): walk_pairs((1, 2, 0)),
        (1, 2): walk_pairs((0, 1)) | walk_pairs((2, 0)),
        (0, 2): walk_pairs((0, 1, 2)),
    }
    for e, got in expect.items():
        assert rep.per_edge[e][0] == ALL3 - got
    assert rep.missing_counts() == [3, 3, 4]
    assert rep.mean_missing == pytest.approx(10 / 3)


def test_fault_coverage_arithmetic():
    mk = lambda m, t: FaultReport({}, m, t, 1 - m / t, [])
    assert fault_coverage(mk(0, 6)) == 100.0
    assert fault_coverage(mk(6, 6)) == 0.0
    assert round(fault_coverage(mk(3, 182)), 2) == 98.35
    with pytest.raises(ValueError):
        fault_coverage(FaultReport({}, 0, 0, 0.0, []))


def test_compensation_examples():
    assert compensated_pairs({(1, 0), (0, 2)}, {0}) == {(1, 0), (0, 2), (1, 2)}
    assert compensated_pairs(ALL3, {0, 1}) == ALL3
    tri = ordered_pairs(cyc([0, 1, 2, 0]))
    assert ALL3 - compensated_pairs(tri, {0}) == set()


def test_sweep_compensation_counts(triangle):
    rep = sweep_single_faults(triangle, [cyc([0, 1, 2, 0])], mode="segment", compensate=True)
    # the only cycle crosses every edge, so no hub may relay
    assert rep.compensated == {e: rep.per_edge[e][1] for e in rep.edges_swept}
    assert rep.mean_compensated_missing == rep.mean_missing


pairs = st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(lambda p: p[0] != p[1]))


@given(pairs, st.sets(st.integers(0, 5)))
def test_compensation_monotone_and_one_hop(cov, hubs):
    out = compensated_pairs(cov, hubs)
    assert cov <= out
    # re-applying over the original relay set reproduces the same one-hop closure
    assert compensated_pairs(cov, hubs) == out
    extra = {(a, b) for (a, h) in cov for (h2, b) in cov if h == h2 and h in hubs and a != b}
    assert out == cov | extra


@pytest.fixture(scope="module")
def nsf_cycles():
    t = shipped_topology("nsfnet")
    base = QuorumBase(14, (0, 1, 2, 3, 5, 9), 2)
    return t, route_all(t, QuorumSet.from_base(base))


@pytest.mark.parametrize("mode", ["whole", "segment"])
def test_report_consistency_and_subset(nsf_cycles, mode):
    t, cycles = nsf_cycles
    cycles = [c.with_direction(BACKWARD if i % 3 == 0 else FORWARD) for i, c in enumerate(cycles)]
    rep = sweep_single_faults(t, cycles, mode=mode)
    free = set().union(*(ordered_pairs(c) for c in cycles))
    assert rep.edges_swept == used_edges(cycles)
    assert rep.coverage == pytest.approx(1 - rep.mean_missing / rep.total_pairs)
    assert rep.mean_missing == pytest.approx(sum(rep.missing_counts()) / len(rep.edges_swept))
    universe = {(a, b) for a in range(14) for b in range(14) if a != b}
    for e in rep.edges_swept:
        covered = universe - rep.per_edge[e][0]
        assert covered <= free
        assert covered == pairs_under_fault(cycles, e, t, mode=mode)
        # dropping a cycle never adds coverage
        assert pairs_under_fault(cycles[1:], e, t, mode=mode) <= covered


def test_segment_at_least_whole(nsf_cycles):
    t, cycles = nsf_cycles
    whole = sweep_single_faults(t, cycles, mode="whole")
    seg = sweep_single_faults(t, cycles, mode="segment")
    assert all(seg.per_edge[e][0] <= whole.per_edge[e][0] for e in whole.edges_swept)


def test_empty_sweep_rejected(triangle):
    with pytest.raises(ValueError):
        sweep_single_faults(triangle, [])
