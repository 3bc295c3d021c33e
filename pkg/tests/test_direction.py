import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exhaustive_min_missing, missing_for, walk_pairs
from qcycles.direction import (DirectionAssignment, PairCoverage, assign_forward, assign_random,
                               expand_paired, format_directions, format_pairs,
                               greedy_directions, greedy_update_cycle_direction,
                               initial_cycle_direction, missing_fraction, missing_pairs,
                               ordered_pairs, rebuild_coverage)
from qcycles.routing import BACKWARD, FORWARD, CycleRoute, links_used

ALL3 = {(a, b) for a in range(3) for b in range(3) if a != b}


def cyc(walk, i=0):
    return CycleRoute(i, walk[0], tuple(walk))


def test_ordered_pairs_triangle():
    c = cyc([0, 1, 2, 0])
    assert ordered_pairs(c, FORWARD) == ALL3 - {(2, 1)}
    assert ordered_pairs(c, BACKWARD) == ALL3 - {(1, 2)}


def test_ordered_pairs_revisit_uses_best_position():
    # 1 appears twice, so it both precedes and follows 2
    c = cyc([0, 1, 2, 3, 1, 4, 0])
    got = ordered_pairs(c)
    assert (1, 2) in got and (2, 1) in got
    assert got == walk_pairs(c.walk)


def test_members_only_drops_pass_through():
    c = CycleRoute(0, 0, (0, 1, 2, 0), (0, 2))
    assert ordered_pairs(c, members_only=True) == {(0, 2), (2, 0)}
    assert len(ordered_pairs(c)) == 5


def test_algorithm1_single_triangle():
    a, pc = initial_cycle_direction([cyc([0, 1, 2, 0])])
    assert a.directions == [FORWARD]
    assert int((pc.counts > 0).sum()) == 5
    assert a.missing == {(2, 1)}


def test_algorithm1_two_identical_cycles():
    a, _ = initial_cycle_direction([cyc([0, 1, 2, 0]), cyc([0, 1, 2, 0], 1)])
    assert a.directions == [FORWARD, BACKWARD]
    assert a.missing == frozenset()


def test_algorithm1_two_cycle():
    a, _ = initial_cycle_direction([cyc([0, 1, 0])])
    assert a.directions == [FORWARD] and not a.missing


def test_algorithm2_fixed_point():
    cycles = [cyc([0, 1, 2, 0]), cyc([0, 1, 2, 0], 1)]
    a, pc = initial_cycle_direction(cycles)
    out = greedy_update_cycle_direction(cycles, a, pc)
    assert out.directions == a.directions
    assert out.passes == 1


def test_algorithm2_small_instance_is_optimal():
    walks = [[0, 1, 2, 0], [0, 1, 3, 0], [1, 2, 3, 1]]
    cycles = [cyc(w, i) for i, w in enumerate(walks)]
    out, _ = greedy_directions(cycles, n=4)
    assert len(out.missing) == exhaustive_min_missing(walks, 4)
    assert out.missing == missing_for(walks, [d is FORWARD for d in out.directions], 4)


def test_algorithm2_rejects_inconsistent_pc():
    cycles = [cyc([0, 1, 2, 0])]
    a, pc = initial_cycle_direction(cycles)
    pc.counts[0, 1] += 1
    with pytest.raises(ValueError, match="inconsistent"):
        greedy_update_cycle_direction(cycles, a, pc)


def test_assign_forward():
    assert assign_forward([cyc([0, 1, 2, 0])]).missing == {(2, 1)}
    assert not assign_forward([cyc([0, 1, 0])]).missing
    with pytest.raises(ValueError):
        assign_forward([])


def test_assign_random_deterministic():
    cycles = [cyc([0, 1, 2, 0], i) for i in range(50)]
    assert assign_random(cycles, 7).directions == assign_random(cycles, 7).directions
    for s in range(5):
        assert not assign_random([cyc([0, 1, 0])], s).missing


def test_assign_random_fair_coin():
    cycles = [cyc([0, 1, 0], i) for i in range(1000)]
    ok = 0
    for seed in range(200):
        d = assign_random(cycles, seed, n=2).directions
        frac = sum(x is FORWARD for x in d) / 1000
        ok += 0.45 <= frac <= 0.55
    assert ok >= 0.95 * 200


def test_expand_paired():
    c = cyc([0, 1, 2, 0])
    twins = expand_paired([c])
    assert [t.direction for t in twins] == [FORWARD, BACKWARD]
    assert ordered_pairs(twins[0]) | ordered_pairs(twins[1]) == ALL3
    assert expand_paired([]) == []
    cycles = [c, cyc([0, 1, 0], 1)]
    assert links_used(expand_paired(cycles)) == 2 * links_used(cycles)


def test_missing_pairs_examples():
    full = PairCoverage(3, np.ones((3, 3), dtype=np.int64))
    assert missing_pairs(full) == set() and missing_fraction(full) == 0.0
    pc = rebuild_coverage([cyc([0, 1, 2, 0])], [FORWARD], 3)
    assert missing_pairs(pc) == {(2, 1)}
    assert round(100 * missing_fraction(pc), 1) == 16.7
    assert missing_pairs(PairCoverage(3)) == ALL3


def test_dump_formats():
    assert format_directions([FORWARD, BACKWARD]) == "0 F\n1 B\n"
    assert format_pairs({(2, 1), (0, 3)}) == "0 3\n2 1\n"


# random edge-simple closed walks on K_n
@st.composite
def closed_walks(draw, n_max=8):
    n = draw(st.integers(3, n_max))
    hub = draw(st.integers(0, n - 1))
    walk, used = [hub], set()
    for _ in range(draw(st.integers(2, 12))):
        u = walk[-1]
        opts = [v for v in range(n) if v != u and frozenset((u, v)) not in used]
        if not opts:
            break
        v = draw(st.sampled_from(opts))
        used.add(frozenset((u, v)))
        walk.append(v)
    back = frozenset((walk[-1], hub))
    if walk[-1] == hub:
        pass
    elif back in used:
        # truncate to the last return to hub, or fall back to a triangle
        while walk[-1] != hub and len(walk) > 1:
            walk.pop()
        if len(walk) < 3:
            a, b = [v for v in range(n) if v != hub][:2]
            walk = [hub, a, b]
        else:
            return n, tuple(walk)
    walk.append(hub)
    return n, tuple(walk)


@given(closed_walks())
@settings(max_examples=300, deadline=None)
def test_pairs_match_enumeration(nw):
    _, walk = nw
    c = cyc(list(walk))
    assert ordered_pairs(c, FORWARD) == walk_pairs(walk)
    assert ordered_pairs(c, BACKWARD) == walk_pairs(walk[::-1])


@given(st.integers(3, 12))
def test_simple_cycle_closed_form(k):
    c = cyc(list(range(k)) + [0])
    f = ordered_pairs(c, FORWARD)
    miss = (k - 1) * (k - 2) // 2
    assert len(f) == 2 * (k - 1) + miss
    assert k * (k - 1) - len(f) == miss


@st.composite
def instances(draw):
    cs = [draw(closed_walks(6)) for _ in range(draw(st.integers(1, 7)))]
    n = max(n for n, _ in cs)
    return n, [w for _, w in cs]


@given(instances())
@settings(max_examples=150, deadline=None)
def test_incremental_matches_rebuild(inst):
    n, walks = inst
    cycles = [cyc(list(w), i) for i, w in enumerate(walks)]

    def shadow(i, dirs, pc):
        # steps past i still hold their previous choice, so rebuild the visited prefix only
        assert pc == rebuild_coverage(cycles[: len(dirs)], dirs, n)

    init, pc = initial_cycle_direction(cycles, n, on_step=shadow)

    def full(i, dirs, pc):
        assert pc == rebuild_coverage(cycles, dirs, n)

    out = greedy_update_cycle_direction(cycles, init, pc, on_step=full)
    assert len(out.missing) <= len(init.missing)
    assert out.passes <= n * n
    opt = exhaustive_min_missing(walks, n)
    assert len(out.missing) >= opt


def test_assignment_len():
    assert len(DirectionAssignment([FORWARD], frozenset())) == 1
