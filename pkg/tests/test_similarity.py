"""Cosine similarity, the S1/S2/S3 scale, cluster views, leader selection."""

import math
import random

import pytest

from capsim.capabilities import Capability
from capsim.model import NeighborInfo, NodeState, Position
from capsim.similarity import (
    SimilarityLevel,
    SimilarityScale,
    build_cluster_view,
    classify,
    select_leader,
    similarity,
)

CAPS = list(Capability)
C1, C2, C3, C4, C5 = CAPS[:5]


def make_node(node_id, caps, neighbors):
    node = NodeState(id=node_id, pos=Position(0, 0), capabilities=frozenset(caps))
    for nid, (ncaps, size) in neighbors.items():
        node.neighbor_table[nid] = NeighborInfo(frozenset(ncaps), size)
    return node


def test_identical_sets_score_one():
    a = frozenset({C1, C2, C3})
    assert similarity(a, a) == 1.0


def test_worked_superset_example():
    a = frozenset({C1, C2, C3})
    b = frozenset({C1, C2, C3, C4})
    assert similarity(a, b) == pytest.approx(3 / math.sqrt(12), abs=1e-12)
    assert similarity(a, b) == pytest.approx(0.8660254037844386, abs=1e-12)


def test_disjoint_sets_score_zero():
    assert similarity(frozenset({C1}), frozenset({Capability.ECG})) == 0.0


def test_empty_set_is_domain_error():
    with pytest.raises(ValueError):
        similarity(frozenset(), frozenset({C1}))
    with pytest.raises(ValueError):
        similarity(frozenset({C1}), frozenset())


def test_similarity_properties_random():
    rng = random.Random(11)
    for _ in range(500):
        a = frozenset(rng.sample(CAPS, rng.randint(1, 12)))
        b = frozenset(rng.sample(CAPS, rng.randint(1, 12)))
        s = similarity(a, b)
        assert 0.0 <= s <= 1.0
        assert s == similarity(b, a)
        assert similarity(a, a) == 1.0
        # 1.0 exactly iff equal as sets
        assert (s == 1.0) == (a == b)


def test_shared_capability_monotonicity():
    # swap an unshared element in each set for a shared one, sizes fixed
    rng = random.Random(23)
    for _ in range(200):
        a = set(rng.sample(CAPS, rng.randint(2, 8)))
        b = set(rng.sample(CAPS, rng.randint(2, 8)))
        only_a = a - b
        only_b = b - a
        free = [c for c in CAPS if c not in a and c not in b]
        if not only_a or not only_b or not free:
            continue
        before = similarity(frozenset(a), frozenset(b))
        shared = free[0]
        a2 = (a - {next(iter(only_a))}) | {shared}
        b2 = (b - {next(iter(only_b))}) | {shared}
        after = similarity(frozenset(a2), frozenset(b2))
        assert after >= before


def test_classify_bands():
    scale = SimilarityScale()
    assert classify(0.0, scale) is SimilarityLevel.S1_DISSIMILAR
    assert classify(1.0, scale) is SimilarityLevel.S3_SIMILAR
    assert classify(0.87, scale) is SimilarityLevel.S2_NEUTRAL
    assert classify(0.5, scale) is SimilarityLevel.S2_NEUTRAL  # inclusive lower bound
    assert classify(0.9, scale) is SimilarityLevel.S3_SIMILAR


def test_classify_rejects_out_of_range():
    with pytest.raises(ValueError):
        classify(1.5, SimilarityScale())


def test_scale_validation():
    with pytest.raises(ValueError):
        SimilarityScale(neutral_lo=0.9, similar_lo=0.5)
    with pytest.raises(ValueError):
        SimilarityScale(neutral_lo=0.5, similar_lo=0.9, join_threshold=0.2)


def test_cluster_view_thresholding():
    base = {C1, C2, C3}
    node = make_node(
        0,
        base,
        {
            1: (base, 2),
            2: (base | {C4}, 3),
            3: ({C5}, 1),
        },
    )
    view = build_cluster_view(node, SimilarityScale(join_threshold=0.8))
    assert view == {1, 2}  # 1.0 and 0.866 join; the dissimilar neighbor does not


def test_cluster_view_empty_table():
    node = make_node(0, {C1}, {})
    assert build_cluster_view(node, SimilarityScale()) == set()


def test_cluster_view_skips_empty_capability_neighbor():
    node = make_node(0, {C1, C2}, {1: ({C1, C2}, 1), 2: (set(), 5)})
    view = build_cluster_view(node, SimilarityScale())
    assert view == {1}


def test_cluster_view_idempotent():
    node = make_node(0, {C1, C2}, {1: ({C1, C2}, 1), 2: ({C3}, 1)})
    scale = SimilarityScale()
    assert build_cluster_view(node, scale) == build_cluster_view(node, scale)


def test_cluster_view_matches_brute_force_random():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(2, 10)
        caps = [frozenset(rng.sample(CAPS, rng.randint(1, 12))) for _ in range(n)]
        threshold = rng.choice([0.5, 0.7, 0.8, 0.9])
        scale = SimilarityScale(neutral_lo=0.4, similar_lo=0.95, join_threshold=threshold)
        node = make_node(0, caps[0], {i: (caps[i], 1) for i in range(1, n)})
        # oracle: exhaustive pairwise check, formula written out independently
        expected = set()
        for i in range(1, n):
            inter = len(caps[0] & caps[i])
            if inter / math.sqrt(len(caps[0]) * len(caps[i])) >= threshold:
                expected.add(i)
        assert build_cluster_view(node, scale) == expected


def test_select_leader_ties_broken_by_capability_count():
    # both candidates tie on neighborhood size; larger capability set wins
    node = make_node(0, {C1}, {1: ({C1, C2, C3}, 3), 2: ({C1, C2, C3, C4}, 3)})
    node.cluster_view = {1, 2}
    assert select_leader(node) == 2


def test_select_leader_singleton_cluster_is_self():
    node = make_node(9, {C1}, {})
    assert select_leader(node) == 9


def test_select_leader_final_tie_smallest_id():
    node = make_node(5, {C1}, {1: ({C1, C2}, 2), 3: ({C2, C3}, 2)})
    node.cluster_view = {1, 3}
    assert select_leader(node) == 1


def test_select_leader_order_invariant():
    rng = random.Random(17)
    for _ in range(100):
        n = rng.randint(1, 8)
        neighbors = {
            i: (frozenset(rng.sample(CAPS, rng.randint(1, 12))), rng.randint(0, 10))
            for i in range(1, n + 1)
        }
        node = make_node(0, rng.sample(CAPS, rng.randint(1, 12)), neighbors)
        node.cluster_view = set(neighbors)
        winner = select_leader(node)
        # recompute over shuffled enumeration: same winner
        ids = list(node.cluster_view)
        rng.shuffle(ids)
        node.cluster_view = set(ids)
        assert select_leader(node) == winner
        # winner really is the lexicographic max of (size, caps, -id)
        keys = {nid: (neighbors[nid][1], len(neighbors[nid][0]), -nid) for nid in neighbors}
        keys[0] = (len(node.neighbor_table), len(node.capabilities), 0)
        assert keys[winner] == max(keys.values())


def test_four_object_worked_example():
    """Three identical objects plus a superset object with the densest
    neighborhood: the superset object is elected everywhere."""
    base = frozenset({C1, C2, C3})
    rich = base | {C4}
    caps = {1: base, 2: base, 3: rich, 4: base}
    nodes = {}
    for nid, own in caps.items():
        neighbors = {other: (caps[other], 3) for other in caps if other != nid}
        nodes[nid] = make_node(nid, own, neighbors)
    scale = SimilarityScale(join_threshold=0.8)
    for node in nodes.values():
        node.cluster_view = build_cluster_view(node, scale)
        assert node.cluster_view == set(caps) - {node.id}  # sims are 1.0 or 0.866
    winners = {select_leader(node) for node in nodes.values()}
    assert winners == {3}
