"""Capability-set cosine similarity, the three-level similarity scale,
cluster-view construction and leader selection.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Set

from .capabilities import CapabilitySet
from .model import NodeId, NodeState

log = logging.getLogger(__name__)


class SimilarityLevel(Enum):
    S1_DISSIMILAR = "S1"
    S2_NEUTRAL = "S2"
    S3_SIMILAR = "S3"


@dataclass(frozen=True)
class SimilarityScale:
    """Score bands: S1 below neutral_lo, S2 in [neutral_lo, similar_lo),
    S3 at or above similar_lo. join_threshold gates cluster membership."""

    neutral_lo: float = 0.5
    similar_lo: float = 0.9
    join_threshold: float = 0.8

    def __post_init__(self) -> None:
        if not 0.0 <= self.neutral_lo <= self.similar_lo <= 1.0:
            raise ValueError("scale bands must satisfy 0 <= neutral_lo <= similar_lo <= 1")
        if not self.neutral_lo <= self.join_threshold <= 1.0:
            raise ValueError("join_threshold must lie in [neutral_lo, 1]")


def similarity(a: CapabilitySet, b: CapabilitySet) -> float:
    """Cosine similarity of two nonempty capability sets.

    |a & b| / sqrt(|a| * |b|), symmetric, in [0, 1], and exactly 1.0 iff the
    sets are equal.
    """
    if not a or not b:
        raise ValueError("similarity is undefined for empty capability sets")
    return len(a & b) / math.sqrt(len(a) * len(b))


def classify(score: float, scale: SimilarityScale) -> SimilarityLevel:
    """Map a similarity score to its level on the scale."""
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"similarity score out of range: {score}")
    if score < scale.neutral_lo:
        return SimilarityLevel.S1_DISSIMILAR
    if score < scale.similar_lo:
        return SimilarityLevel.S2_NEUTRAL
    return SimilarityLevel.S3_SIMILAR


def build_cluster_view(node: NodeState, scale: SimilarityScale) -> Set[NodeId]:
    """Neighbors whose capability similarity with this node meets the join
    threshold. Pure function of the neighbor table; recomputable at any time.
    """
    view: Set[NodeId] = set()
    if not node.capabilities:
        log.warning("node %d has no capabilities; cluster view left empty", node.id)
        return view
    for nid in sorted(node.neighbor_table):
        info = node.neighbor_table[nid]
        if not info.caps:
            log.warning("node %d: skipping neighbor %d with empty capability set", node.id, nid)
            continue
        if similarity(node.capabilities, info.caps) >= scale.join_threshold:
            view.add(nid)
    return view


def select_leader(node: NodeState) -> NodeId:
    """Leader for this node's cluster view: the candidate (view plus self)
    with the greatest neighborhood size, ties broken by largest capability
    set, then by smallest id. Total order, so enumeration order is irrelevant.
    """
    best_id = node.id
    best_key = (len(node.neighbor_table), len(node.capabilities), -node.id)
    for nid in node.cluster_view:
        info = node.neighbor_table[nid]
        key = (info.neighborhood_size, len(info.caps), -nid)
        if key > best_key:
            best_key = key
            best_id = nid
    return best_id
