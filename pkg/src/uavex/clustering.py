"""Complement-driven clustering of UAVs by packet holdings.

The grouping goal is the opposite of classic similarity clustering: UAVs whose
holdings differ the most can repair each other, so near-duplicates seed
*different* clusters and each cluster greedily absorbs the most-distant
remaining UAV, one per cluster per round, which keeps cluster sizes within one
of each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import ClusterId, IndicatorVector, Rng, UavId, or_update


class InfeasibleClusterCount(ValueError):
    """Raised when the requested cluster count cannot be seeded from the fleet."""


def hamming_distance(a: IndicatorVector, b: IndicatorVector) -> int:
    """Number of positions where two equal-length indicator vectors differ."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a.bits, b.bits))


@dataclass(frozen=True)
class ClusterAssignment:
    """A partition of UAV ids into clusters plus each cluster's combined holdings.

    members[n] lists cluster n's UAVs in join order; cluster_vectors[n] is the
    OR of all member vectors.
    """

    members: tuple[tuple[UavId, ...], ...]
    cluster_vectors: tuple[IndicatorVector, ...]

    @property
    def num_clusters(self) -> int:
        return len(self.members)

    def cluster_of(self, uav: UavId) -> ClusterId:
        for n, group in enumerate(self.members):
            if uav in group:
                return n
        raise KeyError(f"uav {uav} is not assigned")

    def full_cluster_count(self) -> int:
        return sum(1 for v in self.cluster_vectors if v.is_full())

    def validate(self, vectors: Sequence[IndicatorVector]) -> None:
        """Check the partition, balance, and vector-consistency invariants."""
        seen: list[UavId] = [u for group in self.members for u in group]
        if sorted(seen) != list(range(len(vectors))):
            raise AssertionError("members do not form a partition of all UAVs")
        sizes = [len(group) for group in self.members]
        if max(sizes) - min(sizes) > 1:
            raise AssertionError(f"cluster sizes {sizes} differ by more than 1")
        for group, vec in zip(self.members, self.cluster_vectors):
            combined = vectors[group[0]]
            for u in group[1:]:
                combined = or_update(combined, vectors[u])
            if combined != vec:
                raise AssertionError("stored cluster vector differs from member OR")


def _check_feasible(num_uavs: int, num_clusters: int) -> None:
    if num_clusters < 1:
        raise InfeasibleClusterCount("cluster count must be at least 1")
    if num_clusters > num_uavs:
        raise InfeasibleClusterCount(
            f"cannot form {num_clusters} clusters from {num_uavs} UAVs"
        )
    if num_clusters % 2 == 1 and num_clusters + 1 > num_uavs:
        raise InfeasibleClusterCount(
            f"odd cluster count {num_clusters} needs {num_clusters + 1} seed UAVs, "
            f"got {num_uavs}"
        )


def _min_distance_pair(
    vectors: Sequence[IndicatorVector], pool: set[UavId]
) -> tuple[UavId, UavId]:
    # Lexicographically smallest pair wins ties.
    candidates = sorted(pool)
    best: tuple[UavId, UavId] | None = None
    best_dist: int | None = None
    for idx, i in enumerate(candidates):
        for j in candidates[idx + 1:]:
            d = hamming_distance(vectors[i], vectors[j])
            if best_dist is None or d < best_dist:
                best, best_dist = (i, j), d
    assert best is not None
    return best


def initialize_clusters(
    vectors: Sequence[IndicatorVector], num_clusters: int, rng: Rng
) -> tuple[list[list[UavId]], set[UavId]]:
    """Seed the clusters by repeatedly extracting minimum-distance UAV pairs.

    The two UAVs of each extracted pair become two singleton clusters (similar
    UAVs must end up apart). Pair extraction always removes an even number of
    UAVs, so an odd target first extracts one extra seed and then returns one
    of them, chosen uniformly at random, to the pool.

    Returns the singleton member lists and the pool of unassigned UAVs.
    """
    _check_feasible(len(vectors), num_clusters)
    need = num_clusters if num_clusters % 2 == 0 else num_clusters + 1
    pool = set(range(len(vectors)))
    seeds: list[UavId] = []
    while len(seeds) < need:
        i, j = _min_distance_pair(vectors, pool)
        pool.discard(i)
        pool.discard(j)
        seeds.extend((i, j))
    if num_clusters % 2 == 1:
        dropped = seeds.pop(int(rng.integers(0, len(seeds))))
        pool.add(dropped)
    return [[s] for s in seeds], pool


def merge_iteration(
    members: Sequence[Sequence[UavId]],
    cluster_vectors: Sequence[IndicatorVector],
    pool: set[UavId],
    vectors: Sequence[IndicatorVector],
) -> tuple[list[list[UavId]], list[IndicatorVector], set[UavId]]:
    """One merging round: every cluster absorbs at most one pool UAV.

    Each pick takes the cluster-UAV pair with the *largest* Hamming distance
    (lexicographically smallest pair on ties), removes both from contention,
    and appends the UAV to the cluster. Distances are evaluated against the
    vectors as they stood when the round began; the OR updates are applied in
    one batch after the round, so earlier picks do not skew later ones.
    """
    if not pool:
        raise ValueError("pool must be non-empty")
    new_members = [list(group) for group in members]
    new_pool = set(pool)
    start_vectors = list(cluster_vectors)
    open_clusters = set(range(len(new_members)))
    joined: list[tuple[ClusterId, UavId]] = []
    while open_clusters and new_pool:
        best: tuple[ClusterId, UavId] | None = None
        best_dist = -1
        for n in sorted(open_clusters):
            for i in sorted(new_pool):
                d = hamming_distance(start_vectors[n], vectors[i])
                if d > best_dist:
                    best, best_dist = (n, i), d
        assert best is not None
        n_star, i_star = best
        open_clusters.discard(n_star)
        new_pool.discard(i_star)
        new_members[n_star].append(i_star)
        joined.append((n_star, i_star))
    new_vectors = list(start_vectors)
    for n, i in joined:
        new_vectors[n] = or_update(new_vectors[n], vectors[i])
    return new_members, new_vectors, new_pool


def cluster_network(
    vectors: Sequence[IndicatorVector], num_clusters: int, rng: Rng
) -> ClusterAssignment:
    """Partition all UAVs into the requested number of clusters.

    Deterministic for a fixed (vectors, num_clusters, rng stream); the stream
    is consumed only for the odd-count seed drop. A single-cluster request
    short-circuits to "everyone together", which is what the no-clustering
    exchange variants use.
    """
    if num_clusters == 1:
        combined = vectors[0]
        for v in vectors[1:]:
            combined = or_update(combined, v)
        return ClusterAssignment((tuple(range(len(vectors))),), (combined,))
    members, pool = initialize_clusters(vectors, num_clusters, rng)
    cluster_vectors = [vectors[group[0]] for group in members]
    while pool:
        members, cluster_vectors, pool = merge_iteration(
            members, cluster_vectors, pool, vectors
        )
    return ClusterAssignment(
        tuple(tuple(group) for group in members), tuple(cluster_vectors)
    )


def full_set_rate(assignments: Sequence[ClusterAssignment]) -> float:
    """Fraction of clusters, across all assignments, whose combined holdings are complete."""
    if not assignments:
        raise ValueError("need at least one assignment")
    total = sum(a.num_clusters for a in assignments)
    full = sum(a.full_cluster_count() for a in assignments)
    return full / total
