"""Independent straight-line oracles used by the tests.

Deliberately dumb: plain tuples of bits, explicit nested loops, no imports
from the library under test. Tie-breaks match the library's documented rules
(lexicographically smallest pair wins), and the odd-count seed drop consumes
exactly one integers(0, n_seeds) draw so a shared stream stays aligned.
"""

from __future__ import annotations


def hamming(a, b):
    assert len(a) == len(b)
    count = 0
    for x, y in zip(a, b):
        if x != y:
            count += 1
    return count


def or_bits(a, b):
    return tuple(x | y for x, y in zip(a, b))


def brute_force_cluster(vectors, num_clusters, rng):
    """Literal two-stage clustering: pair-seeded init, then max-distance rounds.

    Returns (members, cluster_vectors) as plain lists/tuples.
    """
    num_uavs = len(vectors)
    if num_clusters == 1:
        union = vectors[0]
        for v in vectors[1:]:
            union = or_bits(union, v)
        return [list(range(num_uavs))], [union]

    # Stage 1: repeatedly extract the minimum-distance pair.
    need = num_clusters if num_clusters % 2 == 0 else num_clusters + 1
    assert need <= num_uavs
    pool = list(range(num_uavs))
    seeds = []
    while len(seeds) < need:
        best_pair = None
        best_dist = None
        for ai in range(len(pool)):
            for bi in range(ai + 1, len(pool)):
                d = hamming(vectors[pool[ai]], vectors[pool[bi]])
                if best_dist is None or d < best_dist:
                    best_pair = (pool[ai], pool[bi])
                    best_dist = d
        seeds.append(best_pair[0])
        seeds.append(best_pair[1])
        pool.remove(best_pair[0])
        pool.remove(best_pair[1])
    if num_clusters % 2 == 1:
        dropped = seeds.pop(int(rng.integers(0, len(seeds))))
        pool.append(dropped)
        pool.sort()

    members = [[s] for s in seeds]
    cluster_vectors = [vectors[s] for s in seeds]

    # Stage 2: merging rounds until the pool is empty.
    while pool:
        open_clusters = list(range(num_clusters))
        start_vectors = list(cluster_vectors)
        joined = []
        while open_clusters and pool:
            best = None
            best_dist = -1
            for n in open_clusters:
                for i in pool:
                    d = hamming(start_vectors[n], vectors[i])
                    if d > best_dist:
                        best = (n, i)
                        best_dist = d
            n_star, i_star = best
            open_clusters.remove(n_star)
            pool.remove(i_star)
            members[n_star].append(i_star)
            joined.append((n_star, i_star))
        for n, i in joined:
            cluster_vectors[n] = or_bits(cluster_vectors[n], vectors[i])
    return members, cluster_vectors


def single_cluster_full_rate(num_uavs, num_packets, delivery_rate):
    """Closed-form chance that every packet lands on at least one UAV."""
    return (1.0 - (1.0 - delivery_rate) ** num_uavs) ** num_packets


def replay_trace(members, holdings, trace):
    """Replay an exchange trace independently, checking the protocol rules.

    Verifies along the way: replies answer the open request with packets the
    sender really holds, at most one reply per request, and every completed
    transaction strictly shrinks the cluster's total missing count.

    Returns (final holdings as sets, remaining total missing count).
    """
    current = {u: set(holdings[u].held_packets()) for u in members}
    num_packets = len(holdings[members[0]])
    total_missing = sum(num_packets - len(current[u]) for u in members)
    open_request = None
    replies_per_request = []
    for record in trace:
        if record.event == "request":
            open_request = record
            replies_per_request.append(0)
        elif record.event == "reply":
            assert open_request is not None, "reply without an open request"
            assert record.peer == open_request.uav
            replies_per_request[-1] += 1
            assert set(record.packets) <= set(open_request.packets)
            assert set(record.packets) <= current[record.uav]
            for u in members:
                current[u] |= set(record.packets)
            new_missing = sum(num_packets - len(current[u]) for u in members)
            assert new_missing <= total_missing - 1, "transaction made no progress"
            total_missing = new_missing
            open_request = None
    assert all(n <= 1 for n in replies_per_request), "duplicate reply to one request"
    return current, total_missing
