"""Cluster a small fleet by packet holdings and watch the stages work.

UAVs that hold near-identical packet sets cannot repair each other, so the
initialization splits the most-similar pair into different clusters, and the
merging rounds then pull in whichever pool UAV is most *different* from each
cluster's combined holdings.
"""

import numpy as np

from uavex import (
    IndicatorVector,
    cluster_network,
    hamming_distance,
    initialize_clusters,
    merge_iteration,
    stream,
)

fleet = [
    IndicatorVector((1, 1, 1, 1, 1, 0)),
    IndicatorVector((0, 1, 1, 1, 1, 1)),
    IndicatorVector((0, 0, 1, 0, 1, 0)),
    IndicatorVector((1, 1, 0, 1, 0, 1)),
]

print("pairwise Hamming distances:")
for i in range(len(fleet)):
    for j in range(i + 1, len(fleet)):
        print(f"  uav{i} vs uav{j}: {hamming_distance(fleet[i], fleet[j])}")

members, pool = initialize_clusters(fleet, 2, stream(0, 0, "tie-break"))
print(f"\nseeds after pair extraction: {members}, pool: {sorted(pool)}")

members, vectors, pool = merge_iteration(
    members, [fleet[m[0]] for m in members], pool, fleet
)
print("after one merging round:")
for n, (group, vec) in enumerate(zip(members, vectors)):
    print(f"  cluster {n}: members {group}, combined holdings {vec.bits}")

assignment = cluster_network(fleet, 2, stream(0, 0, "tie-break"))
print(f"\nfinal partition: {assignment.members}")
print(f"full clusters: {assignment.full_cluster_count()} of {assignment.num_clusters}")

# A bigger random fleet: complement-driven grouping vs what chance would give.
rng = np.random.default_rng(1)
big_fleet = [
    IndicatorVector(tuple(int(b) for b in rng.random(6) < 0.7)) for _ in range(10)
]
assignment = cluster_network(big_fleet, 3, stream(0, 0, "tie-break"))
print("\n10-UAV fleet at delivery rate 0.7, 3 clusters:")
for n, group in enumerate(assignment.members):
    full = "complete" if assignment.cluster_vectors[n].is_full() else "incomplete"
    print(f"  cluster {n}: {group} -> {full}")
