"""Replay the canonical four-UAV exchange and read the event trace.

UAV 2 misses four of six packets, so it wins the channel first; UAV 3 can
supply all four, so it wins the reply; two bystanders complete just by
overhearing. One more request-reply round finishes the whole fleet: two
transactions in total, no matter the seed.
"""

from uavex import (
    IndicatorVector,
    Scheme,
    TimingConfig,
    packet_label,
    run_cluster_exchange,
    stream,
    trace_line,
)

holdings = {
    0: IndicatorVector((1, 1, 0, 1, 0, 0)),
    1: IndicatorVector((0, 1, 1, 1, 1, 1)),
    2: IndicatorVector((0, 0, 1, 0, 1, 0)),
    3: IndicatorVector((1, 1, 1, 1, 0, 1)),
}

print("initial holdings:")
for uav, vec in holdings.items():
    labels = ",".join(packet_label(p) for p in sorted(vec.held_packets()))
    print(f"  uav{uav}: {labels}")

trace = []
result = run_cluster_exchange(
    members=list(holdings),
    holdings=holdings,
    timing=TimingConfig(),
    scheme=Scheme.MECHANISM_ONLY,
    rng=stream(42, 0, "backoff/0"),
    trace=trace,
)

print("\nevent trace:")
for record in trace:
    print(" ", trace_line(record))

print(
    f"\nexchanges={result.exchange_count} delay={result.delay_us}us "
    f"completed={result.completed} collisions={result.collision_count}"
)
