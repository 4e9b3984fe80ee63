"""Cluster-based cooperative packet recovery for UAV swarms.

A fleet that receives a common packet set over a lossy broadcast link can
repair itself peer-to-peer: UAVs are grouped so that cluster mates hold
complementary packets, and a priority backoff lets the neediest requester and
the best-stocked replier win the channel first. This package provides the
clustering, the contention-window model, a deterministic discrete-event
simulator of the exchange, and a Monte-Carlo experiment harness.
"""

from .clustering import (
    ClusterAssignment,
    InfeasibleClusterCount,
    cluster_network,
    full_set_rate,
    hamming_distance,
    initialize_clusters,
    merge_iteration,
)
from .core import (
    IndicatorVector,
    RunStreams,
    ScenarioConfig,
    Scheme,
    missing_set,
    or_update,
    packet_label,
    stream,
)
from .experiments import (
    AggregateRow,
    SweepSpec,
    compare_schemes,
    full_set_rate_samples,
    rows_to_csv,
    scheme_metric_samples,
    sweep_full_set_rate,
)
from .mac import (
    BackoffDraw,
    FrameKind,
    TimingConfig,
    draw_backoff,
    draw_baseline_backoff,
    frame_duration,
    subwindow_bounds,
    subwindow_for_count,
)
from .protocol import (
    Frame,
    TraceRecord,
    UavProtocolState,
    absorb_reply,
    build_reply,
    build_request,
    cancel_reply_if_answered,
    decide_reply,
    decide_request,
    mark_unobtainable,
    trace_line,
)
from .simulator import (
    ClusterResult,
    Event,
    EventKind,
    RunResult,
    run_cluster_exchange,
    run_scenario,
    sample_initial_receipts,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateRow",
    "BackoffDraw",
    "ClusterAssignment",
    "ClusterResult",
    "Event",
    "EventKind",
    "Frame",
    "FrameKind",
    "IndicatorVector",
    "InfeasibleClusterCount",
    "RunResult",
    "RunStreams",
    "ScenarioConfig",
    "Scheme",
    "SweepSpec",
    "TimingConfig",
    "TraceRecord",
    "UavProtocolState",
    "absorb_reply",
    "build_reply",
    "build_request",
    "cancel_reply_if_answered",
    "cluster_network",
    "compare_schemes",
    "decide_reply",
    "decide_request",
    "draw_backoff",
    "draw_baseline_backoff",
    "frame_duration",
    "full_set_rate",
    "full_set_rate_samples",
    "hamming_distance",
    "initialize_clusters",
    "mark_unobtainable",
    "merge_iteration",
    "missing_set",
    "or_update",
    "packet_label",
    "rows_to_csv",
    "run_cluster_exchange",
    "run_scenario",
    "sample_initial_receipts",
    "scheme_metric_samples",
    "stream",
    "subwindow_bounds",
    "subwindow_for_count",
    "sweep_full_set_rate",
    "trace_line",
]
