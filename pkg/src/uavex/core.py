"""Shared domain types: packet indicator vectors, scenario configuration, seeded streams."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

UavId = int
ClusterId = int
PacketId = int

Rng = np.random.Generator


def packet_label(packet: PacketId) -> str:
    """Display label for a packet id: internal ids are 0-based, labels 1-based (w1, w2, ...)."""
    return f"w{packet + 1}"


class Scheme(Enum):
    """Which exchange variant a scenario runs."""

    PROPOSED = "proposed"                # clustering + priority backoff
    MECHANISM_ONLY = "mechanism_only"    # priority backoff, single cluster
    BASELINE_CSMA = "baseline_csma"      # plain uniform backoff, single cluster

    @property
    def uses_priority_backoff(self) -> bool:
        return self is not Scheme.BASELINE_CSMA

    @property
    def uses_clustering(self) -> bool:
        return self is Scheme.PROPOSED


@dataclass(frozen=True)
class IndicatorVector:
    """Fixed-length binary vector; position m holds 1 iff packet m is possessed.

    Immutable value type. The length is the scenario's packet count and never
    changes; combining vectors produces new instances.
    """

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.bits) == 0:
            raise ValueError("indicator vector must have at least one position")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("indicator bits must be exactly 0 or 1")
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))

    @classmethod
    def zeros(cls, length: int) -> IndicatorVector:
        return cls((0,) * length)

    @classmethod
    def ones(cls, length: int) -> IndicatorVector:
        return cls((1,) * length)

    @classmethod
    def from_packets(cls, packets: Iterable[PacketId], length: int) -> IndicatorVector:
        """Vector with 1s at the given packet ids and 0s elsewhere."""
        held = set(packets)
        bad = [p for p in held if not 0 <= p < length]
        if bad:
            raise ValueError(f"packet ids out of range [0, {length}): {sorted(bad)}")
        return cls(tuple(1 if m in held else 0 for m in range(length)))

    def __len__(self) -> int:
        return len(self.bits)

    def __or__(self, other: IndicatorVector) -> IndicatorVector:
        return or_update(self, other)

    def popcount(self) -> int:
        return sum(self.bits)

    def is_full(self) -> bool:
        return all(b == 1 for b in self.bits)

    def held_packets(self) -> frozenset[PacketId]:
        return frozenset(m for m, b in enumerate(self.bits) if b == 1)

    def with_packets(self, packets: Iterable[PacketId]) -> IndicatorVector:
        """New vector with the given packet ids switched on."""
        return self | IndicatorVector.from_packets(packets, len(self))


def or_update(cluster_vec: IndicatorVector, uav_vec: IndicatorVector) -> IndicatorVector:
    """Element-wise logical OR of two equal-length indicator vectors."""
    if len(cluster_vec) != len(uav_vec):
        raise ValueError(
            f"length mismatch: {len(cluster_vec)} vs {len(uav_vec)}"
        )
    return IndicatorVector(tuple(a | b for a, b in zip(cluster_vec.bits, uav_vec.bits)))


def missing_set(v: IndicatorVector) -> frozenset[PacketId]:
    """Packet ids whose bit is 0 (the complement of the held set)."""
    return frozenset(m for m, b in enumerate(v.bits) if b == 0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Inputs of one Monte-Carlo scenario."""

    num_uavs: int
    num_packets: int
    delivery_rate: float
    num_clusters: int
    scheme: Scheme = Scheme.PROPOSED
    seed: int = 0
    runs: int = 500

    def __post_init__(self) -> None:
        if self.num_uavs < 1:
            raise ValueError("num_uavs must be positive")
        if self.num_packets < 1:
            raise ValueError("num_packets must be positive")
        if not 0.0 <= self.delivery_rate <= 1.0:
            raise ValueError("delivery_rate must lie in [0, 1]")
        if not 1 <= self.num_clusters <= self.num_uavs:
            raise ValueError("num_clusters must lie in [1, num_uavs]")
        if not isinstance(self.scheme, Scheme):
            object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.runs < 1:
            raise ValueError("runs must be positive")


def _label_entropy(label: str) -> int:
    # Stable across processes and platforms, unlike the built-in hash().
    digest = hashlib.blake2s(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def stream(seed: int, run_index: int, label: str) -> Rng:
    """Deterministic generator for one (master seed, run index, purpose) triple.

    Identical triples yield identical streams; distinct run indices or labels
    yield statistically independent streams, so adding a consumer under a new
    label never perturbs existing ones.
    """
    if seed < 0 or run_index < 0:
        raise ValueError("seed and run_index must be non-negative")
    seq = np.random.SeedSequence(entropy=(seed, run_index, _label_entropy(label)))
    return np.random.default_rng(seq)


class RunStreams:
    """Per-purpose random streams for one Monte-Carlo run."""

    def __init__(self, seed: int, run_index: int = 0):
        self.seed = seed
        self.run_index = run_index

    def stream(self, label: str) -> Rng:
        return stream(self.seed, self.run_index, label)
