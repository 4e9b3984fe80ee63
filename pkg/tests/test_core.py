"""Indicator-vector algebra, config validation, and stream determinism."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uavex.core import (
    IndicatorVector,
    RunStreams,
    ScenarioConfig,
    Scheme,
    missing_set,
    or_update,
    packet_label,
    stream,
)


def iv(*bits):
    return IndicatorVector(tuple(bits))


def bit_vectors(length):
    return st.tuples(*[st.integers(0, 1)] * length).map(IndicatorVector)


class TestIndicatorVector:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            IndicatorVector(())

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            IndicatorVector((0, 2, 1))

    def test_from_packets_roundtrip(self):
        v = IndicatorVector.from_packets({0, 3}, 6)
        assert v == iv(1, 0, 0, 1, 0, 0)
        assert v.held_packets() == {0, 3}

    def test_from_packets_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            IndicatorVector.from_packets({6}, 6)

    def test_popcount_and_full(self):
        assert iv(1, 0, 1).popcount() == 2
        assert IndicatorVector.ones(4).is_full()
        assert not IndicatorVector.zeros(4).is_full()


class TestOrUpdate:
    def test_worked_example(self):
        # A cluster holding {w1, w4} absorbing a member holding {w2, w5}.
        merged = or_update(iv(1, 0, 0, 1, 0, 0), iv(0, 1, 0, 0, 1, 0))
        assert merged == iv(1, 1, 0, 1, 1, 0)

    def test_identity_with_zeros(self):
        v = iv(1, 0, 1, 1, 0, 0)
        assert or_update(v, IndicatorVector.zeros(6)) == v

    def test_idempotent(self):
        v = iv(1, 0, 1, 1, 0, 0)
        assert or_update(v, v) == v

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            or_update(iv(1, 0), iv(1, 0, 0))

    @given(bit_vectors(8), bit_vectors(8))
    def test_commutative(self, a, b):
        assert or_update(a, b) == or_update(b, a)

    @given(bit_vectors(8), bit_vectors(8), bit_vectors(8))
    def test_associative(self, a, b, c):
        assert or_update(or_update(a, b), c) == or_update(a, or_update(b, c))

    @given(bit_vectors(8), bit_vectors(8))
    def test_result_dominates_inputs(self, a, b):
        merged = or_update(a, b)
        assert all(m >= x for m, x in zip(merged.bits, a.bits))
        assert all(m >= y for m, y in zip(merged.bits, b.bits))

    @given(bit_vectors(8), bit_vectors(8))
    def test_or_never_grows_missing(self, a, b):
        assert missing_set(or_update(a, b)) <= missing_set(a)


class TestMissingSet:
    def test_complement(self):
        assert missing_set(iv(1, 1, 0, 1, 1, 0)) == {2, 5}

    def test_all_ones_and_zeros(self):
        assert missing_set(IndicatorVector.ones(5)) == set()
        assert missing_set(IndicatorVector.zeros(5)) == set(range(5))

    @given(bit_vectors(10))
    def test_partition_of_positions(self, v):
        assert len(missing_set(v)) + v.popcount() == len(v)


def test_packet_label_is_one_indexed():
    assert packet_label(0) == "w1"
    assert packet_label(5) == "w6"


class TestScenarioConfig:
    def test_accepts_scheme_string(self):
        cfg = ScenarioConfig(4, 6, 0.5, 2, scheme="baseline_csma")
        assert cfg.scheme is Scheme.BASELINE_CSMA

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"num_uavs": 0},
            {"num_packets": 0},
            {"delivery_rate": 1.5},
            {"delivery_rate": -0.1},
            {"num_clusters": 0},
            {"num_clusters": 7},
            {"runs": 0},
            {"seed": -1},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        base = dict(num_uavs=6, num_packets=4, delivery_rate=0.5, num_clusters=2)
        base.update(kwargs)
        with pytest.raises(ValueError):
            ScenarioConfig(**base)


class TestStreams:
    def test_same_triple_same_stream(self):
        a = stream(99, 3, "backoff").integers(0, 1_000_000, 32)
        b = stream(99, 3, "backoff").integers(0, 1_000_000, 32)
        assert np.array_equal(a, b)

    def test_distinct_runs_differ(self):
        a = stream(99, 3, "backoff").integers(0, 1_000_000, 32)
        b = stream(99, 4, "backoff").integers(0, 1_000_000, 32)
        assert not np.array_equal(a, b)

    def test_distinct_labels_differ(self):
        a = stream(99, 3, "backoff").integers(0, 1_000_000, 32)
        b = stream(99, 3, "tie-break").integers(0, 1_000_000, 32)
        assert not np.array_equal(a, b)

    def test_run_streams_wrapper(self):
        streams = RunStreams(5, run_index=2)
        direct = stream(5, 2, "bs-delivery").random(8)
        assert np.array_equal(streams.stream("bs-delivery").random(8), direct)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            stream(-1, 0, "x")
