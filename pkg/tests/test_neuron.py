"""Neuron and column behavior, checked against a brute-force simulator."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tnnsim.encode import INF, SpikeVolley
from tnnsim.neuron import (
    Column,
    ColumnStateError,
    RnlNeuron,
    column_reset,
    column_wta,
    earliest_winner,
    layer_spike_times,
    neuron_spike_time,
    rnl_response,
    weight_cap,
)


def brute_force_spike_time(weights_hu, times, period, threshold):
    """Reference simulator: tabulate the potential at every step.

    Independent of the library's ramp algebra: it literally walks each
    step and adds one unit per active, unsaturated synapse ramp.
    """
    for t in range(period):
        potential = 0
        for w, s in zip(weights_hu, times):
            if s == INF or t < s:
                continue
            height = t - int(s) + 1
            cap = w // 2
            potential += min(height, cap)
        if potential >= threshold:
            return t
    return INF


def volley(times):
    """Wrap an even-length line list as a volley."""
    return SpikeVolley(times=tuple(times), pixel_count=len(times) // 2)


def library_spike_time(weights, times, period, threshold):
    """Evaluate via the library, padding odd line counts with a dead line.

    A zero-weight silent line contributes nothing, so the padding cannot
    change the spike time; it only satisfies the volley's pos/neg layout.
    """
    weights = list(weights)
    times = list(times)
    if len(times) % 2:
        weights.append(0)
        times.append(INF)
    n = RnlNeuron(weights=weights, threshold=threshold)
    return neuron_spike_time(n, volley(times), period)


class TestRnlResponse:
    def test_unit_ramp_saturates_at_weight(self):
        # weight value 3 (6 half-units), arrival at step 0
        assert [rnl_response(6, 0, t) for t in range(5)] == [1, 2, 3, 3, 3]

    def test_no_spike_no_response(self):
        assert all(rnl_response(6, INF, t) == 0 for t in range(16))

    def test_zero_weight_no_response(self):
        assert all(rnl_response(0, 0, t) == 0 for t in range(16))

    def test_before_arrival_no_response(self):
        assert rnl_response(6, 5, 4) == 0
        assert rnl_response(6, 5, 5) == 1

    def test_half_unit_rounds_down(self):
        # 5 half-units is weight 2.5; the ramp tops out at 2.
        assert [rnl_response(5, 0, t) for t in range(4)] == [1, 2, 2, 2]
        assert weight_cap(1) == 0
        assert weight_cap(14) == 7

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            rnl_response(-1, 0, 0)


class TestNeuronSpikeTime:
    def test_time_zero_spike_with_low_threshold(self):
        assert library_spike_time([2] * 700, [0] * 700, 16, 400) == 0

    def test_saturated_inputs_cross_high_threshold_at_five(self):
        # 700 saturated lines at time 0: potential 700 * min(t+1, 7)
        # first reaches 4000 at t = 5.
        assert library_spike_time([14] * 700, [0] * 700, 16, 4000) == 5

    def test_unreachable_threshold_never_spikes(self):
        assert library_spike_time([2] * 4, [0] * 4, 16, 1000) == INF

    def test_length_mismatch_rejected(self):
        n = RnlNeuron(weights=[2] * 4, threshold=1)
        with pytest.raises(ValueError):
            neuron_spike_time(n, volley([0] * 6), 16)

    @settings(max_examples=200)
    @given(
        st.lists(st.integers(0, 14), min_size=2, max_size=8),
        st.data(),
        st.integers(1, 40),
    )
    def test_matches_brute_force(self, weights, data, threshold):
        times = data.draw(
            st.lists(
                st.one_of(st.integers(0, 15), st.just(INF)),
                min_size=len(weights),
                max_size=len(weights),
            )
        )
        got = library_spike_time(weights, times, 16, threshold)
        want = brute_force_spike_time(weights, times, 16, threshold)
        assert got == want

    @given(
        st.lists(st.integers(0, 14), min_size=2, max_size=6),
        st.integers(0, 5),
        st.integers(1, 30),
    )
    def test_raising_one_weight_never_delays(self, weights, idx, threshold):
        idx = idx % len(weights)
        times = [0] * len(weights)
        bumped = list(weights)
        bumped[idx] = min(14, bumped[idx] + 2)
        t1 = library_spike_time(weights, times, 16, threshold)
        t2 = library_spike_time(bumped, times, 16, threshold)
        assert t2 <= t1


class TestOracleEquivalenceAtScale:
    def test_ten_thousand_random_instances(self):
        rng = np.random.default_rng(42)
        mismatches = 0
        for _ in range(10000):
            lines = int(rng.integers(1, 9))
            weights = rng.integers(0, 15, size=lines).tolist()
            times = [
                INF if rng.random() < 0.3 else int(rng.integers(0, 16))
                for _ in range(lines)
            ]
            threshold = int(rng.integers(1, 60))
            got = library_spike_time(weights, times, 16, threshold)
            want = brute_force_spike_time(weights, times, 16, threshold)
            if got != want:
                mismatches += 1
        assert mismatches == 0


class TestLayerSpikeTimes:
    def test_matches_scalar_path(self):
        rng = np.random.default_rng(7)
        lines, neurons = 12, 20
        weights = rng.integers(0, 15, size=(neurons, lines)).astype(np.int16)
        times = [
            INF if rng.random() < 0.25 else int(rng.integers(0, 16))
            for _ in range(lines)
        ]
        vec = layer_spike_times(weights, times, 16, 25)
        for i in range(neurons):
            want = library_spike_time(weights[i].tolist(), times, 16, 25)
            got = INF if np.isinf(vec[i]) else int(vec[i])
            assert got == want

    def test_matches_brute_force_random(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            lines = int(rng.integers(1, 10))
            neurons = int(rng.integers(1, 6))
            period = int(rng.integers(2, 20))
            weights = rng.integers(0, 15, size=(neurons, lines)).astype(np.int16)
            times = [
                INF if rng.random() < 0.3 else int(rng.integers(0, period))
                for _ in range(lines)
            ]
            thresholds = rng.integers(1, 40, size=neurons)
            vec = layer_spike_times(weights, times, period, thresholds)
            for i in range(neurons):
                want = brute_force_spike_time(
                    weights[i].tolist(), times, period, int(thresholds[i])
                )
                got = INF if np.isinf(vec[i]) else int(vec[i])
                assert got == want

    def test_all_silent_input(self):
        weights = np.full((3, 4), 14, dtype=np.int16)
        out = layer_spike_times(weights, [INF] * 4, 16, 1)
        assert np.all(np.isinf(out))

    def test_per_neuron_thresholds(self):
        weights = np.full((2, 700), 14, dtype=np.int16)
        out = layer_spike_times(weights, [0] * 700, 16, np.array([400, 4000]))
        assert out.tolist() == [0, 5]

    def test_line_count_mismatch(self):
        with pytest.raises(ValueError):
            layer_spike_times(np.zeros((2, 3), dtype=np.int16), [0, 1], 16, 1)


class TestColumnWta:
    def test_earliest_neuron_wins(self):
        # Rig spike times via thresholds over a shared time-0 volley:
        # potential is min(t+1, 7) * lines, so threshold picks the time.
        n_fast = RnlNeuron(weights=[14] * 4, threshold=4 * 4)  # fires t=3
        n_slow = RnlNeuron(weights=[14] * 4, threshold=6 * 4)  # fires t=5
        n_dead = RnlNeuron(weights=[14] * 4, threshold=1000)
        col = Column(neurons=[n_slow, n_fast, n_dead])
        idx, t = column_wta(col, volley([0] * 4), 16)
        assert (idx, t) == (1, 3)
        assert col.inhibited
        assert col.last_winner == 1

    def test_tie_breaks_to_lowest_index(self):
        n_a = RnlNeuron(weights=[14] * 4, threshold=4 * 4)
        n_b = RnlNeuron(weights=[14] * 4, threshold=4 * 4)
        col = Column(neurons=[n_a, n_b])
        idx, t = column_wta(col, volley([0] * 4), 16)
        assert (idx, t) == (0, 3)

    def test_silent_column_returns_none(self):
        col = Column(neurons=[RnlNeuron(weights=[0] * 4, threshold=5)])
        idx, t = column_wta(col, volley([0] * 4), 16)
        assert idx is None
        assert t == INF
        assert not col.inhibited

    def test_inhibited_column_rejects_second_call(self):
        col = Column(neurons=[RnlNeuron(weights=[14] * 4, threshold=1)])
        column_wta(col, volley([0] * 4), 16)
        with pytest.raises(ColumnStateError):
            column_wta(col, volley([0] * 4), 16)

    def test_reset_rearms_column(self):
        col = Column(neurons=[RnlNeuron(weights=[14] * 4, threshold=1)])
        column_wta(col, volley([0] * 4), 16)
        column_reset(col)
        assert not col.inhibited
        assert col.last_winner is None
        idx, _ = column_wta(col, volley([0] * 4), 16)
        assert idx == 0

    def test_mismatched_neuron_lines_rejected(self):
        with pytest.raises(ValueError):
            Column(
                neurons=[
                    RnlNeuron(weights=[2] * 4, threshold=1),
                    RnlNeuron(weights=[2] * 5, threshold=1),
                ]
            )


class TestEarliestWinner:
    def test_picks_minimum(self):
        idx, t = earliest_winner(np.array([7.0, 3.0, np.inf]))
        assert (idx, t) == (1, 3)

    def test_tie_lowest_index(self):
        idx, t = earliest_winner(np.array([4.0, 4.0]))
        assert (idx, t) == (0, 4)

    def test_all_silent(self):
        idx, t = earliest_winner(np.array([np.inf, np.inf]))
        assert idx is None
        assert t == INF
