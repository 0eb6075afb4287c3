"""Unit tests for sensor encoders and the rate decoder."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikeworks.codec import (EncoderConfig, RateWindow, TofEncoderConfig,
                              decode_wheel, encode_proximity, encode_tof,
                              poisson_injector)
from spikeworks.neurons import Network


def window_with(counts_per_neuron, length_ms=100, start_ms=0):
    """A window whose trailing span contains the given per-neuron spike counts."""
    w = RateWindow(len(counts_per_neuron), length_ms, start_ms)
    remaining = list(counts_per_neuron)
    for _ in range(length_ms):
        w.push([1 if remaining[i] > 0 else 0 for i in range(len(remaining))])
        remaining = [max(0, c - 1) for c in remaining]
    return w


class TestProximityEncoder:
    def test_zero_input_zero_bias_is_silent(self):
        assert encode_proximity(0.0, EncoderConfig(gain=15.0, bias=0.0)) == 0.0

    def test_full_input_reaches_gain(self):
        assert encode_proximity(1.0, EncoderConfig(gain=15.0, bias=0.0,
                                                   saturation=30.0)) == 15.0

    def test_half_input_is_linear(self):
        assert encode_proximity(0.5, EncoderConfig(gain=15.0, bias=0.0)) == 7.5

    def test_saturation_caps_output(self):
        cfg = EncoderConfig(gain=50.0, bias=0.0, saturation=20.0)
        assert encode_proximity(1.0, cfg) == 20.0

    def test_inputs_clamped(self):
        cfg = EncoderConfig(gain=15.0)
        assert encode_proximity(-3.0, cfg) == encode_proximity(0.0, cfg)
        assert encode_proximity(7.0, cfg) == encode_proximity(1.0, cfg)

    def test_full_drive_causes_tonic_firing(self):
        # oracle: a regular-spiking neuron at I = 15 fires within any 100 ms
        net = Network()
        net.add_group("s", 1, kind="sensory")
        current = encode_proximity(1.0, EncoderConfig(gain=15.0, bias=0.0))
        spikes = sum(len(net.advance([current])) for _ in range(100))
        assert spikes >= 1

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    @settings(max_examples=100, deadline=None)
    def test_monotone_non_decreasing(self, x1, x2):
        cfg = EncoderConfig(gain=15.0, bias=1.0, saturation=12.0)
        lo, hi = sorted((x1, x2))
        assert encode_proximity(lo, cfg) <= encode_proximity(hi, cfg)

    def test_config_invariants(self):
        with pytest.raises(ValueError):
            EncoderConfig(gain=-1.0)
        with pytest.raises(ValueError):
            EncoderConfig(bias=5.0, saturation=4.0)


class TestTofEncoder:
    CFG = TofEncoderConfig(gain_clear=30.0, gain_obstacle=30.0,
                           d_stop=0.10, d_safe=0.50)

    def test_clear_beyond_safe_distance(self):
        for d in (0.5, 1.0, 2.0):
            assert encode_tof(d, self.CFG) == (30.0, 0.0)

    def test_contact_is_max_obstacle_signal(self):
        assert encode_tof(0.0, self.CFG) == (0.0, 30.0)

    def test_obstacle_channel_zero_at_stop_distance(self):
        clear, obstacle = encode_tof(0.10, self.CFG)
        assert obstacle == 0.0
        assert clear == pytest.approx(30.0 * 0.10 / 0.50)

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            encode_tof(-0.01, self.CFG)

    @given(st.floats(0.0, 2.0), st.floats(0.0, 2.0))
    @settings(max_examples=100, deadline=None)
    def test_channel_monotonicity(self, d1, d2):
        lo, hi = sorted((d1, d2))
        clear_lo, obs_lo = encode_tof(lo, self.CFG)
        clear_hi, obs_hi = encode_tof(hi, self.CFG)
        assert clear_lo <= clear_hi
        assert obs_lo >= obs_hi

    def test_config_invariants(self):
        with pytest.raises(ValueError):
            TofEncoderConfig(d_stop=0.5, d_safe=0.1)
        with pytest.raises(ValueError):
            TofEncoderConfig(gain_clear=-1.0)


class TestRateWindow:
    def test_rates_bounded_by_tick_resolution(self):
        w = window_with([100], length_ms=100)
        assert w.rates() == [1000.0]
        assert w.population_rate() == 1000.0

    def test_sliding_forgets_old_spikes(self):
        w = RateWindow(1, length_ms=10)
        w.push((1,))
        for _ in range(10):
            w.push((0,))
        assert w.counts == [0]

    def test_push_validates(self):
        w = RateWindow(2, length_ms=10)
        with pytest.raises(ValueError):
            w.push((1,))
        with pytest.raises(ValueError):
            w.push((1, 2))


class TestDecoder:
    def test_silence_decodes_to_zero(self):
        fwd = window_with([0])
        bwd = window_with([0])
        assert decode_wheel(fwd, bwd, k=0.0012) == 0.0

    def test_rate_difference_scales_by_gain(self):
        fwd = window_with([8])    # 8 spikes / 100 ms = 80 Hz
        bwd = window_with([2])    # 20 Hz
        assert decode_wheel(fwd, bwd, k=0.0012) == pytest.approx(0.072)

    def test_balanced_rates_cancel(self):
        fwd = window_with([5])
        bwd = window_with([5])
        assert decode_wheel(fwd, bwd, k=0.0012) == 0.0

    def test_swap_negates_exactly(self):
        fwd = window_with([7])
        bwd = window_with([3])
        assert decode_wheel(fwd, bwd, k=0.0012) == -decode_wheel(bwd, fwd, k=0.0012)

    def test_command_respects_speed_limit(self):
        fwd = window_with([100])
        bwd = window_with([0])
        assert decode_wheel(fwd, bwd, k=0.01, v_max=0.12) == 0.12
        assert decode_wheel(bwd, fwd, k=0.01, v_max=0.12) == -0.12

    def test_mismatched_spans_rejected(self):
        with pytest.raises(ValueError):
            decode_wheel(window_with([1], length_ms=100),
                         window_with([1], length_ms=50))
        with pytest.raises(ValueError):
            decode_wheel(window_with([1], start_ms=0),
                         window_with([1], start_ms=5))

    @given(st.integers(0, 99), st.integers(0, 100))
    @settings(max_examples=60, deadline=None)
    def test_extra_forward_spike_never_decreases_command(self, n_fwd, n_bwd):
        bwd = window_with([n_bwd])
        before = decode_wheel(window_with([n_fwd]), bwd, k=0.0012, v_max=math.inf)
        after = decode_wheel(window_with([n_fwd + 1]), bwd, k=0.0012, v_max=math.inf)
        assert after >= before

    @given(st.integers(0, 100), st.integers(0, 100))
    @settings(max_examples=60, deadline=None)
    def test_clamp_holds_for_arbitrary_inputs(self, n_fwd, n_bwd):
        v = decode_wheel(window_with([n_fwd]), window_with([n_bwd]),
                         k=0.05, v_max=0.12)
        assert -0.12 <= v <= 0.12


class TestPoissonInjector:
    def test_zero_rate_is_empty(self):
        assert poisson_injector(0.0, 1000, random.Random(1)) == []

    def test_max_rate_spikes_every_tick(self):
        train = poisson_injector(1000.0, 50, random.Random(1))
        assert train == list(range(50))

    def test_count_follows_binomial_statistics(self):
        # frozen: seed 7 produces 983 spikes; 1000 +- 100 covers ~3.3 sigma
        train = poisson_injector(100.0, 10_000, random.Random(7))
        assert len(train) == 983
        assert 900 <= len(train) <= 1100

    def test_deterministic_per_seed(self):
        a = poisson_injector(250.0, 2000, random.Random(42))
        b = poisson_injector(250.0, 2000, random.Random(42))
        assert a == b

    def test_rate_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            poisson_injector(-1.0, 100, random.Random(1))
        with pytest.raises(ValueError):
            poisson_injector(1001.0, 100, random.Random(1))
