"""Unit tests for the Izhikevich network core."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikeworks.neurons import (RS, IzhikevichParams, Network, NeuronState,
                                SimulationError, initial_state, step_neuron)


class TestStepNeuron:
    def test_rest_state_is_exact_fixed_point(self):
        state = NeuronState(-70.0, -14.0)
        for _ in range(1000):
            state, fired = step_neuron(state, RS, 0.0)
            assert not fired
            assert state.v == -70.0 and state.u == -14.0

    def test_reset_applies_when_already_past_threshold(self):
        state, fired = step_neuron(NeuronState(35.0, -10.0), RS, 123.0)
        assert fired
        assert state.v == -65.0
        assert state.u == -2.0

    def test_two_half_steps_then_recovery_update(self):
        # oracle: manual rollout of the scheme from v=-65, u=-13, I=10:
        #   v1 = -65 + 0.5*f(-65) = -61.5
        #   v2 = v1 + 0.5*f(v1)   = -58.105000000000004
        #   u' = u + a*(b*v2 - u) = -12.97242
        state, fired = step_neuron(NeuronState(-65.0, -13.0), RS, 10.0)
        assert not fired
        assert state.v == pytest.approx(-58.105000000000004, abs=1e-12)
        assert state.u == pytest.approx(-12.97242, abs=1e-12)

    def test_strong_drive_fires_and_resets_below_threshold(self):
        state = NeuronState(-60.0, -14.0)
        fired_any = False
        for _ in range(200):
            state, fired = step_neuron(state, RS, 30.0)
            fired_any = fired_any or fired
            assert state.v <= 30.0
        assert fired_any

    def test_non_finite_inputs_are_hard_errors(self):
        with pytest.raises(SimulationError):
            step_neuron(NeuronState(math.nan, 0.0), RS, 0.0)
        with pytest.raises(SimulationError):
            step_neuron(NeuronState(-70.0, -14.0), RS, math.inf)

    def test_fixed_dt_only(self):
        with pytest.raises(ValueError):
            step_neuron(NeuronState(-70.0, -14.0), RS, 0.0, dt=0.5)

    @given(v=st.floats(-80.0, 29.0), u=st.floats(-20.0, 20.0),
           current=st.floats(-50.0, 200.0))
    @settings(max_examples=200, deadline=None)
    def test_reset_bound_always_holds(self, v, u, current):
        state, _ = step_neuron(NeuronState(v, u), RS, current)
        assert state.v <= 30.0


class TestParams:
    def test_invariants(self):
        with pytest.raises(ValueError):
            IzhikevichParams(a=0.0)
        with pytest.raises(ValueError):
            IzhikevichParams(a=-0.1)
        with pytest.raises(ValueError):
            IzhikevichParams(c=30.0)

    def test_initial_state_silences_network(self):
        state = initial_state(RS)
        assert (state.v, state.u) == (-70.0, -14.0)


class TestNetworkConstruction:
    def test_add_group_initializes_rest_states(self):
        net = Network()
        gid = net.add_group("ctx.ps", 8, kind="sensory")
        assert net.neuron_count == 8
        for i in range(8):
            state = net.get_state(gid, i)
            assert (state.v, state.u) == (-70.0, -14.0)

    def test_duplicate_name_rejected(self):
        net = Network()
        net.add_group("ctx.ps", 8)
        with pytest.raises(ValueError, match="duplicate"):
            net.add_group("ctx.ps", 4)

    def test_zero_size_rejected(self):
        net = Network()
        with pytest.raises(ValueError, match="size"):
            net.add_group("empty", 0)

    def test_connect_validates_endpoints_and_delay(self):
        net = Network()
        net.add_group("a", 2)
        net.add_group("b", 3)
        sid = net.connect(("a", 1), ("b", 0), 25.0, delay=1)
        assert net.synapses[sid].weight == 25.0
        with pytest.raises(ValueError, match="delay"):
            net.connect(("a", 0), ("b", 0), 25.0, delay=0)
        with pytest.raises(IndexError):
            net.connect(("a", 0), ("b", 3), 25.0)   # index == group size
        with pytest.raises(KeyError):
            net.connect(("missing", 0), ("b", 0), 25.0)


def force_spike(net, group, index):
    """Drive one neuron over threshold with a large current for one tick."""
    return net.advance({(group, index): 400.0})


class TestAdvance:
    def test_empty_network_yields_no_spikes(self):
        net = Network()
        assert net.advance() == []

    def test_fixed_point_network_stays_silent(self):
        net = Network()
        net.add_group("quiet", 3)
        for _ in range(500):
            assert net.advance() == []
        state = net.get_state("quiet", 0)
        assert (state.v, state.u) == (-70.0, -14.0)

    def test_unknown_current_key_rejected_before_stepping(self):
        net = Network()
        net.add_group("a", 1)
        before = net.get_state("a", 0)
        with pytest.raises(KeyError):
            net.advance({("nope", 0): 5.0})
        with pytest.raises(IndexError):
            net.advance({("a", 1): 5.0})
        after = net.get_state("a", 0)
        assert (before.v, before.u) == (after.v, after.u)
        assert net.time == 0

    def test_delayed_weight_arrives_exactly_once(self):
        net = Network()
        net.add_group("a", 1)
        net.add_group("b", 1)
        net.connect(("a", 0), ("b", 0), 30.0, delay=1)
        events = force_spike(net, "a", 0)
        assert [(e.group, e.index) for e in events] == [(0, 0)]
        t_spike = events[0].time
        net.advance()
        # b's synaptic input at t_spike + 1 included the weight
        assert net.last_synaptic[net.flat_index("b", 0)] == 30.0
        net.advance()
        assert net.last_synaptic[net.flat_index("b", 0)] == 0.0
        assert net.time == t_spike + 3

    @pytest.mark.parametrize("delay", [1, 2, 5])
    def test_causality_spike_influences_at_exactly_t_plus_delay(self, delay):
        net = Network()
        net.add_group("a", 1)
        net.add_group("b", 1)
        net.connect(("a", 0), ("b", 0), 17.5, delay=delay)
        force_spike(net, "a", 0)
        b = net.flat_index("b", 0)
        arrivals = []
        for step in range(1, delay + 3):
            net.advance()
            if net.last_synaptic[b] != 0.0:
                arrivals.append(step)
        assert arrivals == [delay]

    def test_accumulation_is_linear_in_weights(self):
        def run(scale):
            net = Network()
            net.add_group("a", 2)
            net.add_group("b", 1)
            net.connect(("a", 0), ("b", 0), 10.0 * scale, delay=1)
            net.connect(("a", 1), ("b", 0), 5.0 * scale, delay=1)
            net.advance({("a", 0): 400.0, ("a", 1): 400.0})
            net.advance()
            return net.last_synaptic[net.flat_index("b", 0)]

        assert run(2.0) == 2.0 * run(1.0)

    def test_fan_in_sums_currents(self):
        net = Network()
        net.add_group("a", 3)
        net.add_group("b", 1)
        for i in range(3):
            net.connect(("a", i), ("b", 0), 7.0, delay=1)
        net.advance({("a", i): 400.0 for i in range(3)})
        net.advance()
        assert net.last_synaptic[net.flat_index("b", 0)] == 21.0

    def test_spike_streams_are_deterministic(self):
        def run():
            net = Network()
            net.add_group("x", 4)
            net.add_group("y", 2)
            for i in range(4):
                net.connect(("x", i), ("y", i % 2), 20.0, delay=1 + i % 3)
            stream = []
            for t in range(300):
                currents = {("x", i): 6.0 + (i * t) % 7 for i in range(4)}
                stream.extend((e.time, e.group, e.index)
                              for e in net.advance(currents))
            return stream

        assert run() == run()

    def test_monitor_trace_caps_spike_value(self):
        net = Network()
        net.add_group("a", 1)
        events = force_spike(net, "a", 0)
        assert len(events) == 1
        assert net.last_v[0] == 30.0

    def test_advance_matches_step_neuron(self):
        # the vectorized path and the scalar path implement the same map
        net = Network()
        net.add_group("a", 1)
        state = NeuronState(-70.0, -14.0)
        for t in range(400):
            current = 12.0 if t % 3 else 2.5
            events = net.advance([current])
            state, fired = step_neuron(state, RS, current)
            assert bool(events) == fired
            got = net.get_state("a", 0)
            assert got.v == state.v and got.u == state.u

    def test_grow_wheel_preserves_pending_deliveries(self):
        net = Network()
        net.add_group("a", 1)
        net.add_group("b", 1)
        net.connect(("a", 0), ("b", 0), 12.0, delay=2)
        force_spike(net, "a", 0)
        # adding a longer-delay synapse mid-run must not lose the pending pulse
        net.connect(("a", 0), ("b", 0), 1.0, delay=7)
        net.advance()
        net.advance()
        assert net.last_synaptic[net.flat_index("b", 0)] == 12.0
