"""Unit tests for the obstacle-avoidance network builder and its wiring rule."""

import pytest

from spikeworks import brain
from spikeworks.brain import (BACKWARD, FORWARD, PS_GROUP, TOF_CLEAR, TOF_GROUP,
                              TOF_OBSTACLE, VEL_LEFT_GROUP, VEL_RIGHT_GROUP,
                              build_epuck_network, side_of)
from spikeworks.codec import RateWindow, decode_wheel


def synapse_set(net):
    """Synapses as ((pre_group, pre_idx), (post_group, post_idx)) name tuples."""
    out = set()
    for s in net.synapses:
        out.add(((net.group_name(s.pre[0]), s.pre[1]),
                 (net.group_name(s.post[0]), s.post[1])))
    return out


class TestTopology:
    def test_group_and_synapse_counts(self):
        net = build_epuck_network()
        assert [g.name for g in net.groups] == [PS_GROUP, TOF_GROUP,
                                                VEL_LEFT_GROUP, VEL_RIGHT_GROUP]
        assert net.neuron_count == 14
        assert len(net.synapses) == 20    # 8 proximity * 2 + 2 ranger * 2

    def test_front_right_sensor_targets(self):
        targets = {post for pre, post in synapse_set(build_epuck_network())
                   if pre == (PS_GROUP, 1)}
        assert targets == {(VEL_RIGHT_GROUP, FORWARD), (VEL_LEFT_GROUP, BACKWARD)}

    def test_left_mirror_sensor_targets(self):
        targets = {post for pre, post in synapse_set(build_epuck_network())
                   if pre == (PS_GROUP, 5)}
        assert targets == {(VEL_LEFT_GROUP, FORWARD), (VEL_RIGHT_GROUP, BACKWARD)}

    def test_ranger_wiring(self):
        synapses = synapse_set(build_epuck_network())
        assert ((TOF_GROUP, TOF_CLEAR), (VEL_LEFT_GROUP, FORWARD)) in synapses
        assert ((TOF_GROUP, TOF_CLEAR), (VEL_RIGHT_GROUP, FORWARD)) in synapses
        assert ((TOF_GROUP, TOF_OBSTACLE), (VEL_LEFT_GROUP, BACKWARD)) in synapses
        assert ((TOF_GROUP, TOF_OBSTACLE), (VEL_RIGHT_GROUP, BACKWARD)) in synapses

    def test_every_proximity_neuron_has_two_excitatory_targets(self):
        net = build_epuck_network()
        synapses = synapse_set(net)
        for i in range(8):
            targets = {post for pre, post in synapses if pre == (PS_GROUP, i)}
            assert len(targets) == 2
            sides = {g for g, _ in targets}
            assert sides == {VEL_LEFT_GROUP, VEL_RIGHT_GROUP}
        assert all(s.weight > 0 for s in net.synapses)
        assert all(s.delay == 1 for s in net.synapses)

    def test_mirror_symmetry(self):
        # reflecting sensor indices i <-> 7-i maps the synapse set onto itself
        # with the wheels swapped
        synapses = synapse_set(build_epuck_network())
        swap = {VEL_LEFT_GROUP: VEL_RIGHT_GROUP, VEL_RIGHT_GROUP: VEL_LEFT_GROUP}
        mirrored = set()
        for (pre_g, pre_i), (post_g, post_i) in synapses:
            if pre_g == PS_GROUP:
                mirrored.add(((pre_g, 7 - pre_i), (swap[post_g], post_i)))
            else:
                mirrored.add(((pre_g, pre_i), (swap[post_g], post_i)))
        assert mirrored == synapses

    def test_configurable_weight(self):
        net = build_epuck_network(weight=12.5)
        assert {s.weight for s in net.synapses} == {12.5}


class TestSideOf:
    @pytest.mark.parametrize("index,side", [
        (0, "right"), (1, "right"), (2, "right"), (3, "right"),
        (4, "left"), (5, "left"), (6, "left"), (7, "left"),
    ])
    def test_default_angle_table(self, index, side):
        assert side_of(index) == side


class TestBehavior:
    def test_right_side_stimulation_turns_left_within_500ms(self):
        net = build_epuck_network()
        win = {key: RateWindow(1, 100) for key in ("lf", "lb", "rf", "rb")}
        gid_l = net.group_id(VEL_LEFT_GROUP)
        gid_r = net.group_id(VEL_RIGHT_GROUP)
        currents = {(PS_GROUP, 1): 15.0, (PS_GROUP, 2): 15.0}
        satisfied_at = None
        for t in range(500):
            events = net.advance(currents)
            ticks = {"lf": 0, "lb": 0, "rf": 0, "rb": 0}
            for e in events:
                if e.group == gid_l:
                    ticks["lf" if e.index == FORWARD else "lb"] = 1
                elif e.group == gid_r:
                    ticks["rf" if e.index == FORWARD else "rb"] = 1
            for key, w in win.items():
                w.push((ticks[key],))
            v_l = decode_wheel(win["lf"], win["lb"])
            v_r = decode_wheel(win["rf"], win["rb"])
            if v_r > v_l and satisfied_at is None:
                satisfied_at = t
        assert satisfied_at is not None and satisfied_at < 500
        # and it stays that way by the end of the window
        assert v_r > v_l
