"""Builder for the minimal sensory-motor obstacle-avoidance network.

Four groups: 8 proximity neurons (ctx.ps), a two-neuron ranger group
(ctx.tof: clear, obstacle), and two antagonist motor pairs (ctx.vel_left,
ctx.vel_right: forward, backward).  Every proximity neuron excites the
forward motor neuron of its own side and the backward motor neuron of the
opposite side, so stimulation on one side speeds the near wheel and drags
the far one back, turning the robot away.  The ranger's clear neuron drives
both forward motors; its obstacle neuron drives both backward motors.

All synapses are excitatory; slowing down in front of obstacles emerges from
the decoder's forward-minus-backward antagonism, not from inhibition.
"""

from __future__ import annotations

from .epuck import DEFAULT_SENSOR_ANGLES_DEG
from .neurons import IzhikevichParams, Network

PS_GROUP = "ctx.ps"
TOF_GROUP = "ctx.tof"
VEL_LEFT_GROUP = "ctx.vel_left"
VEL_RIGHT_GROUP = "ctx.vel_right"

# neuron roles within their groups
FORWARD = 0
BACKWARD = 1
TOF_CLEAR = 0
TOF_OBSTACLE = 1

DEFAULT_WEIGHT = 25.0


def side_of(sensor_index: int, sensor_angles_deg=DEFAULT_SENSOR_ANGLES_DEG) -> str:
    """'left' or 'right' for a proximity sensor, from its bearing sign."""
    angle = sensor_angles_deg[sensor_index]
    return "right" if angle < 0 else "left"


def build_epuck_network(params: IzhikevichParams | None = None,
                        weight: float = DEFAULT_WEIGHT,
                        delay: int = 1,
                        sensor_angles_deg=DEFAULT_SENSOR_ANGLES_DEG,
                        motor_params: IzhikevichParams | None = None) -> Network:
    """Wire the 14-neuron controller network; returns a ready Network.

    `params` applies to the sensory groups, `motor_params` (default: same) to
    the motor groups.  All 20 synapses share `weight` and `delay`.
    """
    net = Network()
    net.add_group(PS_GROUP, len(sensor_angles_deg), params, kind="sensory")
    net.add_group(TOF_GROUP, 2, params, kind="sensory")
    mp = motor_params if motor_params is not None else params
    net.add_group(VEL_LEFT_GROUP, 2, mp, kind="motor")
    net.add_group(VEL_RIGHT_GROUP, 2, mp, kind="motor")

    for i in range(len(sensor_angles_deg)):
        if side_of(i, sensor_angles_deg) == "right":
            near, far = VEL_RIGHT_GROUP, VEL_LEFT_GROUP
        else:
            near, far = VEL_LEFT_GROUP, VEL_RIGHT_GROUP
        net.connect((PS_GROUP, i), (near, FORWARD), weight, delay)
        net.connect((PS_GROUP, i), (far, BACKWARD), weight, delay)

    for motor in (VEL_LEFT_GROUP, VEL_RIGHT_GROUP):
        net.connect((TOF_GROUP, TOF_CLEAR), (motor, FORWARD), weight, delay)
        net.connect((TOF_GROUP, TOF_OBSTACLE), (motor, BACKWARD), weight, delay)
    return net
