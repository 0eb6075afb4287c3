"""spikeworks: a spiking-network robot-control toolbox.

Izhikevich network simulation (:mod:`spikeworks.neurons`), sensor/motor rate
coding (:mod:`spikeworks.codec`), a named-port pub/sub bus with TCP transport
(:mod:`spikeworks.bus`, :mod:`spikeworks.bus_tcp`), a 2-D E-Puck digital twin
(:mod:`spikeworks.epuck`), the wired obstacle-avoidance controller network
(:mod:`spikeworks.brain`), and a deterministic session runtime with CLI and
HTTP/WebSocket control (:mod:`spikeworks.session`, :mod:`spikeworks.cli`,
:mod:`spikeworks.server`).
"""

from .brain import build_epuck_network, side_of
from .bus import Port, PortMessage, Registry, frame_message, unframe_message
from .codec import (EncoderConfig, RateWindow, TofEncoderConfig, WheelCommand,
                    decode_wheel, encode_proximity, encode_tof, poisson_injector)
from .config import SessionConfig, default_config, load_config
from .epuck import (DifferentialDriveRobot, Pose, RobotGeometry, SensorFrame,
                    WheelOdometry, World, check_collision, load_world,
                    read_sensors, reconstruct_trajectory)
from .neurons import (IzhikevichParams, Network, NeuronGroup, NeuronState,
                      SpikeEvent, Synapse, step_neuron)
from .session import Session, SessionRunner, SpikeMonitor, export_monitor

__version__ = "0.1.0"

__all__ = [
    "build_epuck_network", "side_of",
    "Port", "PortMessage", "Registry", "frame_message", "unframe_message",
    "EncoderConfig", "RateWindow", "TofEncoderConfig", "WheelCommand",
    "decode_wheel", "encode_proximity", "encode_tof", "poisson_injector",
    "SessionConfig", "default_config", "load_config",
    "DifferentialDriveRobot", "Pose", "RobotGeometry", "SensorFrame",
    "WheelOdometry", "World", "check_collision", "load_world",
    "read_sensors", "reconstruct_trajectory",
    "IzhikevichParams", "Network", "NeuronGroup", "NeuronState",
    "SpikeEvent", "Synapse", "step_neuron",
    "Session", "SessionRunner", "SpikeMonitor", "export_monitor",
    "__version__",
]
