"""Session configuration: one versioned JSON document for everything.

A single file describes the network (or the builder that makes it), codec
parameters, robot geometry, world, port names, noise, and monitors.  Every
section is optional and falls back to the defaults below; the top-level
integer ``version`` field is required in files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .codec import DEFAULT_RATE_GAIN, EncoderConfig, TofEncoderConfig
from .epuck import DEFAULT_SENSOR_ANGLES_DEG, RobotGeometry
from .neurons import IzhikevichParams

CONFIG_VERSION = 1

DEFAULT_PORTS = {
    "ps_out": "/epuck/sensors/ps",
    "tof_out": "/epuck/sensors/tof",
    "vel_out": "/snn/vel",
    "ps_in": "/snn/in/ps",
    "tof_in": "/snn/in/tof",
    "motor_in": "/epuck/motors",
}

_TOP_LEVEL_KEYS = {"version", "seed", "network", "codec", "robot", "world",
                   "start", "noise", "session", "ports", "monitors"}


class ConfigError(ValueError):
    """Malformed or inconsistent session configuration."""


@dataclass
class NetworkSpec:
    builder: str = "epuck"              # "epuck" | "custom" | "empty"
    weight: float = 25.0
    delay: int = 1
    params: IzhikevichParams = field(default_factory=IzhikevichParams)
    motor_params: IzhikevichParams | None = None
    groups: list = field(default_factory=list)     # for builder == "custom"
    synapses: list = field(default_factory=list)


@dataclass
class CodecSpec:
    proximity: EncoderConfig = field(default_factory=EncoderConfig)
    tof: TofEncoderConfig = field(default_factory=TofEncoderConfig)
    k: float = DEFAULT_RATE_GAIN        # m/s per Hz of decoded rate difference
    v_max: float = 0.12
    window_ms: int = 100


@dataclass
class SessionConfig:
    version: int = CONFIG_VERSION
    seed: int = 1
    network: NetworkSpec = field(default_factory=NetworkSpec)
    codec: CodecSpec = field(default_factory=CodecSpec)
    geometry: RobotGeometry = field(default_factory=RobotGeometry)
    world: Any = "box"
    start: tuple | None = None          # (x, y, theta) override
    noise_amplitude: float = 2.0
    sensor_period_ms: int = 128
    rt_factor: float = 0.0              # 0 = unpaced (as fast as possible)
    ports: dict = field(default_factory=lambda: dict(DEFAULT_PORTS))
    monitors: list = field(default_factory=list)   # [{"groups": [...]}]


def default_config(**overrides) -> SessionConfig:
    cfg = SessionConfig()
    for key, value in overrides.items():
        if not hasattr(cfg, key):
            raise ConfigError(f"unknown config field {key!r}")
        setattr(cfg, key, value)
    return cfg


def _expect(obj, types, where):
    if not isinstance(obj, types):
        names = types.__name__ if isinstance(types, type) else \
            "/".join(t.__name__ for t in types)
        raise ConfigError(f"{where}: expected {names}, got {type(obj).__name__}")
    return obj


def _params_from(d: dict, where: str) -> IzhikevichParams:
    _expect(d, dict, where)
    extra = set(d) - {"a", "b", "c", "d"}
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
    base = IzhikevichParams()
    try:
        return IzhikevichParams(a=d.get("a", base.a), b=d.get("b", base.b),
                                c=d.get("c", base.c), d=d.get("d", base.d))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _network_from(d: dict) -> NetworkSpec:
    _expect(d, dict, "network")
    extra = set(d) - {"builder", "weight", "delay", "params", "motor_params",
                      "groups", "synapses"}
    if extra:
        raise ConfigError(f"network: unknown keys {sorted(extra)}")
    spec = NetworkSpec()
    spec.builder = _expect(d.get("builder", spec.builder), str, "network.builder")
    if spec.builder not in ("epuck", "custom", "empty"):
        raise ConfigError(f"network.builder must be epuck|custom|empty, "
                          f"got {spec.builder!r}")
    spec.weight = float(d.get("weight", spec.weight))
    spec.delay = int(d.get("delay", spec.delay))
    if "params" in d:
        spec.params = _params_from(d["params"], "network.params")
    if d.get("motor_params") is not None:
        spec.motor_params = _params_from(d["motor_params"], "network.motor_params")
    spec.groups = _expect(d.get("groups", []), list, "network.groups")
    spec.synapses = _expect(d.get("synapses", []), list, "network.synapses")
    return spec


def _codec_from(d: dict) -> CodecSpec:
    _expect(d, dict, "codec")
    extra = set(d) - {"proximity", "tof", "decoder"}
    if extra:
        raise ConfigError(f"codec: unknown keys {sorted(extra)}")
    spec = CodecSpec()
    try:
        if "proximity" in d:
            p = _expect(d["proximity"], dict, "codec.proximity")
            spec.proximity = EncoderConfig(
                gain=float(p.get("gain", spec.proximity.gain)),
                bias=float(p.get("bias", spec.proximity.bias)),
                saturation=float(p.get("saturation", spec.proximity.saturation)))
        if "tof" in d:
            p = _expect(d["tof"], dict, "codec.tof")
            spec.tof = TofEncoderConfig(
                gain_clear=float(p.get("gain_clear", spec.tof.gain_clear)),
                gain_obstacle=float(p.get("gain_obstacle", spec.tof.gain_obstacle)),
                d_stop=float(p.get("d_stop", spec.tof.d_stop)),
                d_safe=float(p.get("d_safe", spec.tof.d_safe)))
    except ValueError as exc:
        raise ConfigError(f"codec: {exc}") from None
    if "decoder" in d:
        p = _expect(d["decoder"], dict, "codec.decoder")
        spec.k = float(p.get("k", spec.k))
        spec.v_max = float(p.get("v_max", spec.v_max))
        spec.window_ms = int(p.get("window_ms", spec.window_ms))
        if spec.window_ms < 1:
            raise ConfigError("codec.decoder.window_ms must be >= 1")
    return spec


def _geometry_from(d: dict) -> RobotGeometry:
    _expect(d, dict, "robot")
    base = RobotGeometry()
    known = {"wheel_radius", "axle_length", "steps_per_rev", "body_radius",
             "ir_range", "tof_range", "sensor_angles_deg"}
    extra = set(d) - known
    if extra:
        raise ConfigError(f"robot: unknown keys {sorted(extra)}")
    try:
        return RobotGeometry(
            wheel_radius=float(d.get("wheel_radius", base.wheel_radius)),
            axle_length=float(d.get("axle_length", base.axle_length)),
            steps_per_rev=int(d.get("steps_per_rev", base.steps_per_rev)),
            body_radius=float(d.get("body_radius", base.body_radius)),
            ir_range=float(d.get("ir_range", base.ir_range)),
            tof_range=float(d.get("tof_range", base.tof_range)),
            sensor_angles_deg=tuple(d.get("sensor_angles_deg",
                                          DEFAULT_SENSOR_ANGLES_DEG)))
    except ValueError as exc:
        raise ConfigError(f"robot: {exc}") from None


def config_from_dict(d: dict, require_version: bool = True) -> SessionConfig:
    _expect(d, dict, "config")
    extra = set(d) - _TOP_LEVEL_KEYS
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    if require_version:
        version = d.get("version")
        if not isinstance(version, int):
            raise ConfigError("config requires an integer 'version' field")
        if version != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {version}; "
                              f"this build reads version {CONFIG_VERSION}")
    cfg = SessionConfig()
    cfg.version = d.get("version", CONFIG_VERSION)
    cfg.seed = int(d.get("seed", cfg.seed))
    if "network" in d:
        cfg.network = _network_from(d["network"])
    if "codec" in d:
        cfg.codec = _codec_from(d["codec"])
    if "robot" in d:
        cfg.geometry = _geometry_from(d["robot"])
    if "world" in d:
        cfg.world = d["world"]
    if d.get("start") is not None:
        start = _expect(d["start"], list, "start")
        if len(start) != 3:
            raise ConfigError("start must be [x, y, theta]")
        cfg.start = tuple(float(v) for v in start)
    if "noise" in d:
        noise = _expect(d["noise"], dict, "noise")
        extra = set(noise) - {"amplitude"}
        if extra:
            raise ConfigError(f"noise: unknown keys {sorted(extra)}")
        cfg.noise_amplitude = float(noise.get("amplitude", cfg.noise_amplitude))
        if cfg.noise_amplitude < 0:
            raise ConfigError("noise.amplitude must be >= 0")
    if "session" in d:
        sess = _expect(d["session"], dict, "session")
        extra = set(sess) - {"sensor_period_ms", "rt_factor"}
        if extra:
            raise ConfigError(f"session: unknown keys {sorted(extra)}")
        cfg.sensor_period_ms = int(sess.get("sensor_period_ms", cfg.sensor_period_ms))
        if cfg.sensor_period_ms < 1:
            raise ConfigError("session.sensor_period_ms must be >= 1")
        cfg.rt_factor = float(sess.get("rt_factor", cfg.rt_factor))
        if cfg.rt_factor < 0:
            raise ConfigError("session.rt_factor must be >= 0")
    if "ports" in d:
        ports = _expect(d["ports"], dict, "ports")
        extra = set(ports) - set(DEFAULT_PORTS)
        if extra:
            raise ConfigError(f"ports: unknown keys {sorted(extra)}")
        cfg.ports.update({k: _expect(v, str, f"ports.{k}") for k, v in ports.items()})
    if "monitors" in d:
        monitors = _expect(d["monitors"], list, "monitors")
        for i, m in enumerate(monitors):
            _expect(m, dict, f"monitors[{i}]")
            _expect(m.get("groups", []), list, f"monitors[{i}].groups")
        cfg.monitors = monitors
    return cfg


def load_config(path) -> SessionConfig:
    """Read and validate a session config file (JSON with a version field)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return config_from_dict(raw)
