"""Session orchestration: the 1 ms loop coupling robot, codec, network, and bus.

Each tick: (1) on sensor-period boundaries the simulated robot publishes a
sensor frame and an odometry event; (2) sensor ports are polled and encoded
into held input currents, plus per-neuron seeded noise; (3) the network
advances one tick, feeding monitors and the decoder windows; (4) the wheel
command is decoded and published; (5) the robot consumes the freshest command
and steps its kinematics; (6) collisions are checked and channels logged.

Execution control (start / pause / step / continue / stop / speed) only
gates whether ticks happen and how they are paced against the wall clock; it
never changes what a tick computes, so a run is a pure function of (config,
seed, duration).
"""

from __future__ import annotations

import math
import os
import random
import threading
import time
from dataclasses import dataclass

from . import brain
from .bus import Registry
from .codec import RateWindow, decode_wheel, encode_proximity, encode_tof
from .config import SessionConfig
from .epuck import (DEFAULT_START, DifferentialDriveRobot, Pose, check_collision,
                    load_world, read_sensors, reconstruct_trajectory)
from .neurons import IzhikevichParams, Network, SpikeEvent

IDLE, RUNNING, PAUSED = "idle", "running", "paused"

LOG_DIR_ENV = "SPIKEWORKS_LOG_DIR"


class CommandError(RuntimeError):
    """Illegal execution-control transition; session state is unchanged."""


class SpikeMonitor:
    """Non-intrusive recorder of spike events for a set of groups.

    Attaching or detaching a monitor never alters network dynamics; it only
    observes the event stream.
    """

    def __init__(self, groups=None, active: bool = True):
        self.groups = set(groups) if groups is not None else None
        self.active = active
        self.events: list[SpikeEvent] = []

    def record(self, events, network: Network):
        if not self.active or not events:
            return
        if self.groups is None:
            self.events.extend(events)
        else:
            names = self.groups
            self.events.extend(e for e in events
                               if network.group_name(e.group) in names)

    def clear(self):
        self.events.clear()


class ChannelLog:
    """Line-oriented log for one sensor/actuator channel, one file per session."""

    def __init__(self, name: str, directory: str):
        self.name = name
        self.path = os.path.join(directory, f"{name}.log")
        self._fh = None
        self._lines: list[str] = []

    def write(self, t_ms: int, text: str):
        self._lines.append(f"{t_ms} {text}\n")

    def flush(self):
        if not self._lines:
            return
        if self._fh is None:
            os.makedirs(os.path.dirname(self.path), exist_ok=True)
            self._fh = open(self.path, "w", encoding="utf-8")
        self._fh.write("".join(self._lines))
        self._fh.flush()
        self._lines.clear()

    def close(self):
        self.flush()
        if self._fh is not None:
            self._fh.close()
            self._fh = None


class EventLog:
    """Thread-safe ring of UI event frames with monotonically growing sequence."""

    def __init__(self, capacity: int = 8192):
        self._frames: list = []
        self._base = 0
        self._capacity = capacity
        self._lock = threading.Lock()

    def append(self, frame: dict):
        with self._lock:
            self._frames.append(frame)
            if len(self._frames) > self._capacity:
                drop = len(self._frames) - self._capacity
                del self._frames[:drop]
                self._base += drop

    def since(self, seq: int):
        """(next_seq, frames newer than seq)."""
        with self._lock:
            start = max(seq - self._base, 0)
            return self._base + len(self._frames), self._frames[start:]


def resolve_log_dir(explicit: str | None) -> str | None:
    """The channel-log directory: environment override wins over the argument."""
    return os.environ.get(LOG_DIR_ENV) or explicit


class Session:
    """One simulation run: owns every piece of mutable state.

    All stepping happens on the caller's thread; a concurrent API server must
    talk to the session through a mailbox (see :class:`SessionRunner`).
    """

    def __init__(self, config: SessionConfig, log_dir: str | None = None):
        self.config = config
        self.rng = random.Random(config.seed)
        self.mode = IDLE
        self.sim_time = 0
        self.rt_factor = config.rt_factor
        self.collision_count = 0
        self.path_length = 0.0
        self.event_sink: EventLog | None = None

        self.network = self._build_network(config)
        self.registry = Registry()
        ports = config.ports
        self._ps_out = self.registry.register(ports["ps_out"], "out")
        self._tof_out = self.registry.register(ports["tof_out"], "out")
        self._vel_out = self.registry.register(ports["vel_out"], "out")
        self._ps_in = self.registry.register(ports["ps_in"], "in")
        self._tof_in = self.registry.register(ports["tof_in"], "in")
        self._motor_in = self.registry.register(ports["motor_in"], "in")
        self.registry.connect(ports["ps_out"], ports["ps_in"])
        self.registry.connect(ports["tof_out"], ports["tof_in"])
        self.registry.connect(ports["vel_out"], ports["motor_in"])

        self.world = load_world(config.world)
        start = Pose(*config.start) if config.start is not None else \
            (self.world.start or DEFAULT_START)
        self.start_pose = start
        self.robot = DifferentialDriveRobot(config.geometry, start)
        self._in_collision = check_collision(self.world, start, config.geometry)

        self.monitors: list[SpikeMonitor] = [
            SpikeMonitor(m.get("groups") or None) for m in config.monitors]
        self._recorder = SpikeMonitor()    # built-in full recorder for exports
        self.trajectory: list[tuple] = [(0, start.x, start.y, start.theta)]
        self.step_events: list[tuple] = []
        self._cmd = (0.0, 0.0)
        self._logs: dict[str, ChannelLog] = {}
        log_dir = resolve_log_dir(log_dir)
        if log_dir:
            for channel in ("vel_cmd", "ps_raw", "tof_raw"):
                self._logs[channel] = ChannelLog(channel, log_dir)

        self._bind_network()

    # -- construction ---------------------------------------------------------

    @staticmethod
    def _build_network(config: SessionConfig) -> Network:
        spec = config.network
        if spec.builder == "epuck":
            return brain.build_epuck_network(
                params=spec.params, weight=spec.weight, delay=spec.delay,
                sensor_angles_deg=config.geometry.sensor_angles_deg,
                motor_params=spec.motor_params)
        net = Network()
        if spec.builder == "custom":
            for g in spec.groups:
                params = g.get("params")
                net.add_group(g["name"], int(g["size"]),
                              IzhikevichParams(**params) if params else None,
                              g.get("kind", "inter"))
            for s in spec.synapses:
                net.connect(tuple(s["pre"]), tuple(s["post"]),
                            float(s["weight"]), int(s.get("delay", 1)))
        return net

    def _bind_network(self):
        """Cache flat indices of the standard sensory/motor groups, if present."""
        net = self.network
        names = {g.name for g in net.groups}
        self._n_neurons = net.neuron_count
        self._ext = [0.0] * self._n_neurons
        self._ps_base = net.flat_index(brain.PS_GROUP, 0) \
            if brain.PS_GROUP in names else None
        self._ps_size = net.groups[net.group_id(brain.PS_GROUP)].size \
            if self._ps_base is not None else 0
        self._tof_base = net.flat_index(brain.TOF_GROUP, 0) \
            if brain.TOF_GROUP in names else None
        if brain.VEL_LEFT_GROUP in names and brain.VEL_RIGHT_GROUP in names:
            self._gid_left = net.group_id(brain.VEL_LEFT_GROUP)
            self._gid_right = net.group_id(brain.VEL_RIGHT_GROUP)
            w = self.config.codec.window_ms
            t0 = self.sim_time
            self._win_lf = RateWindow(1, w, t0)
            self._win_lb = RateWindow(1, w, t0)
            self._win_rf = RateWindow(1, w, t0)
            self._win_rb = RateWindow(1, w, t0)
        else:
            self._gid_left = self._gid_right = None

    # -- network building (idle mode, used by the control API) -----------------

    def add_group(self, name: str, size: int, params=None, kind: str = "inter") -> int:
        if self.mode != IDLE:
            raise CommandError("network can only be edited while idle")
        gid = self.network.add_group(name, size, params, kind)
        self._bind_network()
        return gid

    def add_connection(self, pre, post, weight: float, delay: int = 1) -> int:
        if self.mode != IDLE:
            raise CommandError("network can only be edited while idle")
        return self.network.connect(pre, post, weight, delay)

    # -- monitors ---------------------------------------------------------------

    def attach_monitor(self, groups=None) -> SpikeMonitor:
        monitor = SpikeMonitor(groups)
        self.monitors.append(monitor)
        return monitor

    def detach_monitor(self, monitor: SpikeMonitor):
        self.monitors.remove(monitor)

    @property
    def recorded_spikes(self) -> list[SpikeEvent]:
        return self._recorder.events

    # -- execution control --------------------------------------------------------

    def handle_command(self, cmd: str, n_ms: int | None = None,
                       factor: float | None = None) -> dict:
        """Apply one control command; raises CommandError on illegal transitions."""
        if cmd == "start":
            if self.mode != IDLE:
                raise CommandError(f"cannot start from {self.mode}")
            self.mode = RUNNING
        elif cmd == "pause":
            if self.mode != RUNNING:
                raise CommandError(f"cannot pause from {self.mode}")
            self.mode = PAUSED
        elif cmd == "continue":
            if self.mode != PAUSED:
                raise CommandError(f"cannot continue from {self.mode}")
            self.mode = RUNNING
        elif cmd == "stop":
            if self.mode == IDLE:
                raise CommandError("cannot stop from idle")
            self.mode = IDLE
        elif cmd == "step":
            if self.mode == RUNNING:
                raise CommandError("cannot single-step while running")
            n = 1 if n_ms is None else n_ms
            if not isinstance(n, int) or n < 1:
                raise CommandError(f"step needs a positive integer ms count, got {n_ms}")
            self.mode = PAUSED
            self.advance_ms(n)
        elif cmd == "speed":
            if factor is None or not math.isfinite(factor) or factor < 0:
                raise CommandError(f"speed needs a finite factor >= 0, got {factor}")
            self.rt_factor = float(factor)
        else:
            raise CommandError(f"unknown command {cmd!r}")
        state = self.state()
        if self.event_sink is not None:
            self.event_sink.append({"type": "state", **state})
        return state

    def state(self) -> dict:
        pose = self.robot.pose
        return {
            "mode": self.mode,
            "sim_time_ms": self.sim_time,
            "rt_factor": self.rt_factor,
            "pose": {"x": pose.x, "y": pose.y, "theta": pose.theta},
            "collision_count": self.collision_count,
            "seed": self.config.seed,
        }

    # -- the 1 ms cycle ---------------------------------------------------------

    def tick(self):
        """Advance simulated time by exactly one millisecond."""
        t = self.sim_time
        cfg = self.config
        sink = self.event_sink

        # (1) sensor event
        if t % cfg.sensor_period_ms == 0:
            frame = read_sensors(self.world, self.robot.pose, cfg.geometry, t)
            self._ps_out.send(t, frame.ps)
            self._tof_out.send(t, (frame.tof,))
            event = self.robot.odometry_event(t)
            if t > 0:
                self.step_events.append(event)
            logs = self._logs
            if logs:
                ps_text = " ".join(f"ps{i}={v!r}" for i, v in enumerate(frame.ps))
                logs["ps_raw"].write(t, ps_text)
                logs["tof_raw"].write(t, f"tof={frame.tof!r}")
                logs["vel_cmd"].write(
                    t, f"left={self._cmd[0]!r} right={self._cmd[1]!r}")
                for log in logs.values():
                    log.flush()
            if sink is not None:
                sink.append({"type": "sensors", "t": t,
                             "ps": list(frame.ps), "tof": frame.tof})

        # (2) encode polled sensor data into held currents
        ext = self._ext
        msgs = self._ps_in.poll()
        if msgs and self._ps_base is not None:
            payload = msgs[-1].payload
            pcfg = cfg.codec.proximity
            base = self._ps_base
            for i in range(min(self._ps_size, len(payload))):
                ext[base + i] = encode_proximity(payload[i], pcfg)
        msgs = self._tof_in.poll()
        if msgs and self._tof_base is not None:
            clear, obstacle = encode_tof(msgs[-1].payload[0], cfg.codec.tof)
            self._ext[self._tof_base] = clear
            self._ext[self._tof_base + 1] = obstacle

        amp = cfg.noise_amplitude
        if amp:
            rand = self.rng.random
            currents = [ext[i] + (rand() * 2.0 - 1.0) * amp
                        for i in range(self._n_neurons)]
        else:
            currents = ext

        # (3) advance the network
        events = self.network.advance(currents)
        self._recorder.record(events, self.network)
        for monitor in self.monitors:
            monitor.record(events, self.network)
        if sink is not None and events:
            net = self.network
            sink.append({"type": "spikes", "t": t,
                         "events": [[net.group_name(e.group), e.index]
                                    for e in events]})

        # (4) decode the wheel command
        if self._gid_left is not None:
            lf = lb = rf = rb = 0
            for e in events:
                if e.group == self._gid_left:
                    if e.index == brain.FORWARD:
                        lf = 1
                    else:
                        lb = 1
                elif e.group == self._gid_right:
                    if e.index == brain.FORWARD:
                        rf = 1
                    else:
                        rb = 1
            self._win_lf.push((lf,))
            self._win_lb.push((lb,))
            self._win_rf.push((rf,))
            self._win_rb.push((rb,))
            codec = cfg.codec
            v_l = decode_wheel(self._win_lf, self._win_lb, codec.k, codec.v_max)
            v_r = decode_wheel(self._win_rf, self._win_rb, codec.k, codec.v_max)
            self._vel_out.send(t, (v_l, v_r))

        # (5) drive the robot with the freshest command
        cmds = self._motor_in.poll()
        if cmds:
            self._cmd = cmds[-1].payload
        v_l, v_r = self._cmd
        pose = self.robot.step(v_l, v_r, 0.001)
        self.path_length += abs(0.5 * (v_l + v_r)) * 0.001

        # (6) collision check and bookkeeping
        hit = check_collision(self.world, pose, cfg.geometry)
        if hit and not self._in_collision:
            self.collision_count += 1
        self._in_collision = hit
        self.sim_time = t + 1
        self.trajectory.append((t + 1, pose.x, pose.y, pose.theta))
        if sink is not None and (t + 1) % 20 == 0:
            sink.append({"type": "pose", "t": t + 1, "x": pose.x, "y": pose.y,
                         "theta": pose.theta, "collisions": self.collision_count})

    def advance_ms(self, n: int):
        tick = self.tick
        for _ in range(n):
            tick()

    def run(self, duration_ms: int, rt_factor: float | None = None):
        """Drive a full start..stop run of `duration_ms` simulated milliseconds.

        Pacing: with rt_factor > 0 the loop sleeps so that simulated time
        advances at that multiple of wall time (best effort); 0 runs unpaced.
        """
        if rt_factor is not None:
            self.rt_factor = rt_factor
        self.handle_command("start")
        end = self.sim_time + duration_ms
        if self.rt_factor > 0:
            wall0 = time.monotonic()
            sim0 = self.sim_time
            while self.sim_time < end:
                self.tick()
                target = wall0 + (self.sim_time - sim0) / (1000.0 * self.rt_factor)
                delay = target - time.monotonic()
                if delay > 0.0005:
                    time.sleep(delay)
        else:
            self.advance_ms(end - self.sim_time)
        self.finalize_run()
        self.handle_command("stop")

    def finalize_run(self):
        """Record the trailing partial odometry interval and flush logs."""
        if self.sim_time % self.config.sensor_period_ms != 0 or not self.step_events:
            last = self.robot.odometry.last_event_ms
            if self.sim_time > last:
                self.step_events.append(self.robot.odometry_event(self.sim_time))
        for log in self._logs.values():
            log.close()

    # -- derived results ----------------------------------------------------------

    def reconstructed_trajectory(self) -> list[Pose]:
        """Dead-reckoned poses from this run's own odometry event log."""
        return reconstruct_trajectory(self.step_events, self.start_pose,
                                      self.config.geometry)

    def spike_counts(self) -> dict[str, int]:
        counts = {g.name: 0 for g in self.network.groups}
        for e in self._recorder.events:
            counts[self.network.group_name(e.group)] += 1
        return counts

    def heading_reversals(self, threshold: float = 0.02) -> int:
        return count_heading_reversals(self.trajectory,
                                       self.config.sensor_period_ms, threshold)

    def summary(self) -> dict:
        pose = self.robot.pose
        return {
            "duration_ms": self.sim_time,
            "collisions": self.collision_count,
            "path_length_m": self.path_length,
            "heading_reversals": self.heading_reversals(),
            "spike_counts": self.spike_counts(),
            "final_pose": {"x": pose.x, "y": pose.y, "theta": pose.theta},
            "seed": self.config.seed,
            "world": self.world.name,
        }


def count_heading_reversals(trajectory, period_ms: int, threshold: float = 0.02) -> int:
    """Sign alternations of the per-period heading change exceeding `threshold`."""
    reversals = 0
    last_sign = 0
    for i in range(period_ms, len(trajectory), period_ms):
        d = trajectory[i][3] - trajectory[i - period_ms][3]
        d = math.remainder(d, 2.0 * math.pi)
        if abs(d) < threshold:
            continue
        sign = 1 if d > 0 else -1
        if last_sign and sign != last_sign:
            reversals += 1
        last_sign = sign
    return reversals


# -- exports -------------------------------------------------------------------

def export_monitor(monitor: SpikeMonitor, network: Network, directory: str,
                   basename: str = "spikes", bin_ms: int = 1000) -> tuple[str, str]:
    """Write a monitor's buffer as CSV plus a per-group firing-rate summary.

    Returns (spike_csv_path, rate_csv_path).  Spikes are sorted by time then
    group name; rates are spikes per neuron per second within each bin.
    """
    os.makedirs(directory, exist_ok=True)
    events = sorted(monitor.events,
                    key=lambda e: (e.time, network.group_name(e.group), e.index))
    spike_path = os.path.join(directory, f"{basename}.csv")
    with open(spike_path, "w", encoding="utf-8") as fh:
        fh.write("t_ms,group,neuron\n")
        fh.writelines(f"{e.time},{network.group_name(e.group)},{e.index}\n"
                      for e in events)

    rate_path = os.path.join(directory, f"{basename}_rates.csv")
    sizes = {g.name: g.size for g in network.groups}
    names = sorted({network.group_name(e.group) for e in events})
    end = max((e.time for e in events), default=0)
    with open(rate_path, "w", encoding="utf-8") as fh:
        fh.write("bin_start_ms,group,rate_hz\n")
        for start in range(0, end + 1, bin_ms):
            in_bin = [e for e in events if start <= e.time < start + bin_ms]
            for name in names:
                n = sum(1 for e in in_bin if network.group_name(e.group) == name)
                rate = n * 1000.0 / (bin_ms * sizes[name])
                fh.write(f"{start},{name},{rate!r}\n")
    return spike_path, rate_path


def export_trajectory(trajectory, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t_ms,x,y,theta\n")
        fh.writelines(f"{t},{x!r},{y!r},{theta!r}\n" for t, x, y, theta in trajectory)


# -- threaded runner for the control API ----------------------------------------

@dataclass
class _Request:
    cmd: str
    n_ms: int | None
    factor: float | None
    done: threading.Event
    result: dict | None = None
    error: str | None = None


class SessionRunner:
    """Owns the simulation thread; the API talks to it through a mailbox.

    Commands are applied between ticks, never mid-tick.  Event frames for the
    UI are published through the session's :class:`EventLog`.
    """

    def __init__(self, session: Session):
        self.session = session
        self.events = EventLog()
        session.event_sink = self.events
        self._mailbox: list[_Request] = []
        self._mailbox_lock = threading.Lock()
        self._wake = threading.Event()
        self._stopping = False
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._pace_wall = None
        self._pace_sim = None

    def start(self):
        self._thread.start()

    def shutdown(self):
        self._stopping = True
        self._wake.set()
        self._thread.join(timeout=5)

    def submit(self, cmd: str, n_ms=None, factor=None, timeout: float = 10.0) -> dict:
        """Apply a control command on the simulation thread and wait for it."""
        req = _Request(cmd, n_ms, factor, threading.Event())
        with self._mailbox_lock:
            self._mailbox.append(req)
        self._wake.set()
        if not req.done.wait(timeout):
            raise CommandError(f"command {cmd!r} timed out")
        if req.error is not None:
            raise CommandError(req.error)
        return req.result

    def call(self, fn, timeout: float = 10.0):
        """Run an arbitrary callable against the session on the sim thread."""
        box = {}
        done = threading.Event()

        def wrapper():
            try:
                box["result"] = fn(self.session)
            except Exception as exc:   # surfaced to the caller
                box["error"] = exc
            done.set()

        with self._mailbox_lock:
            self._mailbox.append(wrapper)
        self._wake.set()
        if not done.wait(timeout):
            raise CommandError("session call timed out")
        if "error" in box:
            raise box["error"]
        return box["result"]

    def _drain_mailbox(self):
        with self._mailbox_lock:
            requests, self._mailbox = self._mailbox, []
        for req in requests:
            if callable(req):
                req()
                continue
            try:
                req.result = self.session.handle_command(req.cmd, req.n_ms, req.factor)
            except CommandError as exc:
                req.error = str(exc)
            req.done.set()
            self._pace_wall = None   # re-anchor pacing after any command

    def _loop(self):
        session = self.session
        while not self._stopping:
            self._drain_mailbox()
            if session.mode != RUNNING:
                self._pace_wall = None
                self._wake.wait(timeout=0.05)
                self._wake.clear()
                continue
            rt = session.rt_factor
            if rt > 0:
                if self._pace_wall is None:
                    self._pace_wall = time.monotonic()
                    self._pace_sim = session.sim_time
                session.tick()
                target = self._pace_wall + \
                    (session.sim_time - self._pace_sim) / (1000.0 * rt)
                delay = target - time.monotonic()
                if delay > 0.0005:
                    time.sleep(min(delay, 0.05))
            else:
                for _ in range(8):
                    session.tick()
