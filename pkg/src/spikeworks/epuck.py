"""2-D differential-drive E-Puck simulation.

Ground-truth kinematics under the no-slip unicycle model, ray-cast infrared
and time-of-flight sensing against a walled world, wheel-step counters, and
dead-reckoning trajectory reconstruction from step logs.

Conventions: x, y in meters, theta in radians, counterclockwise positive,
zero along +x, normalized to (-pi, pi].  With theta counterclockwise the
angular rate is (v_r - v_l) / axle_length, so a faster right wheel turns the
robot left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TAU = 2.0 * math.pi

#: IR sensor bearings relative to the heading, ps0..ps7.
#: Negative bearings point to the robot's right side; ps1 is the front-right
#: sensor, ps5 its left mirror.
DEFAULT_SENSOR_ANGLES_DEG = (-15.0, -45.0, -90.0, -150.0, 150.0, 90.0, 45.0, 15.0)


def normalize_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.remainder(theta, TAU)
    if a <= -math.pi:
        a += TAU
    return a


@dataclass(frozen=True)
class RobotGeometry:
    wheel_radius: float = 0.0215       # m
    axle_length: float = 0.055         # m
    steps_per_rev: int = 1000
    body_radius: float = 0.037         # m
    ir_range: float = 0.06             # m, linear falloff to zero at this distance
    tof_range: float = 2.0             # m, ranger saturation
    sensor_angles_deg: tuple = DEFAULT_SENSOR_ANGLES_DEG

    def __post_init__(self):
        for name in ("wheel_radius", "axle_length", "steps_per_rev", "body_radius",
                     "ir_range", "tof_range"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def wheel_circumference(self) -> float:
        return TAU * self.wheel_radius

    @property
    def sensor_angles(self) -> list[float]:
        return [math.radians(a) for a in self.sensor_angles_deg]


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass
class WheelOdometry:
    """Cumulative integer wheel-step counts plus the last event time."""

    steps_left: int = 0
    steps_right: int = 0
    last_event_ms: int = 0


@dataclass(frozen=True)
class SensorFrame:
    ps: tuple            # 8 normalized proximity values in [0, 1]
    tof: float           # m, saturates at the ranger range
    timestamp: int       # ms


class World:
    """Immutable set of wall segments; shareable read-only once built."""

    def __init__(self, name: str, walls, start: Pose | None = None):
        self.name = name
        self.start = start
        self.walls = []
        for seg in walls:
            (x1, y1), (x2, y2) = (seg[0], seg[1]), (seg[2], seg[3])
            if not all(math.isfinite(v) for v in (x1, y1, x2, y2)):
                raise ValueError(f"non-finite wall segment {seg}")
            if x1 == x2 and y1 == y2:
                raise ValueError(f"degenerate wall segment {seg}")
            self.walls.append((x1, y1, x2, y2))
        # precomputed (ax, ay, dx, dy, squared length) per segment
        self._segs = [(x1, y1, x2 - x1, y2 - y1, (x2 - x1) ** 2 + (y2 - y1) ** 2)
                      for x1, y1, x2, y2 in self.walls]

    def distance_to_walls(self, x: float, y: float) -> float:
        """Distance from a point to the nearest wall segment."""
        best = math.inf
        for ax, ay, dx, dy, len2 in self._segs:
            t = ((x - ax) * dx + (y - ay) * dy) / len2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            ex = x - (ax + t * dx)
            ey = y - (ay + t * dy)
            d2 = ex * ex + ey * ey
            if d2 < best:
                best = d2
        return math.sqrt(best)

    def cast_ray(self, ox: float, oy: float, dx: float, dy: float) -> float:
        """Distance along the ray (ox,oy) + t*(dx,dy) to the first wall, or inf."""
        best = math.inf
        for ax, ay, sx, sy, _ in self._segs:
            denom = dx * sy - dy * sx
            if denom == 0.0:
                continue
            qx = ax - ox
            qy = ay - oy
            t = (qx * sy - qy * sx) / denom
            if t <= 0.0 or t >= best:
                continue
            s = (qx * dy - qy * dx) / denom
            if 0.0 <= s <= 1.0:
                best = t
        return best


# -- kinematics --------------------------------------------------------------

def advance_pose(pose: Pose, v_l: float, v_r: float, dt: float,
                 axle_length: float) -> Pose:
    """One explicit-Euler step of the no-slip unicycle model."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not all(math.isfinite(v) for v in (v_l, v_r, dt)):
        raise ValueError("non-finite kinematic inputs")
    v = 0.5 * (v_l + v_r)
    w = (v_r - v_l) / axle_length
    theta = pose.theta
    return Pose(pose.x + v * math.cos(theta) * dt,
                pose.y + v * math.sin(theta) * dt,
                theta + w * dt)


class DifferentialDriveRobot:
    """Pose plus exact wheel-arc accumulators and derived step counters.

    Step counts are the cumulative wheel arc rounded to the encoder
    resolution, so each count stays within half a step of the true arc no
    matter how small the integration step is.
    """

    def __init__(self, geometry: RobotGeometry, pose: Pose):
        self.geometry = geometry
        self.pose = pose
        self.arc_left = 0.0
        self.arc_right = 0.0
        self.odometry = WheelOdometry()
        self._ev_left = 0
        self._ev_right = 0

    def _count(self, arc: float) -> int:
        g = self.geometry
        return round(arc / g.wheel_circumference * g.steps_per_rev)

    def step(self, v_l: float, v_r: float, dt: float) -> Pose:
        """Advance the pose by dt seconds at the given wheel speeds."""
        self.pose = advance_pose(self.pose, v_l, v_r, dt, self.geometry.axle_length)
        self.arc_left += v_l * dt
        self.arc_right += v_r * dt
        self.odometry.steps_left = self._count(self.arc_left)
        self.odometry.steps_right = self._count(self.arc_right)
        return self.pose

    def odometry_event(self, now_ms: int) -> tuple[int, int, float]:
        """(delta_steps_left, delta_steps_right, dt_s) since the previous event."""
        odo = self.odometry
        d_l = odo.steps_left - self._ev_left
        d_r = odo.steps_right - self._ev_right
        dt_s = (now_ms - odo.last_event_ms) / 1000.0
        self._ev_left = odo.steps_left
        self._ev_right = odo.steps_right
        odo.last_event_ms = now_ms
        return d_l, d_r, dt_s


DEFAULT_START = Pose(0.16, 0.16, math.pi / 4)


def reconstruct_trajectory(step_events, start: Pose,
                           geometry: RobotGeometry | None = None) -> list[Pose]:
    """Dead-reckon a pose sequence from (delta_steps_l, delta_steps_r, dt_s) events.

    Wheel velocities are recovered from the step deltas at the encoder
    resolution and accumulated with the same Euler scheme the simulator uses.
    Returns one pose per event, starting after the first.
    """
    g = geometry if geometry is not None else RobotGeometry()
    arc_per_step = g.wheel_circumference / g.steps_per_rev
    pose = start
    out = []
    for d_l, d_r, dt_s in step_events:
        if dt_s <= 0:
            raise ValueError(f"event dt must be positive, got {dt_s}")
        v_l = d_l * arc_per_step / dt_s
        v_r = d_r * arc_per_step / dt_s
        pose = advance_pose(pose, v_l, v_r, dt_s, g.axle_length)
        out.append(pose)
    return out


# -- sensing -----------------------------------------------------------------

def read_sensors(world: World, pose: Pose, geometry: RobotGeometry,
                 timestamp_ms: int = 0) -> SensorFrame:
    """Ray-cast the 8 IR sensors and the forward ranger from the body surface."""
    x, y, theta = pose.x, pose.y, pose.theta
    r = geometry.body_radius
    ir_range = geometry.ir_range
    ps = []
    for alpha in geometry.sensor_angles:
        phi = theta + alpha
        dx = math.cos(phi)
        dy = math.sin(phi)
        d = world.cast_ray(x + r * dx, y + r * dy, dx, dy)
        ps.append(min(max(1.0 - d / ir_range, 0.0), 1.0))
    dx = math.cos(theta)
    dy = math.sin(theta)
    tof = min(world.cast_ray(x + r * dx, y + r * dy, dx, dy), geometry.tof_range)
    return SensorFrame(tuple(ps), tof, timestamp_ms)


def check_collision(world: World, pose: Pose, geometry: RobotGeometry) -> bool:
    """True iff the body disc strictly overlaps any wall."""
    return world.distance_to_walls(pose.x, pose.y) < geometry.body_radius


# -- worlds ------------------------------------------------------------------

def _polygon_walls(points) -> list[tuple]:
    return [(*points[i], *points[(i + 1) % len(points)]) for i in range(len(points))]


def _box_world() -> World:
    s = 0.8
    return World("box", _polygon_walls([(0, 0), (s, 0), (s, s), (0, s)]),
                 start=DEFAULT_START)


def _tmaze_world() -> World:
    # 0.3 m wide stem joining a 0.8 m x 0.3 m top bar
    pts = [(0.25, 0.0), (0.55, 0.0), (0.55, 0.5), (0.8, 0.5),
           (0.8, 0.8), (0.0, 0.8), (0.0, 0.5), (0.25, 0.5)]
    return World("tmaze", _polygon_walls(pts), start=Pose(0.40, 0.16, math.pi / 2))


PRESETS = {"box": _box_world, "tmaze": _tmaze_world}


def load_world(descriptor) -> World:
    """Build a world from a preset name or a descriptor mapping.

    Mappings accept {"preset": name} or {"name": ..., "walls": [[x1,y1,x2,y2],
    ...], "start": [x, y, theta]}.
    """
    if isinstance(descriptor, str):
        try:
            return PRESETS[descriptor]()
        except KeyError:
            raise ValueError(f"unknown world preset {descriptor!r}; "
                             f"have {sorted(PRESETS)}") from None
    if isinstance(descriptor, dict):
        if "preset" in descriptor:
            return load_world(descriptor["preset"])
        walls = descriptor.get("walls")
        if not walls:
            raise ValueError("world descriptor needs a 'preset' or a 'walls' list")
        start = descriptor.get("start")
        pose = Pose(*start) if start is not None else None
        return World(descriptor.get("name", "custom"), walls, start=pose)
    raise TypeError(f"cannot build a world from {type(descriptor).__name__}")
