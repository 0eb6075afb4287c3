"""Fixed-timestep simulator for networks of Izhikevich neurons.

The membrane model is the dimensionless 4-parameter one:

    v' = 0.04*v^2 + 5*v + 140 - u + I
    u' = a*(b*v - u)
    if v > 30:  v <- c, u <- u + d

integrated with explicit Euler at a 1 ms tick, the voltage in two 0.5 ms
half-steps and the recovery variable once per tick.  Synapses deliver a
signed current pulse `weight` exactly `delay` ticks after a presynaptic
spike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

SPIKE_THRESHOLD = 30.0
DT_MS = 1.0


class SimulationError(RuntimeError):
    """Raised when simulation integrity is violated (non-finite state/input)."""


@dataclass(frozen=True)
class IzhikevichParams:
    """The (a, b, c, d) parameter quadruple of one neuron group."""

    a: float = 0.02
    b: float = 0.2
    c: float = -65.0
    d: float = 8.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.a, self.b, self.c, self.d)):
            raise ValueError("parameters must be finite")
        if self.a <= 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if self.c >= SPIKE_THRESHOLD:
            raise ValueError(f"reset value c must lie below {SPIKE_THRESHOLD}, got {self.c}")


#: Regular-spiking cortical defaults; every group uses these unless overridden.
RS = IzhikevichParams(a=0.02, b=0.2, c=-65.0, d=8.0)


@dataclass
class NeuronState:
    """Membrane potential and recovery variable of one neuron."""

    v: float
    u: float


@dataclass(frozen=True)
class NeuronGroup:
    gid: int
    name: str
    size: int
    params: IzhikevichParams
    kind: str = "inter"  # sensory | motor | inter


@dataclass(frozen=True)
class Synapse:
    sid: int
    pre: tuple[int, int]   # (group id, neuron index)
    post: tuple[int, int]
    weight: float
    delay: int             # ticks, >= 1


@dataclass(frozen=True)
class SpikeEvent:
    time: int    # ms since simulation start
    group: int   # group id
    index: int   # neuron index within the group


def step_neuron(state: NeuronState, params: IzhikevichParams, current: float,
                dt: float = DT_MS) -> tuple[NeuronState, bool]:
    """Advance a single neuron by one tick; returns the new state and a fired flag.

    The voltage is integrated in two half-steps.  The threshold is checked on
    the incoming value and after each half-step; at the first crossing the
    reset map (v <- c, u <- u + d) is applied and the remainder of the tick,
    including the recovery update, is skipped.
    """
    if dt != DT_MS:
        raise ValueError(f"tick is fixed at {DT_MS} ms, got {dt}")
    v, u = state.v, state.u
    if not (math.isfinite(v) and math.isfinite(u) and math.isfinite(current)):
        raise SimulationError(f"non-finite neuron state or current: v={v} u={u} I={current}")
    if v > SPIKE_THRESHOLD:
        return NeuronState(params.c, u + params.d), True
    half = 0.5 * dt
    v += half * (0.04 * (v * v) + 5.0 * v + 140.0 - u + current)
    if v > SPIKE_THRESHOLD:
        return NeuronState(params.c, u + params.d), True
    v += half * (0.04 * (v * v) + 5.0 * v + 140.0 - u + current)
    if v > SPIKE_THRESHOLD:
        return NeuronState(params.c, u + params.d), True
    u += dt * params.a * (params.b * v - u)
    if not math.isfinite(v):
        raise SimulationError(f"membrane potential diverged: v={v}")
    return NeuronState(v, u), False


def initial_state(params: IzhikevichParams) -> NeuronState:
    """Rest state v = -70, u = b*v: the exact I = 0 fixed point for RS cells."""
    v0 = -70.0
    return NeuronState(v0, params.b * v0)


class Network:
    """A collection of neuron groups plus delayed weighted synapses.

    Stepping is single-threaded; the caller owns the clock and drives the
    network one tick at a time through :meth:`advance`.  Dynamics are fully
    deterministic given identical construction, state, and input sequence.
    """

    def __init__(self):
        self.groups: list[NeuronGroup] = []
        self.synapses: list[Synapse] = []
        self._by_name: dict[str, int] = {}
        self._offset: list[int] = []       # flat index of each group's first neuron
        self._n = 0
        # flat per-neuron arrays
        self._v: list[float] = []
        self._u: list[float] = []
        self._pa: list[float] = []
        self._pb: list[float] = []
        self._pc: list[float] = []
        self._pd: list[float] = []
        self._out: list[list[tuple[int, float, int]]] = []  # per neuron: (post, w, delay)
        self._t = 0
        self._max_delay = 1
        self._wheel: list[list[float]] = [[], []]
        self.last_synaptic: list[float] = []
        self.last_v: list[float] = []      # per-neuron trace, capped at 30 on spike ticks

    # -- construction ------------------------------------------------------

    @property
    def neuron_count(self) -> int:
        return self._n

    @property
    def time(self) -> int:
        """Ticks advanced so far (ms)."""
        return self._t

    def add_group(self, name: str, size: int, params: IzhikevichParams | None = None,
                  kind: str = "inter") -> int:
        """Append a neuron group at rest state; returns its group id."""
        if name in self._by_name:
            raise ValueError(f"duplicate group name {name!r}")
        if size < 1:
            raise ValueError(f"group size must be >= 1, got {size}")
        if kind not in ("sensory", "motor", "inter"):
            raise ValueError(f"unknown group kind {kind!r}")
        params = params if params is not None else RS
        gid = len(self.groups)
        self.groups.append(NeuronGroup(gid, name, size, params, kind))
        self._by_name[name] = gid
        self._offset.append(self._n)
        rest = initial_state(params)
        for _ in range(size):
            self._v.append(rest.v)
            self._u.append(rest.u)
            self._pa.append(params.a)
            self._pb.append(params.b)
            self._pc.append(params.c)
            self._pd.append(params.d)
            self._out.append([])
        self._n += size
        for slot in self._wheel:
            slot.extend([0.0] * size)
        self.last_v = list(self._v)
        return gid

    def group_id(self, group) -> int:
        """Resolve a group reference (id or name) to its id."""
        if isinstance(group, str):
            try:
                return self._by_name[group]
            except KeyError:
                raise KeyError(f"unknown group {group!r}") from None
        gid = int(group)
        if not 0 <= gid < len(self.groups):
            raise KeyError(f"unknown group id {gid}")
        return gid

    def flat_index(self, group, index: int) -> int:
        gid = self.group_id(group)
        size = self.groups[gid].size
        if not 0 <= index < size:
            raise IndexError(f"neuron index {index} out of range for group "
                             f"{self.groups[gid].name!r} of size {size}")
        return self._offset[gid] + index

    def connect(self, pre: tuple, post: tuple, weight: float, delay: int = 1) -> int:
        """Add a synapse pre -> post; returns its id.  Delay is in ticks, >= 1."""
        if delay < 1 or int(delay) != delay:
            raise ValueError(f"synaptic delay must be an integer >= 1 ms, got {delay}")
        delay = int(delay)
        if not math.isfinite(weight):
            raise ValueError("synaptic weight must be finite")
        pre_flat = self.flat_index(*pre)
        post_flat = self.flat_index(*post)
        sid = len(self.synapses)
        syn = Synapse(sid, (self.group_id(pre[0]), pre[1]),
                      (self.group_id(post[0]), post[1]), float(weight), delay)
        self.synapses.append(syn)
        self._out[pre_flat].append((post_flat, float(weight), delay))
        if delay > self._max_delay:
            self._grow_wheel(delay)
        return sid

    def _grow_wheel(self, max_delay: int):
        old, old_len = self._wheel, len(self._wheel)
        wheel = [[0.0] * self._n for _ in range(max_delay + 1)]
        for j in range(old_len):          # re-home pending currents by absolute tick
            tick = self._t + j
            wheel[tick % (max_delay + 1)] = old[tick % old_len]
        self._wheel = wheel
        self._max_delay = max_delay

    # -- state access ------------------------------------------------------

    def get_state(self, group, index: int) -> NeuronState:
        i = self.flat_index(group, index)
        return NeuronState(self._v[i], self._u[i])

    def set_state(self, group, index: int, state: NeuronState):
        i = self.flat_index(group, index)
        self._v[i] = state.v
        self._u[i] = state.u

    def group_name(self, gid: int) -> str:
        return self.groups[gid].name

    def resolve_currents(self, currents) -> list[float]:
        """Turn a {(group, index): current} mapping into a flat per-neuron list.

        Unknown keys are rejected before any neuron is stepped.
        """
        flat = [0.0] * self._n
        for key, value in currents.items():
            group, index = key
            flat[self.flat_index(group, index)] = value
        return flat

    # -- stepping ----------------------------------------------------------

    def advance(self, external_currents=None, rng=None) -> list[SpikeEvent]:
        """Step every neuron by one tick and return the spikes it produced.

        `external_currents` may be a {(group, index): current} mapping or a
        flat per-neuron sequence.  `rng` is accepted for interface
        compatibility with stochastic extensions; the built-in dynamics never
        consume it, so identical state and inputs replay exactly.
        """
        n = self._n
        if external_currents is None:
            ext = None
        elif isinstance(external_currents, dict):
            ext = self.resolve_currents(external_currents)
        else:
            ext = external_currents
            if len(ext) != n:
                raise ValueError(f"expected {n} per-neuron currents, got {len(ext)}")

        t = self._t
        wheel = self._wheel
        slot = t % len(wheel)
        syn = wheel[slot]
        wheel[slot] = [0.0] * n
        self.last_synaptic = syn

        v_arr, u_arr = self._v, self._u
        pa, pb, pc, pd = self._pa, self._pb, self._pc, self._pd
        out = self._out
        last_v = self.last_v
        fired: list[int] = []
        isfinite = math.isfinite

        for i in range(n):
            current = syn[i] if ext is None else syn[i] + ext[i]
            v = v_arr[i]
            u = u_arr[i]
            if not (isfinite(current) and isfinite(v)):
                raise SimulationError(
                    f"non-finite state or current at neuron {i}: v={v} I={current}")
            if v > 30.0:
                fired.append(i)
                continue
            v += 0.5 * (0.04 * (v * v) + 5.0 * v + 140.0 - u + current)
            if v > 30.0:
                fired.append(i)
                continue
            v += 0.5 * (0.04 * (v * v) + 5.0 * v + 140.0 - u + current)
            if v > 30.0:
                fired.append(i)
                continue
            u_arr[i] = u + pa[i] * (pb[i] * v - u)
            v_arr[i] = v
            last_v[i] = v

        events: list[SpikeEvent] = []
        if fired:
            append = events.append
            for i in fired:
                last_v[i] = 30.0
                v_arr[i] = pc[i]
                u_arr[i] += pd[i]
                for post, w, delay in out[i]:
                    wheel[(t + delay) % len(wheel)][post] += w
                gid = self._gid_of(i)
                append(SpikeEvent(t, gid, i - self._offset[gid]))
        self._t = t + 1
        return events

    def _gid_of(self, flat: int) -> int:
        for gid in range(len(self.groups) - 1, -1, -1):
            if flat >= self._offset[gid]:
                return gid
        raise IndexError(flat)

    # -- introspection -----------------------------------------------------

    def to_dict(self) -> dict:
        """JSON-friendly description of groups and synapses."""
        return {
            "groups": [
                {"id": g.gid, "name": g.name, "size": g.size, "kind": g.kind,
                 "params": {"a": g.params.a, "b": g.params.b,
                            "c": g.params.c, "d": g.params.d}}
                for g in self.groups
            ],
            "synapses": [
                {"id": s.sid, "pre": [s.pre[0], s.pre[1]], "post": [s.post[0], s.post[1]],
                 "weight": s.weight, "delay": s.delay}
                for s in self.synapses
            ],
        }
