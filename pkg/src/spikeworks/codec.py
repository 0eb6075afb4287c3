"""Sensor-to-current encoders and spike-train-to-wheel-command decoders.

Sensors drive their neurons by current injection (the neurons stay governed
by the membrane equations); motor spike trains are rate coded over a sliding
window, and the forward/backward population rates of each wheel are
subtracted to produce a signed velocity command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TICKS_PER_SECOND = 1000


@dataclass(frozen=True)
class EncoderConfig:
    """Affine transfer from a normalized sensor value to an injected current."""

    gain: float = 15.0
    bias: float = 0.0
    saturation: float = 30.0

    def __post_init__(self):
        if self.gain < 0:
            raise ValueError(f"gain must be >= 0, got {self.gain}")
        if self.saturation < self.bias:
            raise ValueError("saturation must be >= bias")


@dataclass(frozen=True)
class TofEncoderConfig:
    """Two-channel ranger transfer: a clear-path drive and an obstacle drive.

    The clear channel ramps up with distance and saturates at `d_safe`; the
    obstacle channel is zero beyond `d_stop` and ramps to full as the
    distance reaches zero.
    """

    gain_clear: float = 30.0
    gain_obstacle: float = 30.0
    d_stop: float = 0.10
    d_safe: float = 0.50

    def __post_init__(self):
        if self.gain_clear < 0 or self.gain_obstacle < 0:
            raise ValueError("gains must be >= 0")
        if not 0 < self.d_stop < self.d_safe:
            raise ValueError("required: 0 < d_stop < d_safe")


def encode_proximity(normalized: float, cfg: EncoderConfig) -> float:
    """Current for one proximity neuron; monotone non-decreasing in the input."""
    x = min(max(normalized, 0.0), 1.0)
    return min(cfg.bias + cfg.gain * x, cfg.saturation)


def encode_tof(distance: float, cfg: TofEncoderConfig) -> tuple[float, float]:
    """(clear_current, obstacle_current) for the two ranger neurons."""
    if distance < 0 or not math.isfinite(distance):
        raise ValueError(f"distance must be finite and >= 0, got {distance}")
    clear = cfg.gain_clear * min(distance / cfg.d_safe, 1.0)
    obstacle = cfg.gain_obstacle * min(max(1.0 - distance / cfg.d_stop, 0.0), 1.0)
    return clear, obstacle


class RateWindow:
    """Sliding per-neuron spike counts over the trailing `length_ms` ticks.

    Updated once per tick via :meth:`push`; rates are population means in Hz.
    """

    def __init__(self, n_neurons: int, length_ms: int = 100, start_ms: int = 0):
        if n_neurons < 1:
            raise ValueError("window needs at least one neuron")
        if length_ms < 1:
            raise ValueError("window length must be >= 1 ms")
        self.n_neurons = n_neurons
        self.length_ms = length_ms
        self.end_ms = start_ms            # exclusive end of the covered span
        self._ring = [bytearray(length_ms) for _ in range(n_neurons)]
        self._pos = 0
        self.counts = [0] * n_neurons

    def push(self, ticks_spiked) -> None:
        """Record one tick; `ticks_spiked[i]` is 1 if neuron i spiked, else 0."""
        if len(ticks_spiked) != self.n_neurons:
            raise ValueError("per-neuron tick vector of wrong length")
        pos = self._pos
        counts = self.counts
        for i, s in enumerate(ticks_spiked):
            if s not in (0, 1):
                raise ValueError("at most one spike per neuron per tick")
            ring = self._ring[i]
            counts[i] += s - ring[pos]
            ring[pos] = s
        self._pos = (pos + 1) % self.length_ms
        self.end_ms += 1

    def rates(self) -> list[float]:
        """Per-neuron rate estimates in Hz, each in [0, 1000]."""
        scale = TICKS_PER_SECOND / self.length_ms
        return [c * scale for c in self.counts]

    def population_rate(self) -> float:
        """Mean rate over the window's neurons, in Hz."""
        return (sum(self.counts) * TICKS_PER_SECOND) / (self.length_ms * self.n_neurons)


@dataclass(frozen=True)
class WheelCommand:
    """Signed wheel velocities in m/s (positive = forward)."""

    v_left: float
    v_right: float


#: Default velocity per unit rate difference.  Regular-spiking motor neurons
#: under single-synapse pulse drive sustain at most ~15 Hz, so 0.008 m/s/Hz
#: puts saturated forward drive at the 0.12 m/s cruise ceiling.
DEFAULT_RATE_GAIN = 0.008


def decode_wheel(window_fwd: RateWindow, window_bwd: RateWindow,
                 k: float = DEFAULT_RATE_GAIN, v_max: float = 0.12) -> float:
    """Signed wheel velocity from antagonistic forward/backward rate windows.

    v = clamp(k * (rate_fwd - rate_bwd), -v_max, +v_max).  Both windows must
    cover the identical time span.
    """
    if (window_fwd.length_ms != window_bwd.length_ms
            or window_fwd.end_ms != window_bwd.end_ms):
        raise ValueError("forward/backward windows cover different time spans")
    v = k * (window_fwd.population_rate() - window_bwd.population_rate())
    return min(max(v, -v_max), v_max)


def poisson_injector(rate: float, duration_ms: int, rng) -> list[int]:
    """Tick times of a Bernoulli spike train at `rate` Hz over `duration_ms`.

    Each 1 ms tick spikes independently with probability rate/1000, so the
    train is reproducible from the generator's seed.
    """
    if not 0 <= rate <= TICKS_PER_SECOND:
        raise ValueError(f"rate must lie in [0, {TICKS_PER_SECOND}] Hz, got {rate}")
    p = rate / TICKS_PER_SECOND
    random = rng.random
    return [t for t in range(duration_ms) if random() < p]
