"""Named-port publish/subscribe bus with a central registry.

Ports are registered under slash-paths (e.g. "/epuck/sensors/ps") and can be
arbitrarily connected output-to-input.  Messages are timestamped float
vectors, delivered FIFO per connection into bounded queues that drop the
oldest entry on overflow: a control loop wants fresh sensor data, not
backpressure.

The same messages travel over TCP using a 4-byte little-endian length prefix
followed by one UTF-8 JSON object {"t":<int>,"port":"<path>","data":[...]}
with no trailing newline; see :mod:`spikeworks.bus_tcp` for the transport.
"""

from __future__ import annotations

import json
import struct
from collections import deque
from dataclasses import dataclass

DEFAULT_CAPACITY = 1024
DEFAULT_NAME_SERVER_PORT = 10000

_HEADER = struct.Struct("<I")


class BusError(RuntimeError):
    """Port registry or delivery misuse."""


class FramingError(ValueError):
    """Malformed or truncated wire frame."""


def validate_port_name(path: str) -> str:
    if not isinstance(path, str) or not path.startswith("/"):
        raise BusError(f"port name must start with '/': {path!r}")
    body = path[1:]
    if not body or body.endswith("/") or any(not seg for seg in body.split("/")):
        raise BusError(f"malformed port name {path!r}")
    if any(c.isspace() for c in path):
        raise BusError(f"port name may not contain whitespace: {path!r}")
    return path


@dataclass(frozen=True)
class PortMessage:
    timestamp: int        # ms, assigned by the publisher
    payload: tuple        # 64-bit floats
    topic: str            # source port path


def frame_message(msg: PortMessage) -> bytes:
    """Serialize one message to its length-prefixed wire frame."""
    body = json.dumps({"t": msg.timestamp, "port": msg.topic,
                       "data": list(msg.payload)},
                      separators=(",", ":")).encode("utf-8")
    return _HEADER.pack(len(body)) + body


def unframe_message(data: bytes) -> PortMessage:
    """Decode exactly one wire frame; rejects truncated or trailing bytes."""
    if len(data) < _HEADER.size:
        raise FramingError(f"frame header truncated ({len(data)} bytes)")
    (n,) = _HEADER.unpack_from(data)
    if len(data) != _HEADER.size + n:
        raise FramingError(f"frame length {n} does not match body "
                           f"({len(data) - _HEADER.size} bytes)")
    return _decode_body(data[_HEADER.size:])


def _decode_body(body: bytes) -> PortMessage:
    try:
        obj = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FramingError(f"undecodable frame body: {exc}") from None
    try:
        t = obj["t"]
        port = obj["port"]
        data = obj["data"]
    except (TypeError, KeyError) as exc:
        raise FramingError(f"frame missing field {exc}") from None
    if not isinstance(t, int) or not isinstance(port, str) or not isinstance(data, list):
        raise FramingError("frame field of wrong type")
    return PortMessage(t, tuple(float(x) for x in data), port)


class FrameDecoder:
    """Incremental decoder for a length-prefixed frame stream."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[bytes]:
        """Append bytes; return the bodies of every newly completed frame."""
        self._buf.extend(data)
        out = []
        buf = self._buf
        while True:
            if len(buf) < _HEADER.size:
                break
            (n,) = _HEADER.unpack_from(buf)
            if len(buf) < _HEADER.size + n:
                break
            out.append(bytes(buf[_HEADER.size:_HEADER.size + n]))
            del buf[:_HEADER.size + n]
        return out

    @property
    def pending(self) -> int:
        return len(self._buf)


class Port:
    """Handle for one registered port; owned by a single thread."""

    def __init__(self, name: str, direction: str, capacity: int = DEFAULT_CAPACITY):
        if direction not in ("in", "out"):
            raise BusError(f"direction must be 'in' or 'out', got {direction!r}")
        self.name = name
        self.direction = direction
        self.capacity = capacity
        self.overflow_count = 0
        self._queue: deque = deque()
        self._sinks: list[Port] = []
        self._payload_len: int | None = None

    # -- output side ---------------------------------------------------------

    def publish(self, message: PortMessage) -> None:
        """Deliver to every connected sink; payload length is locked on first use."""
        if self.direction != "out":
            raise BusError(f"cannot publish on input port {self.name}")
        n = len(message.payload)
        if self._payload_len is None:
            self._payload_len = n
        elif n != self._payload_len:
            raise BusError(f"payload length changed on {self.name}: "
                           f"{self._payload_len} -> {n}")
        for sink in self._sinks:
            sink._enqueue(message)

    def send(self, timestamp: int, payload) -> PortMessage:
        """Publish a payload, stamping this port as the topic."""
        msg = PortMessage(timestamp, tuple(payload), self.name)
        self.publish(msg)
        return msg

    # -- input side ------------------------------------------------------------

    def _enqueue(self, message: PortMessage) -> None:
        q = self._queue
        if len(q) >= self.capacity:
            try:
                q.popleft()
                self.overflow_count += 1
            except IndexError:      # racing poller already drained it
                pass
        q.append(message)

    def poll(self, max_messages: int | None = None) -> list[PortMessage]:
        """Up to `max_messages` queued messages in arrival order (all if None)."""
        if self.direction != "in":
            raise BusError(f"cannot poll output port {self.name}")
        q = self._queue
        n = len(q) if max_messages is None else min(max_messages, len(q))
        out = []
        for _ in range(n):
            try:
                out.append(q.popleft())
            except IndexError:
                break
        return out

    def __repr__(self):
        return f"Port({self.name!r}, {self.direction!r})"


class Registry:
    """Central name table mapping port paths to handles plus the connection list."""

    def __init__(self):
        self._ports: dict[str, Port] = {}
        self.connections: list[tuple[str, str]] = []

    def register(self, name: str, direction: str,
                 capacity: int = DEFAULT_CAPACITY) -> Port:
        validate_port_name(name)
        if name in self._ports:
            raise BusError(f"port {name!r} already registered")
        port = Port(name, direction, capacity)
        self._ports[name] = port
        return port

    def unregister(self, name: str) -> None:
        port = self.resolve(name)
        del self._ports[name]
        for src, dst in [c for c in self.connections if name in c]:
            self.connections.remove((src, dst))
            if port.direction == "in":
                self._ports[src]._sinks.remove(port)

    def resolve(self, name: str) -> Port:
        try:
            return self._ports[name]
        except KeyError:
            raise BusError(f"unknown port {name!r}") from None

    def connect(self, source: str, sink: str) -> int:
        """Wire an output port to an input port; returns the connection index."""
        src = self.resolve(source)
        dst = self.resolve(sink)
        if src.direction != "out":
            raise BusError(f"connection source {source!r} is not an output port")
        if dst.direction != "in":
            raise BusError(f"connection sink {sink!r} is not an input port")
        if (source, sink) in self.connections:
            raise BusError(f"{source!r} -> {sink!r} already connected")
        src._sinks.append(dst)
        self.connections.append((source, sink))
        return len(self.connections) - 1
