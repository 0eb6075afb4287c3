"""Loopback/LAN transport for the port bus: a central hub plus thin clients.

The hub is the name server: it owns the port table and the connection list,
and relays data frames verbatim from publishers to the clients holding
connected input ports.  All traffic uses the length-prefixed JSON framing
from :mod:`spikeworks.bus`.  Control objects carry an "op" key::

    {"op":"register","name":"/x","dir":"out"}      -> {"ok":true}
    {"op":"unregister","name":"/x"}                -> {"ok":true}
    {"op":"resolve","name":"/x"}                   -> {"ok":true,"dir":"out"}
    {"op":"connect","src":"/x","dst":"/y"}         -> {"ok":true,"id":0}

and the hub pushes {"op":"connected","src":...,"dst":...} to the client
owning the sink so it can route incoming data frames locally.
"""

from __future__ import annotations

import json
import socket
import struct
import threading

from .bus import (DEFAULT_CAPACITY, DEFAULT_NAME_SERVER_PORT, BusError,
                  FrameDecoder, Port, PortMessage, frame_message,
                  validate_port_name)

_HEADER = struct.Struct("<I")


def _control_frame(obj: dict) -> bytes:
    body = json.dumps(obj, separators=(",", ":")).encode("utf-8")
    return _HEADER.pack(len(body)) + body


class BusHub:
    """Name server and message relay listening on one TCP port."""

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_NAME_SERVER_PORT):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen()
        self.address = self._sock.getsockname()
        self._lock = threading.Lock()
        self._owners: dict[str, tuple[str, _HubClient]] = {}  # name -> (dir, client)
        self._connections: list[tuple[str, str]] = []
        self._clients: set[_HubClient] = set()
        self._closing = False
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def _accept_loop(self):
        while True:
            try:
                conn, _ = self._sock.accept()
            except OSError:
                return
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            client = _HubClient(self, conn)
            with self._lock:
                self._clients.add(client)
            client.start()

    # -- control ops (called from client reader threads) ----------------------

    def op_register(self, client: _HubClient, name: str, direction: str) -> dict:
        validate_port_name(name)
        if direction not in ("in", "out"):
            return {"ok": False, "error": f"bad direction {direction!r}"}
        with self._lock:
            if name in self._owners:
                return {"ok": False, "error": f"port {name!r} already registered"}
            self._owners[name] = (direction, client)
        return {"ok": True}

    def op_unregister(self, client: _HubClient, name: str) -> dict:
        with self._lock:
            if name not in self._owners:
                return {"ok": False, "error": f"unknown port {name!r}"}
            self._drop_port(name)
        return {"ok": True}

    def op_resolve(self, name: str) -> dict:
        with self._lock:
            entry = self._owners.get(name)
        if entry is None:
            return {"ok": False, "error": f"unknown port {name!r}"}
        return {"ok": True, "dir": entry[0]}

    def op_connect(self, source: str, sink: str) -> dict:
        with self._lock:
            src = self._owners.get(source)
            dst = self._owners.get(sink)
            if src is None or dst is None:
                missing = source if src is None else sink
                return {"ok": False, "error": f"unknown port {missing!r}"}
            if src[0] != "out":
                return {"ok": False, "error": f"source {source!r} is not an output"}
            if dst[0] != "in":
                return {"ok": False, "error": f"sink {sink!r} is not an input"}
            if (source, sink) in self._connections:
                return {"ok": False, "error": "already connected"}
            self._connections.append((source, sink))
            cid = len(self._connections) - 1
        dst[1].push({"op": "connected", "src": source, "dst": sink})
        return {"ok": True, "id": cid}

    def route(self, source: str, frame: bytes) -> None:
        """Forward a data frame to every client owning a connected sink."""
        with self._lock:
            targets = {self._owners[dst][1]
                       for src, dst in self._connections
                       if src == source and dst in self._owners}
        for client in targets:
            client.send_bytes(frame)

    def _drop_port(self, name: str) -> None:
        # lock held by caller
        del self._owners[name]
        self._connections = [(s, d) for s, d in self._connections
                             if s != name and d != name]

    def drop_client(self, client: _HubClient) -> None:
        with self._lock:
            self._clients.discard(client)
            for name in [n for n, (_, c) in self._owners.items() if c is client]:
                self._drop_port(name)

    def close(self):
        self._closing = True
        try:
            self._sock.close()
        except OSError:
            pass
        with self._lock:
            clients = list(self._clients)
        for c in clients:
            c.close()


class _HubClient:
    """Hub-side handler for one connected client socket."""

    def __init__(self, hub: BusHub, conn: socket.socket):
        self.hub = hub
        self.conn = conn
        self._send_lock = threading.Lock()
        self._thread = threading.Thread(target=self._reader, daemon=True)

    def start(self):
        self._thread.start()

    def _reader(self):
        decoder = FrameDecoder()
        try:
            while True:
                chunk = self.conn.recv(65536)
                if not chunk:
                    break
                for body in decoder.feed(chunk):
                    self._dispatch(body)
        except OSError:
            pass
        finally:
            self.hub.drop_client(self)
            self.close()

    def _dispatch(self, body: bytes):
        try:
            obj = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            self.push({"ok": False, "error": "undecodable frame"})
            return
        op = obj.get("op")
        if op is None:
            port = obj.get("port")
            if isinstance(port, str):
                self.hub.route(port, _HEADER.pack(len(body)) + body)
            return
        if op == "register":
            reply = self.hub.op_register(self, obj.get("name"), obj.get("dir"))
        elif op == "unregister":
            reply = self.hub.op_unregister(self, obj.get("name"))
        elif op == "resolve":
            reply = self.hub.op_resolve(obj.get("name"))
        elif op == "connect":
            reply = self.hub.op_connect(obj.get("src"), obj.get("dst"))
        else:
            reply = {"ok": False, "error": f"unknown op {op!r}"}
        self.push(reply)

    def push(self, obj: dict):
        self.send_bytes(_control_frame(obj))

    def send_bytes(self, frame: bytes):
        try:
            with self._send_lock:
                self.conn.sendall(frame)
        except OSError:
            pass

    def close(self):
        try:
            self.conn.close()
        except OSError:
            pass


class RemotePort(Port):
    """Port handle whose publishes travel through a hub."""

    def __init__(self, client: BusClient, name: str, direction: str,
                 capacity: int = DEFAULT_CAPACITY):
        super().__init__(name, direction, capacity)
        self._client = client

    def publish(self, message: PortMessage) -> None:
        if self.direction != "out":
            raise BusError(f"cannot publish on input port {self.name}")
        n = len(message.payload)
        if self._payload_len is None:
            self._payload_len = n
        elif n != self._payload_len:
            raise BusError(f"payload length changed on {self.name}: "
                           f"{self._payload_len} -> {n}")
        self._client._send(frame_message(message))


class BusClient:
    """Client-side bus endpoint: registers ports at a hub and routes deliveries."""

    def __init__(self, address, timeout: float = 5.0):
        self._sock = socket.create_connection(address, timeout=timeout)
        self._sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._sock.settimeout(None)
        self._timeout = timeout
        self._send_lock = threading.Lock()
        self._request_lock = threading.Lock()
        self._reply = None
        self._reply_ready = threading.Event()
        self._ports: dict[str, RemotePort] = {}
        self._routes: dict[str, list[str]] = {}   # source path -> local sink paths
        self._lock = threading.Lock()
        self._closed = False
        self._thread = threading.Thread(target=self._reader, daemon=True)
        self._thread.start()

    # -- public API ------------------------------------------------------------

    def register_port(self, name: str, direction: str,
                      capacity: int = DEFAULT_CAPACITY) -> RemotePort:
        validate_port_name(name)
        reply = self._request({"op": "register", "name": name, "dir": direction})
        if not reply.get("ok"):
            raise BusError(reply.get("error", "registration failed"))
        port = RemotePort(self, name, direction, capacity)
        with self._lock:
            self._ports[name] = port
        return port

    def unregister_port(self, name: str) -> None:
        reply = self._request({"op": "unregister", "name": name})
        if not reply.get("ok"):
            raise BusError(reply.get("error", "unregister failed"))
        with self._lock:
            self._ports.pop(name, None)
            for sinks in self._routes.values():
                if name in sinks:
                    sinks.remove(name)

    def resolve(self, name: str) -> dict:
        return self._request({"op": "resolve", "name": name})

    def connect_ports(self, source: str, sink: str) -> int:
        reply = self._request({"op": "connect", "src": source, "dst": sink})
        if not reply.get("ok"):
            raise BusError(reply.get("error", "connect failed"))
        return reply["id"]

    def close(self):
        self._closed = True
        try:
            self._sock.close()
        except OSError:
            pass

    # -- wire plumbing -----------------------------------------------------------

    def _send(self, frame: bytes):
        with self._send_lock:
            self._sock.sendall(frame)

    def _request(self, obj: dict) -> dict:
        with self._request_lock:
            self._reply_ready.clear()
            self._send(_control_frame(obj))
            if not self._reply_ready.wait(self._timeout):
                raise BusError(f"hub did not answer {obj.get('op')!r}")
            return self._reply

    def _reader(self):
        decoder = FrameDecoder()
        try:
            while True:
                chunk = self._sock.recv(65536)
                if not chunk:
                    break
                for body in decoder.feed(chunk):
                    self._dispatch(body)
        except OSError:
            pass

    def _dispatch(self, body: bytes):
        obj = json.loads(body.decode("utf-8"))
        if "ok" in obj and "op" not in obj:
            self._reply = obj
            self._reply_ready.set()
            return
        op = obj.get("op")
        if op == "connected":
            with self._lock:
                self._routes.setdefault(obj["src"], [])
                if obj["dst"] not in self._routes[obj["src"]]:
                    self._routes[obj["src"]].append(obj["dst"])
            return
        if op is not None:
            return
        # data frame: fan out to the local sinks fed by this source
        source = obj["port"]
        msg = PortMessage(obj["t"], tuple(float(x) for x in obj["data"]), source)
        with self._lock:
            sinks = [self._ports[s] for s in self._routes.get(source, ())
                     if s in self._ports]
        for sink in sinks:
            sink._enqueue(msg)
