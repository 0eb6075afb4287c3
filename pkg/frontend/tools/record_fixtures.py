"""Record UI test fixtures from a live spikeworks server.

Starts the real HTTP/WS API on an ephemeral port, streams /api/events over an
actual WebSocket while the session runs for 5 simulated seconds, and saves
the received frames plus the session's exported spike CSV.  The vitest suite
replays these to check raster fidelity against the export, 1:1.

Usage: python tools/record_fixtures.py [out_dir]
"""

import asyncio
import json
import os
import socket
import sys
import threading
import time

import uvicorn
import websockets

from spikeworks.cli import write_outputs
from spikeworks.config import default_config
from spikeworks.server import create_app
from spikeworks.session import Session, SessionRunner

DURATION_MS = 5_000
RT_FACTOR = 25.0          # stream in ~0.2 s wall so the socket sees live batches


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


async def record(port: int, runner: SessionRunner, out_dir: str):
    frames = []
    async with websockets.connect(f"ws://127.0.0.1:{port}/api/events") as ws:
        runner.submit("speed", factor=RT_FACTOR)
        runner.submit("start")
        stopped = False
        while True:
            try:
                batch = json.loads(await asyncio.wait_for(ws.recv(), timeout=5))
            except asyncio.TimeoutError:
                break
            frames.extend(batch)
            if not stopped and runner.call(lambda s: s.sim_time) >= DURATION_MS:
                runner.submit("stop")
                stopped = True
            if stopped and any(f.get("type") == "state" and f.get("mode") == "idle"
                               for f in batch):
                break

    outputs = runner.call(lambda s: write_outputs(s, out_dir))
    with open(os.path.join(out_dir, "session.frames.json"), "w") as fh:
        json.dump(frames, fh)
    spike_frames = [f for f in frames if f.get("type") == "spikes"]
    n_events = sum(len(f["events"]) for f in spike_frames)
    print(f"recorded {len(frames)} frames ({n_events} spike events), "
          f"summary: {outputs['spike_counts']}")


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else \
        os.path.join(os.path.dirname(__file__), "..", "fixtures")
    os.makedirs(out_dir, exist_ok=True)

    session = Session(default_config(seed=1, world="box"))
    runner = SessionRunner(session)
    runner.start()
    port = free_port()
    server = uvicorn.Server(uvicorn.Config(create_app(runner), host="127.0.0.1",
                                           port=port, log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)

    try:
        asyncio.run(record(port, runner, out_dir))
    finally:
        server.should_exit = True
        thread.join(timeout=5)
        runner.shutdown()


if __name__ == "__main__":
    main()
