"""HTTP + WebSocket control API over a running session.

All reads and commands are funneled through the simulation thread's mailbox
(see :class:`spikeworks.session.SessionRunner`), so API handlers never touch
session state concurrently with a tick.  The event stream batches frames into
JSON arrays sent at most every 20 ms.
"""

from __future__ import annotations

import asyncio
import json
import os

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .neurons import IzhikevichParams
from .session import CommandError, SessionRunner

EVENT_BATCH_SECONDS = 0.02


class ControlRequest(BaseModel):
    cmd: str
    n_ms: int | None = None
    factor: float | None = None


class GroupRequest(BaseModel):
    name: str
    size: int
    kind: str = "inter"
    params: dict | None = None


class ConnectionRequest(BaseModel):
    pre: tuple[str, int]
    post: tuple[str, int]
    weight: float
    delay: int = 1


def create_app(runner: SessionRunner, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="spikeworks", docs_url=None, redoc_url=None)

    @app.get("/api/state")
    def get_state():
        return runner.call(lambda s: s.state())

    @app.get("/api/network")
    def get_network():
        return runner.call(lambda s: s.network.to_dict())

    @app.get("/api/world")
    def get_world():
        def describe(s):
            start = s.world.start
            return {"name": s.world.name,
                    "walls": [list(w) for w in s.world.walls],
                    "start": [start.x, start.y, start.theta] if start else None,
                    "body_radius": s.config.geometry.body_radius}
        return runner.call(describe)

    @app.post("/api/control")
    def post_control(req: ControlRequest):
        try:
            return runner.submit(req.cmd, req.n_ms, req.factor)
        except CommandError as exc:
            state = runner.call(lambda s: s.state())
            return JSONResponse(status_code=409,
                                content={"error": str(exc), "state": state})

    @app.post("/api/network/groups")
    def post_group(req: GroupRequest):
        params = None
        if req.params is not None:
            try:
                params = IzhikevichParams(**req.params)
            except (TypeError, ValueError) as exc:
                return JSONResponse(status_code=400, content={"error": str(exc)})
        try:
            gid = runner.call(
                lambda s: s.add_group(req.name, req.size, params, req.kind))
        except CommandError as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        except (ValueError, KeyError, IndexError) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return {"id": gid}

    @app.post("/api/network/connections")
    def post_connection(req: ConnectionRequest):
        try:
            sid = runner.call(
                lambda s: s.add_connection(tuple(req.pre), tuple(req.post),
                                           req.weight, req.delay))
        except CommandError as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        except (ValueError, KeyError, IndexError) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return {"id": sid}

    @app.websocket("/api/events")
    async def events(ws: WebSocket):
        await ws.accept()
        state = runner.call(lambda s: s.state())
        await ws.send_text(json.dumps([{"type": "state", **state}]))
        seq, _ = runner.events.since(-1)
        seq = max(seq - 64, 0)           # replay a little recent history
        try:
            while True:
                seq, frames = runner.events.since(seq)
                if frames:
                    await ws.send_text(json.dumps(frames))
                await asyncio.sleep(EVENT_BATCH_SECONDS)
        except (WebSocketDisconnect, RuntimeError):
            return

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def find_ui_dir() -> str | None:
    """Locate the companion UI bundle (env override, then ./frontend/dist)."""
    env = os.environ.get("SPIKEWORKS_UI_DIR")
    if env and os.path.isdir(env):
        return env
    here = os.path.dirname(os.path.abspath(__file__))
    for base in (os.getcwd(), os.path.dirname(os.path.dirname(here))):
        candidate = os.path.join(base, "frontend", "dist")
        if os.path.isdir(candidate):
            return candidate
    return None
