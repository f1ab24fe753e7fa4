"""HTTP + WebSocket streaming of pipeline frames with live control.

Routes: GET / (viewer assets), GET /status (JSON incl. class palette),
GET /timings.csv (per-stage means so far), WS /stream (binary frames out,
JSON control messages in).  Each client gets latest-frame-wins delivery; a
client connecting mid-stream receives the latest complete frame first.
Control commands (pause/resume/toggle) apply synchronously to shared state
and are reflected in the reply's stage_states.
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading
import time
from pathlib import Path

from aiohttp import WSMsgType, web

from ..pipeline import (
    TOGGLE_STAGES,
    FrameExchange,
    PipelineConfig,
    PipelineSession,
    replace_toggles,
)
from .wire import encode_wireframe

logger = logging.getLogger(__name__)

_STATIC_DIR = Path(__file__).parent / "static"


class SharedState:
    """Pipeline-side state the control channel may touch (thread-safe)."""

    def __init__(self, config: PipelineConfig):
        self._lock = threading.Lock()
        self.toggles = dict(config.toggles)
        self.paused = threading.Event()
        self.frame_index = -1
        self.fps = 0.0
        self.timings: dict[str, float] = {}
        self._last_frame_time: float | None = None

    def set_toggle(self, stage: str, value: bool) -> None:
        with self._lock:
            self.toggles[stage] = bool(value)

    def snapshot_toggles(self) -> dict[str, bool]:
        with self._lock:
            return dict(self.toggles)

    def note_frame(self, index: int, timings: dict[str, float]) -> None:
        now = time.monotonic()
        with self._lock:
            self.frame_index = index
            self.timings = dict(timings)
            if self._last_frame_time is not None:
                dt = now - self._last_frame_time
                if dt > 0:
                    inst = 1.0 / dt
                    self.fps = inst if self.fps == 0 else 0.8 * self.fps + 0.2 * inst
            self._last_frame_time = now

    def status(self) -> dict:
        with self._lock:
            return {
                "frame_index": self.frame_index,
                "fps": round(self.fps, 2),
                "paused": self.paused.is_set(),
                "stage_states": dict(self.toggles),
                "timings_summary": {k: round(v, 3) for k, v in self.timings.items()},
            }


class PipelineServer:
    """Owns the pipeline thread, the latest-frame slot, and the aiohttp app."""

    def __init__(self, config: PipelineConfig, static_dir: str | Path | None = None,
                 loop_dataset: bool = False):
        self.config = config
        self.state = SharedState(config)
        self.static_dir = Path(static_dir) if static_dir else _STATIC_DIR
        self.loop_dataset = loop_dataset
        self._exchange = FrameExchange(mode="live")
        self._latest: bytes | None = None
        self._loop: asyncio.AbstractEventLoop | None = None
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []

    # -- pipeline side -----------------------------------------------------

    def _pipeline_worker(self) -> None:
        session = PipelineSession(self.config)
        stream_index = 0  # wire indices stay monotone across dataset loops
        while not self._stop.is_set():
            for index in range(session.dataset.frame_count):
                if self._stop.is_set():
                    return
                while self.state.paused.is_set() and not self._stop.is_set():
                    time.sleep(0.01)
                if self.config.pace_ms > 0:
                    time.sleep(self.config.pace_ms / 1000.0)
                session.config = replace_toggles(session.config,
                                                 **self.state.snapshot_toggles())
                result = session.process_frame(index)
                self.state.note_frame(stream_index, result.timings_ms)
                include_class = result.cloud.class_rgb is not None
                blob = encode_wireframe(result.cloud, stream_index,
                                        include_class=include_class)
                stream_index += 1
                if not self._exchange.put(blob):
                    return
            if not self.loop_dataset:
                break
        self._exchange.close()

    def _bridge_worker(self) -> None:
        """Move frames from the pipeline thread into the asyncio loop."""
        while not self._stop.is_set():
            try:
                blob = self._exchange.get(timeout=0.25)
            except TimeoutError:
                continue
            if blob is None:
                break
            if self._loop is not None and not self._loop.is_closed():
                self._loop.call_soon_threadsafe(self._publish, blob)

    def _publish(self, blob: bytes) -> None:
        self._latest = blob
        self._frame_counter += 1
        self._waiters_event.set()
        self._waiters_event = asyncio.Event()

    # -- http side ---------------------------------------------------------

    def build_app(self) -> web.Application:
        app = web.Application()
        self._frame_counter = 0
        app.router.add_get("/", self._handle_index)
        app.router.add_get("/status", self._handle_status)
        app.router.add_get("/timings.csv", self._handle_timings)
        app.router.add_get("/stream", self._handle_stream)
        # the viewer's index.html loads ./dist/main.js relative to /
        dist = self.static_dir / "dist"
        if dist.is_dir():
            app.router.add_static("/dist", dist)
        if self.static_dir.is_dir():
            app.router.add_static("/assets", self.static_dir)
        return app

    async def _handle_index(self, request: web.Request) -> web.StreamResponse:
        index = self.static_dir / "index.html"
        if index.exists():
            return web.FileResponse(index)
        return web.Response(text="viewer assets not built; see README",
                            content_type="text/plain")

    async def _handle_status(self, request: web.Request) -> web.Response:
        doc = self.state.status()
        doc["classes"] = self._class_palette()
        return web.json_response(doc)

    def _class_palette(self) -> list[dict]:
        try:
            from ..classify import load_model
            model = load_model(self.config.model_path())
            return [{"name": c.name, "color": list(c.color)} for c in model.classes]
        except Exception:
            return []

    async def _handle_timings(self, request: web.Request) -> web.Response:
        status = self.state.status()
        lines = ["stage,mean_ms"]
        for stage, ms in status["timings_summary"].items():
            lines.append(f"{stage},{ms}")
        return web.Response(text="\n".join(lines) + "\n", content_type="text/csv")

    async def _handle_stream(self, request: web.Request) -> web.WebSocketResponse:
        ws = web.WebSocketResponse()
        await ws.prepare(request)
        sender = asyncio.create_task(self._send_frames(ws))
        try:
            async for msg in ws:
                if msg.type == WSMsgType.TEXT:
                    await ws.send_json(self._handle_control(msg.data))
                elif msg.type == WSMsgType.ERROR:
                    break
        finally:
            sender.cancel()
        return ws

    async def _send_frames(self, ws: web.WebSocketResponse) -> None:
        last_sent = -1
        try:
            while not ws.closed:
                if self._latest is not None and self._frame_counter != last_sent:
                    last_sent = self._frame_counter
                    await ws.send_bytes(self._latest)
                event = self._waiters_event
                try:
                    await asyncio.wait_for(event.wait(), timeout=0.5)
                except asyncio.TimeoutError:
                    pass
        except (asyncio.CancelledError, ConnectionResetError):
            pass

    def _handle_control(self, raw: str) -> dict:
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError:
            return {"error": "bad_request"}
        cmd = doc.get("cmd")
        if cmd == "pause":
            self.state.paused.set()
        elif cmd == "resume":
            self.state.paused.clear()
        elif cmd == "toggle":
            stage = doc.get("stage")
            if stage not in TOGGLE_STAGES:
                return {"error": "unknown_stage", "stage": stage}
            self.state.set_toggle(stage, bool(doc.get("value", True)))
        else:
            return {"error": "bad_request"}
        return self.state.status()

    # -- lifecycle ----------------------------------------------------------

    async def start(self, host: str = "127.0.0.1", port: int = 8700) -> web.AppRunner:
        self._loop = asyncio.get_running_loop()
        self._waiters_event = asyncio.Event()
        app = self.build_app()
        runner = web.AppRunner(app)
        await runner.setup()
        site = web.TCPSite(runner, host, port)
        await site.start()
        for target in (self._pipeline_worker, self._bridge_worker):
            t = threading.Thread(target=target, daemon=True)
            t.start()
            self._threads.append(t)
        logger.info("serving on %s:%d", host, port)
        return runner

    async def stop(self, runner: web.AppRunner) -> None:
        self._stop.set()
        self._exchange.close()
        await runner.cleanup()


def serve_forever(config: PipelineConfig, host: str, port: int,
                  static_dir: str | Path | None = None,
                  loop_dataset: bool = True) -> None:
    """Blocking entry point used by the CLI."""
    async def _main():
        server = PipelineServer(config, static_dir=static_dir,
                                loop_dataset=loop_dataset)
        runner = await server.start(host, port)
        try:
            while True:
                await asyncio.sleep(3600)
        finally:
            await server.stop(runner)

    asyncio.run(_main())
