"""The HTTP service surface."""

from __future__ import annotations

from fastapi import FastAPI, Request, Response, UploadFile
from fastapi.responses import JSONResponse, StreamingResponse

from ..agents.profiles import PROFILE_KINDS
from ..datamodel import render_frontend
from ..store import TOOLS_AUTO, TooLarge, upload_file
from .frames import frame_to_sse
from .service import Platform


def create_app(platform: Platform) -> FastAPI:
    app = FastAPI(title="agenthost gateway", version="1")
    app.state.platform = platform

    def _session_or_404(session_id: str):
        session = platform.sessions.get(session_id)
        if session is None:
            raise _HttpError(404, f"unknown session {session_id!r}")
        return session

    class _HttpError(Exception):
        def __init__(self, status: int, detail: str):
            self.status = status
            self.detail = detail

    @app.exception_handler(_HttpError)
    async def _handle(_, exc: _HttpError):
        return JSONResponse(status_code=exc.status, content={"detail": exc.detail})

    @app.get("/healthz")
    def healthz():
        return platform.health()

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.json()
        profile = body.get("profile", "")
        if profile not in PROFILE_KINDS:
            raise _HttpError(400, f"unknown profile {profile!r}; expected one of {list(PROFILE_KINDS)}")
        session = platform.sessions.create(profile, str(body.get("user_id", "anonymous")))
        return {"session_id": session.id, "profile": profile}

    @app.post("/sessions/{session_id}/messages")
    async def post_message(session_id: str, request: Request):
        session = _session_or_404(session_id)
        body = await request.json()
        text = body.get("text", "")
        if not isinstance(text, str) or not text.strip():
            raise _HttpError(400, "text must be a non-empty string")
        if not session.turn_lock.acquire(blocking=False):
            raise _HttpError(409, "a turn is already in flight for this session")
        # the worker releases the lock when the turn finishes
        frames = platform.stream_turn(session, text)

        def sse():
            for frame in frames:
                yield frame_to_sse(frame)

        return StreamingResponse(sse(), media_type="text/event-stream")

    @app.post("/sessions/{session_id}/stop")
    def stop(session_id: str):
        session = _session_or_404(session_id)
        if session.busy:
            session.cancel.set()
            return {"stopped": True}
        return {"stopped": False}

    @app.get("/tools")
    def list_tools():
        return {
            "tools": [
                {"name": d.name, "description": d.description, "kind": d.kind, "enabled": d.enabled}
                for d in platform.registry.enabled()
            ]
        }

    @app.put("/sessions/{session_id}/tools")
    async def put_tools(session_id: str, request: Request):
        session = _session_or_404(session_id)
        body = await request.json()
        names = body.get("names") if isinstance(body, dict) else body
        if names == TOOLS_AUTO:
            session.selected_tools = TOOLS_AUTO
            return {"selected": TOOLS_AUTO}
        if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
            raise _HttpError(400, 'body must be "auto" or a list of tool names')
        unknown = [n for n in names if platform.registry.get(n) is None]
        if unknown:
            raise _HttpError(400, f"unknown tools: {unknown}")
        session.selected_tools = tuple(names)
        return {"selected": list(names)}

    @app.post("/sessions/{session_id}/files")
    async def post_file(session_id: str, file: UploadFile):
        session = _session_or_404(session_id)
        data = await file.read()
        try:
            artifact = upload_file(
                session,
                file.filename or "upload.bin",
                data,
                file.content_type or "",
                size_cap=platform.config.upload_cap,
            )
        except TooLarge as e:
            raise _HttpError(413, e.detail)
        return {"name": artifact.name, "kind": artifact.kind.value, "preview": render_frontend(artifact)}

    @app.post("/admin/reload-catalog")
    def reload_catalog():
        return {"count": platform.reload_catalog()}

    return app
