"""HTTP and live-channel face of the laboratory.

Every non-login endpoint requires a bearer token; failures come back as
`{"error": {"code": ..., "message": ...}}` with the message localized from
the Accept-Language header. The live channel at /ws speaks the JSON frame
protocol of docs/protocol.md and defers all state changes to the classroom
hub, so HTTP and live access share one permission model.
"""

from __future__ import annotations

import asyncio
import contextlib
import logging
import threading
from pathlib import Path

from fastapi import Depends, FastAPI, Query, Request, Response, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import classroom as proto
from .classroom import ClassroomHub, GrantMode, Rejection
from .config import ServerConfig
from .lang import ParseError, parse
from .localization import CatalogSet, pick_locale
from .repository import (
    InvalidRequest,
    ParseRejected,
    Perm,
    RepositoryError,
    RepositoryStore,
    Role,
    User,
)
from .soundness import ProbeConfig, explain, probe, report_as_dict

logger = logging.getLogger(__name__)

_STATUS = {
    "auth": 401,
    "auth_failed": 401,
    "forbidden": 403,
    "unknown_record": 404,
    "unknown_group": 404,
    "unknown_user": 404,
    "unknown_session": 404,
    "unknown_member": 404,
    "duplicate_login": 409,
    "parse_rejected": 422,
    "invalid_request": 422,
    "protocol": 422,
}


class ApiError(Exception):
    def __init__(self, code: str, detail: str | None = None):
        super().__init__(code)
        self.code = code
        self.detail = detail


class LoginBody(BaseModel):
    login: str
    password: str


class PutRecordBody(BaseModel):
    title: str
    body: str
    perm: str | None = None
    group: str | None = None


class ValidateBody(BaseModel):
    source: str
    samples: int = Field(default=1000, ge=1, le=100_000)
    seed: int = Field(default=0, ge=0)


class CreateUserBody(BaseModel):
    login_name: str
    display_name: str
    role: str
    password: str


class GroupBody(BaseModel):
    name: str
    members: list[str] = Field(default_factory=list)


class UpdateGroupBody(BaseModel):
    name: str | None = None
    members: list[str] | None = None


def _record_info_json(row) -> dict:
    return {
        "record_id": row.record_id,
        "title": row.title,
        "owner": row.owner,
        "flags": row.flags,
        "is_scrapbook": row.is_scrapbook,
        "legacy_level": row.legacy_level,
        "modified": row.modified,
    }


def _record_json(rec) -> dict:
    return {
        "record_id": rec.record_id,
        "owner": rec.owner,
        "group": rec.group,
        "perm": rec.perm.to_string(),
        "legacy_level": rec.legacy_level,
        "title": rec.title,
        "body": rec.body,
        "is_scrapbook": rec.is_scrapbook,
        "created": rec.created,
        "modified": rec.modified,
    }


def _user_json(user: User) -> dict:
    return {
        "user_id": user.user_id,
        "login_name": user.login_name,
        "display_name": user.display_name,
        "role": user.role.value,
    }


def create_app(
    config: ServerConfig,
    repo: RepositoryStore | None = None,
    hub: ClassroomHub | None = None,
) -> FastAPI:
    repo = repo or RepositoryStore(config.data_dir, token_ttl=config.token_ttl)
    hub = hub or ClassroomHub(repo)
    catalogs = CatalogSet(config.default_locale)
    if config.locale_dir is not None and Path(config.locale_dir).is_dir():
        catalogs.load_dir(Path(config.locale_dir))
    packaged = Path(__file__).parent / "locales"
    if packaged.is_dir():
        catalogs.load_dir(packaged)

    snapshot_stop = threading.Event()

    def snapshot_loop():
        while not snapshot_stop.wait(config.session_snapshot_interval):
            try:
                hub.snapshot_all()
            except Exception:
                logger.exception("session snapshot failed")

    @contextlib.asynccontextmanager
    async def lifespan(_: FastAPI):
        thread = threading.Thread(target=snapshot_loop, daemon=True, name="session-snapshots")
        thread.start()
        logger.info("ready: data_dir=%s", repo.data_dir)
        try:
            yield
        finally:
            snapshot_stop.set()
            thread.join(timeout=2.0)
            hub.snapshot_all()

    app = FastAPI(title="wgl", lifespan=lifespan)
    app.state.repo = repo
    app.state.hub = hub
    app.state.catalogs = catalogs

    def fail(code: str, request: Request, detail: str | None = None) -> JSONResponse:
        message = catalogs.localize(
            pick_locale(request.headers.get("accept-language")), f"error.{code}"
        )
        if detail:
            message = f"{message}: {detail}"
        return JSONResponse(
            status_code=_STATUS.get(code, 400),
            content={"error": {"code": code, "message": message}},
        )

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return fail(exc.code, request, exc.detail)

    @app.exception_handler(RepositoryError)
    async def _repo_error(request: Request, exc: RepositoryError):
        detail = None
        if isinstance(exc, ParseRejected):
            cause = exc.cause
            detail = f"{cause.kind.value} at {cause.line}:{cause.column}"
        elif isinstance(exc, InvalidRequest):
            detail = str(exc)
        return fail(exc.code, request, detail)

    @app.exception_handler(proto.ProtocolError)
    async def _proto_error(request: Request, exc: proto.ProtocolError):
        return fail(exc.code, request)

    def current_user(request: Request) -> User:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise ApiError("auth")
        user = repo.introspect(header[7:].strip())
        if user is None:
            raise ApiError("auth")
        return user

    # ---- auth ----------------------------------------------------------

    @app.post("/api/login")
    def login(body: LoginBody):
        token = repo.authenticate(body.login, body.password)
        user = repo.users[token.user_id]
        return {
            "token": token.token,
            "expires_at": token.expires_at,
            "user": _user_json(user),
        }

    # ---- records ---------------------------------------------------------

    @app.get("/api/constructions")
    def list_constructions(user: User = Depends(current_user)):
        return {"records": [_record_info_json(r) for r in repo.list_visible(user)]}

    @app.get("/api/constructions/{record_id}")
    def get_construction(record_id: str, user: User = Depends(current_user)):
        return _record_json(repo.get_construction(user, record_id))

    def _parse_perm(text: str | None) -> Perm | None:
        if not text:
            return None
        try:
            return Perm.from_string(text)
        except ValueError as exc:
            raise ApiError("invalid_request", str(exc)) from None

    @app.post("/api/constructions", status_code=201)
    def create_construction(body: PutRecordBody, user: User = Depends(current_user)):
        rec = repo.put_construction(
            user, title=body.title, body=body.body, perm=_parse_perm(body.perm), group=body.group
        )
        return _record_json(rec)

    @app.put("/api/constructions/{record_id}")
    def update_construction(
        record_id: str, body: PutRecordBody, user: User = Depends(current_user)
    ):
        rec = repo.put_construction(
            user,
            record_id,
            title=body.title,
            body=body.body,
            perm=_parse_perm(body.perm),
            group=body.group,
        )
        return _record_json(rec)

    # ---- validation --------------------------------------------------------

    @app.post("/api/validate")
    def validate_construction(body: ValidateBody, user: User = Depends(current_user)):
        try:
            construction = parse(body.source)
        except ParseError as exc:
            raise ApiError(
                "parse_rejected", f"{exc.kind.value} at {exc.line}:{exc.column}"
            ) from exc
        report = probe(construction, ProbeConfig(samples=body.samples, seed=body.seed))
        payload = report_as_dict(report)
        payload["explanation"] = explain(report, construction)
        return payload

    # ---- scrapbooks ----------------------------------------------------------

    @app.get("/api/scrapbook")
    def own_scrapbook(user: User = Depends(current_user)):
        return {"records": [_record_info_json(r) for r in repo.scrapbook(user)]}

    @app.get("/api/scrapbook/{student_id}")
    def student_scrapbook(student_id: str, user: User = Depends(current_user)):
        return {"records": [_record_info_json(r) for r in repo.scrapbook(user, student_id)]}

    # ---- users & groups --------------------------------------------------------

    @app.post("/api/users", status_code=201)
    def create_user(body: CreateUserBody, user: User = Depends(current_user)):
        try:
            role = Role(body.role)
        except ValueError:
            raise ApiError("invalid_request", f"unknown role {body.role!r}") from None
        created = repo.create_user(user, body.login_name, body.display_name, role, body.password)
        return _user_json(created)

    @app.get("/api/users")
    def list_students(user: User = Depends(current_user)):
        if user.role is Role.TEACHER:
            return {"users": [_user_json(u) for u in repo.students_of(user)]}
        if user.role is Role.ADMIN:
            teachers = sorted(
                (u for u in repo.users.values() if u.role is Role.TEACHER),
                key=lambda u: u.login_name,
            )
            return {"users": [_user_json(u) for u in teachers]}
        raise ApiError("forbidden")

    @app.post("/api/groups", status_code=201)
    def create_group(body: GroupBody, user: User = Depends(current_user)):
        group = repo.create_group(user, body.name, body.members)
        return {"group_id": group.group_id, "name": group.name, "members": sorted(group.members)}

    @app.put("/api/groups/{group_id}")
    def update_group(group_id: str, body: UpdateGroupBody, user: User = Depends(current_user)):
        group = repo.update_group(user, group_id, name=body.name, members=body.members)
        return {"group_id": group.group_id, "name": group.name, "members": sorted(group.members)}

    # ---- sessions -----------------------------------------------------------------

    @app.post("/api/sessions", status_code=201)
    def create_session(user: User = Depends(current_user)):
        session = hub.create_session(user)
        return {"session_id": session.session_id}

    @app.get("/api/sessions/{session_id}")
    def session_info(session_id: str, user: User = Depends(current_user)):
        session = hub.get_session(session_id)
        if user.user_id != session.teacher and user.user_id not in session.members:
            raise ApiError("forbidden")
        return {
            "session_id": session.session_id,
            "teacher": session.teacher,
            "created": session.created,
            "members": sorted(session.members),
            "workbenches": {uid: wb.seq for uid, wb in sorted(session.workbenches.items())},
        }

    @app.delete("/api/sessions/{session_id}")
    def end_session(session_id: str, user: User = Depends(current_user)):
        hub.end_session(session_id, user)
        return Response(status_code=204)

    # ---- live channel ----------------------------------------------------------------

    @app.websocket("/ws")
    async def live_channel(
        socket: WebSocket, session: str = Query(...), token: str = Query(...)
    ):
        user = repo.introspect(token)
        if user is None:
            await socket.close(code=4401)
            return
        try:
            hub.get_session(session)
        except proto.UnknownSession:
            await socket.close(code=4404)
            return
        await socket.accept()
        try:
            hub.join(session, user)
        except proto.ProtocolError as exc:
            await socket.send_json({"t": "error", "code": exc.code, "message": str(exc)})
            await socket.close(code=4403)
            return

        loop = asyncio.get_running_loop()
        outbox: asyncio.Queue = asyncio.Queue()

        def sink(frame: dict) -> None:
            loop.call_soon_threadsafe(outbox.put_nowait, frame)

        async def writer():
            while True:
                frame = await outbox.get()
                await socket.send_json(frame)

        writer_task = asyncio.create_task(writer())
        # attach before snapshotting: anything applied in between carries a
        # seq at or below the snapshot's and clients drop those frames
        hub.attach(session, user.user_id, sink)
        live = hub.get_session(session)
        sink(
            {
                "t": "hello",
                "user_id": user.user_id,
                "role": user.role.value,
                "session": session,
                "teacher": live.teacher,
                "members": sorted(live.members),
            }
        )
        sink(hub.snapshot(session, user, user.user_id))
        try:
            while True:
                frame = await socket.receive_json()
                for out in handle_frame(hub, repo, session, user, frame):
                    sink(out)
        except WebSocketDisconnect:
            pass
        finally:
            hub.detach(session, user.user_id)
            writer_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await writer_task

    # ---- static web client --------------------------------------------------------------

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="webclient")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index():
            return (
                "<!doctype html><title>wgl</title>"
                "<h1>Geometry laboratory server</h1>"
                "<p>The API lives under <code>/api</code>; the live channel at "
                "<code>/ws</code>. Build the web client and pass --static-dir to serve it.</p>"
            )

    return app


def _reject_frame(rejection: Rejection, target: str) -> dict:
    frame = {
        "t": "reject",
        "target": target,
        "code": rejection.code,
        "message": rejection.message,
    }
    if rejection.expected_seq is not None:
        frame["expected_seq"] = rejection.expected_seq
    return frame


def handle_frame(
    hub: ClassroomHub, repo: RepositoryStore, session_id: str, user: User, frame: dict
) -> list[dict]:
    """Process one client frame; returns frames for the sender only.

    Fan-out to other members happens inside the hub. Unknown frame types get
    an error frame; unknown fields are ignored.
    """
    if not isinstance(frame, dict):
        return [{"t": "error", "code": "protocol", "message": "frames must be objects"}]
    ftype = frame.get("t")
    try:
        if ftype == "join":
            return [hub.join(session_id, user)]
        if ftype == "op":
            target = frame.get("target", user.user_id)
            try:
                op = proto.payload_to_op(frame)
                op_seq = frame["op_seq"]
                if not isinstance(op_seq, int):
                    raise ValueError("op_seq must be an integer")
            except (KeyError, ValueError) as exc:
                return [_reject_frame(Rejection("invalid_op", str(exc)), str(target))]
            result = hub.apply_op(session_id, target, user, op, op_seq)
            if isinstance(result, Rejection):
                return [_reject_frame(result, target)]
            return []  # success arrives as the fanned-out op_applied
        if ftype == "watch":
            return [hub.watch(session_id, user, frame["target"])]
        if ftype == "snapshot":
            return [hub.snapshot(session_id, user, frame.get("target", user.user_id))]
        if ftype == "broadcast":
            try:
                construction = parse(frame["body"])
            except ParseError as exc:
                return [{"t": "error", "code": "parse_rejected", "message": str(exc)}]
            count = hub.broadcast(session_id, user, construction)
            return [{"t": "broadcast", "count": count}]
        if ftype == "grant":
            hub.grant(session_id, user, frame["grantee"], GrantMode(frame.get("mode", "watch")))
            return []
        if ftype == "revoke":
            hub.revoke(session_id, user, frame["grantee"])
            return []
        if ftype == "save":
            record_id = hub.save_workbench(session_id, user, frame.get("title"))
            return [{"t": "save", "record_id": record_id}]
        if ftype == "load":
            result = hub.load_into_workbench(session_id, user, frame["record_id"])
            if isinstance(result, Rejection):
                return [_reject_frame(result, user.user_id)]
            return []
        if ftype == "bye":
            return [{"t": "bye", "session": session_id}]
        return [{"t": "error", "code": "protocol", "message": f"unknown frame type {ftype!r}"}]
    except KeyError as exc:
        return [{"t": "error", "code": "protocol", "message": f"missing field {exc}"}]
    except ValueError as exc:
        return [{"t": "error", "code": "protocol", "message": str(exc)}]
    except (proto.ProtocolError, RepositoryError) as exc:
        code = getattr(exc, "code", "protocol")
        return [{"t": "error", "code": code, "message": str(exc)}]
