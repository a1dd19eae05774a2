"""Live classroom sessions: per-member workbenches driven by sequenced ops.

The hub is the single serialization point. Each workbench accepts op_seq
values 1, 2, 3, ... with no gaps; anything else is rejected and the client
must resynchronize from a snapshot. Every applied op fans out to the
workbench owner, the session teacher and any watchers as an `op_applied`
frame, so the recorded op log replays to a byte-identical construction.

Frame payloads are plain JSON-ready dicts in the shape documented in
docs/protocol.md.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Union

from .geom import Construction, Step, StructureError, UnknownId, move_free, referenced_ids
from .geom.construction import EMPTY
from .lang import ParseError, build_step, parse, serialize, step_args, step_keyword
from .repository import RepositoryStore, Role, User

Sink = Callable[[dict], None]


class ProtocolError(Exception):
    code = "protocol"


class Forbidden(ProtocolError):
    code = "forbidden"


class UnknownSession(ProtocolError):
    code = "unknown_session"


class UnknownMember(ProtocolError):
    code = "unknown_member"


class GrantMode(str, Enum):
    WATCH = "watch"
    EDIT = "edit"


@dataclass(frozen=True)
class AddStep:
    step: Step


@dataclass(frozen=True)
class RemoveStep:
    object_id: str


@dataclass(frozen=True)
class MoveFreePoint:
    object_id: str
    x: float
    y: float


@dataclass(frozen=True)
class ReplaceAll:
    construction: Construction


WorkbenchOp = Union[AddStep, RemoveStep, MoveFreePoint, ReplaceAll]


@dataclass(frozen=True)
class Rejection:
    code: str  # expected_seq | forbidden | invalid_op
    message: str
    expected_seq: int | None = None


@dataclass
class Workbench:
    owner: str
    construction: Construction = EMPTY
    seq: int = 0
    dirty: bool = False
    oplog: list[dict] = field(default_factory=list)


@dataclass
class Session:
    session_id: str
    teacher: str
    created: float
    members: set[str] = field(default_factory=set)
    workbenches: dict[str, Workbench] = field(default_factory=dict)
    grants: dict[tuple[str, str], GrantMode] = field(default_factory=dict)
    watches: dict[str, set[str]] = field(default_factory=dict)
    sinks: dict[str, Sink] = field(default_factory=dict)
    lock: threading.RLock = field(default_factory=threading.RLock)


# ---- op <-> frame payload -------------------------------------------------


def op_payload(op: WorkbenchOp) -> dict:
    if isinstance(op, AddStep):
        return {
            "kind": "add",
            "id": op.step.name,
            "step": step_keyword(op.step),
            "args": step_args(op.step),
        }
    if isinstance(op, RemoveStep):
        return {"kind": "remove", "id": op.object_id}
    if isinstance(op, MoveFreePoint):
        return {"kind": "move", "id": op.object_id, "x": op.x, "y": op.y}
    return {"kind": "replace", "body": serialize(op.construction)}


def payload_to_op(payload: dict) -> WorkbenchOp:
    """Parse an op payload; raises ValueError on malformed input."""
    kind = payload.get("kind")
    if kind == "add":
        return AddStep(build_step(payload["step"], payload["id"], payload["args"]))
    if kind == "remove":
        object_id = payload["id"]
        if not isinstance(object_id, str):
            raise ValueError("remove op needs a string id")
        return RemoveStep(object_id)
    if kind == "move":
        x, y = payload["x"], payload["y"]
        if not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
            raise ValueError("move op needs numeric coordinates")
        return MoveFreePoint(payload["id"], float(x), float(y))
    if kind == "replace":
        try:
            return ReplaceAll(parse(payload["body"]))
        except ParseError as exc:
            raise ValueError(f"replace body does not parse: {exc}") from exc
    raise ValueError(f"unknown op kind {kind!r}")


def apply_to_construction(construction: Construction, op: WorkbenchOp) -> Construction:
    """Pure application of one op; raises ValueError/StructureError on bad ops."""
    if isinstance(op, AddStep):
        return Construction(construction.steps + (op.step,))
    if isinstance(op, RemoveStep):
        if not construction.has(op.object_id):
            raise ValueError(f"no object named {op.object_id!r}")
        for step in construction.steps:
            if op.object_id in referenced_ids(step.kind):
                raise ValueError(
                    f"cannot remove {op.object_id!r}: step {step.name!r} depends on it"
                )
        return Construction(s for s in construction.steps if s.name != op.object_id)
    if isinstance(op, MoveFreePoint):
        return move_free(construction, op.object_id, op.x, op.y)
    return op.construction


def replay_oplog(oplog: list[dict]) -> Construction:
    """Rebuild a workbench from its recorded op log (determinism check)."""
    construction = EMPTY
    for i, entry in enumerate(oplog, start=1):
        if entry["op_seq"] != i:
            raise ValueError(f"op log has a gap at {i}")
        construction = apply_to_construction(construction, payload_to_op(entry))
    return construction


class ClassroomHub:
    """Registry of live sessions plus their repository glue."""

    def __init__(self, repo: RepositoryStore, now_fn=time.time):
        self.repo = repo
        self._now = now_fn
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    # ---- lifecycle -------------------------------------------------------

    def create_session(self, teacher: User) -> Session:
        if teacher.role is not Role.TEACHER:
            raise Forbidden("only teachers open classroom sessions")
        session = Session(
            session_id=secrets.token_hex(8), teacher=teacher.user_id, created=self._now()
        )
        session.members.add(teacher.user_id)
        session.workbenches[teacher.user_id] = Workbench(owner=teacher.user_id)
        with self._lock:
            self.sessions[session.session_id] = session
        self.repo.log_event(teacher.user_id, "session.create", session.session_id)
        return session

    def get_session(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def join(self, session_id: str, user: User) -> dict:
        """Add the user (idempotent) and return the snapshot of their workbench."""
        session = self.get_session(session_id)
        allowed = user.user_id == session.teacher or (
            user.role is Role.STUDENT and user.created_by == session.teacher
        )
        if not allowed:
            raise Forbidden("session is open to its teacher and their students")
        with session.lock:
            fresh = user.user_id not in session.members
            session.members.add(user.user_id)
            if user.user_id not in session.workbenches:
                session.workbenches[user.user_id] = Workbench(owner=user.user_id)
            if fresh:
                self._fanout_all(session, {"t": "join", "user_id": user.user_id})
            snapshot = self._snapshot_frame(session, user.user_id)
        self.repo.log_event(user.user_id, "session.join", session_id)
        return snapshot

    def attach(self, session_id: str, user_id: str, sink: Sink) -> None:
        """Register the live connection for a member (latest one wins)."""
        session = self.get_session(session_id)
        with session.lock:
            if user_id not in session.members:
                raise UnknownMember(user_id)
            session.sinks[user_id] = sink

    def detach(self, session_id: str, user_id: str) -> None:
        session = self.sessions.get(session_id)
        if session is None:
            return
        with session.lock:
            session.sinks.pop(user_id, None)

    def end_session(self, session_id: str, actor: User) -> None:
        session = self.get_session(session_id)
        if actor.user_id != session.teacher:
            raise Forbidden("only the session teacher ends the session")
        with session.lock:
            self.snapshot_session(session)
            self._fanout_all(session, {"t": "bye", "session": session_id})
            session.sinks.clear()
        with self._lock:
            self.sessions.pop(session_id, None)
        self.repo.log_event(actor.user_id, "session.end", session_id)

    # ---- ops ---------------------------------------------------------------

    def apply_op(
        self,
        session_id: str,
        target_owner: str,
        author: User,
        op: WorkbenchOp,
        op_seq: int,
    ) -> int | Rejection:
        """Apply one sequenced op to a member workbench; returns the new seq."""
        session = self.get_session(session_id)
        with session.lock:
            wb = session.workbenches.get(target_owner)
            if wb is None:
                return Rejection("forbidden", f"no workbench for {target_owner!r}")
            if not self._can_edit(session, author.user_id, target_owner):
                return Rejection("forbidden", "no edit access to this workbench")
            if op_seq != wb.seq + 1:
                return Rejection(
                    "expected_seq",
                    f"expected op_seq {wb.seq + 1}, got {op_seq}",
                    expected_seq=wb.seq + 1,
                )
            try:
                new_construction = apply_to_construction(wb.construction, op)
            except (ValueError, StructureError, UnknownId) as exc:
                return Rejection("invalid_op", str(exc))
            wb.construction = new_construction
            wb.seq = op_seq
            # loads and broadcasts reset this themselves after applying
            wb.dirty = True
            entry = dict(op_payload(op), op_seq=op_seq, author=author.user_id)
            wb.oplog.append(entry)
            self._fanout_op(session, target_owner, entry)
            return wb.seq

    def _fanout_op(self, session: Session, target_owner: str, entry: dict) -> None:
        frame = dict(entry, t="op_applied", target=target_owner)
        for uid in self._op_audience(session, target_owner):
            sink = session.sinks.get(uid)
            if sink is not None:
                sink(frame)

    def _op_audience(self, session: Session, target_owner: str) -> list[str]:
        audience = {target_owner, session.teacher}
        audience.update(session.watches.get(target_owner, ()))
        return sorted(audience)

    def _fanout_all(self, session: Session, frame: dict) -> None:
        for uid in sorted(session.sinks):
            session.sinks[uid](frame)

    def _can_edit(self, session: Session, author_id: str, target_owner: str) -> bool:
        if author_id == target_owner or author_id == session.teacher:
            return True
        return session.grants.get((target_owner, author_id)) is GrantMode.EDIT

    def _can_watch(self, session: Session, watcher_id: str, target_owner: str) -> bool:
        if watcher_id == target_owner or watcher_id == session.teacher:
            return True
        return session.grants.get((target_owner, watcher_id)) in (
            GrantMode.WATCH,
            GrantMode.EDIT,
        )

    # ---- watching & grants -------------------------------------------------

    def _snapshot_frame(self, session: Session, owner: str) -> dict:
        wb = session.workbenches[owner]
        return {
            "t": "snapshot",
            "target": owner,
            "seq": wb.seq,
            "body": serialize(wb.construction),
            "dirty": wb.dirty,
        }

    def snapshot(self, session_id: str, requester: User, target_owner: str) -> dict:
        """Current state of a workbench the requester may see."""
        session = self.get_session(session_id)
        with session.lock:
            if target_owner not in session.workbenches:
                raise UnknownMember(target_owner)
            if not self._can_watch(session, requester.user_id, target_owner):
                raise Forbidden("no watch access to this workbench")
            return self._snapshot_frame(session, target_owner)

    def watch(self, session_id: str, watcher: User, target_owner: str) -> dict:
        """Snapshot plus subscription to every later op on that workbench.

        Registration happens under the session lock, so the event stream
        continues gaplessly from the returned snapshot's seq.
        """
        session = self.get_session(session_id)
        with session.lock:
            if target_owner not in session.workbenches:
                raise UnknownMember(target_owner)
            if not self._can_watch(session, watcher.user_id, target_owner):
                raise Forbidden("no watch access to this workbench")
            session.watches.setdefault(target_owner, set()).add(watcher.user_id)
            return self._snapshot_frame(session, target_owner)

    def unwatch(self, session_id: str, watcher: User, target_owner: str) -> None:
        session = self.get_session(session_id)
        with session.lock:
            session.watches.get(target_owner, set()).discard(watcher.user_id)

    def grant(
        self, session_id: str, grantor: User, grantee_id: str, mode: GrantMode
    ) -> None:
        session = self.get_session(session_id)
        with session.lock:
            if grantee_id not in session.members:
                raise UnknownMember(grantee_id)
            if grantee_id == grantor.user_id:
                raise Forbidden("cannot grant access to yourself")
            if grantor.user_id not in session.workbenches:
                raise Forbidden("grantor has no workbench in this session")
            session.grants[(grantor.user_id, grantee_id)] = mode
            frame = {
                "t": "grant",
                "grantor": grantor.user_id,
                "grantee": grantee_id,
                "mode": mode.value,
            }
            for uid in (grantor.user_id, grantee_id):
                sink = session.sinks.get(uid)
                if sink is not None:
                    sink(frame)

    def revoke(self, session_id: str, grantor: User, grantee_id: str) -> None:
        session = self.get_session(session_id)
        with session.lock:
            session.grants.pop((grantor.user_id, grantee_id), None)
            # revoked watchers stop receiving the stream (the teacher never does)
            if grantee_id != session.teacher:
                session.watches.get(grantor.user_id, set()).discard(grantee_id)
            frame = {"t": "revoke", "grantor": grantor.user_id, "grantee": grantee_id}
            for uid in (grantor.user_id, grantee_id):
                sink = session.sinks.get(uid)
                if sink is not None:
                    sink(frame)

    # ---- broadcast & persistence --------------------------------------------

    def broadcast(self, session_id: str, teacher: User, construction: Construction) -> int:
        """Replace every member workbench; dirty student work is saved first."""
        if teacher.user_id != self.get_session(session_id).teacher:
            raise Forbidden("only the session teacher broadcasts")
        session = self.get_session(session_id)
        count = 0
        with session.lock:
            for owner in sorted(session.members):
                wb = session.workbenches[owner]
                owner_user = self.repo.users.get(owner)
                if (
                    wb.dirty
                    and owner_user is not None
                    and owner_user.role is Role.STUDENT
                ):
                    self._save(session, wb, owner_user, title="auto-saved before broadcast")
                result = self.apply_op(
                    session_id, owner, teacher, ReplaceAll(construction), wb.seq + 1
                )
                assert isinstance(result, int)
                wb.dirty = False
                count += 1
        self.repo.log_event(teacher.user_id, "session.broadcast", session_id)
        return count

    def _save(self, session: Session, wb: Workbench, owner_user: User, title: str) -> str:
        record = self.repo.put_construction(
            owner_user, title=title, body=serialize(wb.construction)
        )
        wb.dirty = False
        self.repo.log_event(owner_user.user_id, "workbench.save", record.record_id)
        return record.record_id

    def save_workbench(self, session_id: str, owner: User, title: str | None = None) -> str:
        """Persist the workbench through the repository (students: scrapbook).

        The repository write happens outside the session lock so saving one
        workbench never pauses op processing for the others; the dirty flag
        is only cleared if no op slipped in while the write ran.
        """
        session = self.get_session(session_id)
        with session.lock:
            wb = session.workbenches.get(owner.user_id)
            if wb is None:
                raise UnknownMember(owner.user_id)
            body = serialize(wb.construction)
            seq_at_save = wb.seq
        record = self.repo.put_construction(owner, title=title or "workbench", body=body)
        with session.lock:
            if wb.seq == seq_at_save:
                wb.dirty = False
        self.repo.log_event(owner.user_id, "workbench.save", record.record_id)
        return record.record_id

    def load_into_workbench(self, session_id: str, owner: User, record_id: str) -> int | Rejection:
        """Replace the workbench with a stored record, via the normal op path."""
        session = self.get_session(session_id)
        with session.lock:
            wb = session.workbenches.get(owner.user_id)
            if wb is None:
                raise UnknownMember(owner.user_id)
            record = self.repo.get_construction(owner, record_id)  # read check
            construction = parse(record.body)
            result = self.apply_op(
                session_id, owner.user_id, owner, ReplaceAll(construction), wb.seq + 1
            )
            if isinstance(result, int):
                wb.dirty = False
                self.repo.log_event(owner.user_id, "workbench.load", record_id)
            return result

    # ---- crash-recovery snapshots --------------------------------------------

    def snapshot_session(self, session: Session) -> Path:
        sessions_dir = self.repo.data_dir / "sessions"
        sessions_dir.mkdir(exist_ok=True)
        with session.lock:
            data = {
                "session_id": session.session_id,
                "teacher": session.teacher,
                "created": session.created,
                "members": sorted(session.members),
                "grants": [
                    {"grantor": g, "grantee": e, "mode": m.value}
                    for (g, e), m in sorted(session.grants.items())
                ],
                "workbenches": {
                    uid: {
                        "seq": wb.seq,
                        "dirty": wb.dirty,
                        "body": serialize(wb.construction),
                    }
                    for uid, wb in sorted(session.workbenches.items())
                },
            }
        path = sessions_dir / f"{session.session_id}.json"
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        tmp.replace(path)
        return path

    def snapshot_all(self) -> None:
        for session in list(self.sessions.values()):
            self.snapshot_session(session)

    def restore_sessions(self) -> int:
        """Best-effort reload of snapshotted sessions (op logs do not survive)."""
        sessions_dir = self.repo.data_dir / "sessions"
        if not sessions_dir.is_dir():
            return 0
        restored = 0
        for path in sorted(sessions_dir.glob("*.json")):
            try:
                data = json.loads(path.read_text(encoding="utf-8"))
                session = Session(
                    session_id=data["session_id"],
                    teacher=data["teacher"],
                    created=data["created"],
                    members=set(data["members"]),
                )
                for uid, wb in data["workbenches"].items():
                    session.workbenches[uid] = Workbench(
                        owner=uid,
                        construction=parse(wb["body"]),
                        seq=wb["seq"],
                        dirty=wb["dirty"],
                    )
                for grant in data["grants"]:
                    session.grants[(grant["grantor"], grant["grantee"])] = GrantMode(
                        grant["mode"]
                    )
            except (KeyError, ValueError, OSError, ParseError):
                continue
            with self._lock:
                self.sessions[session.session_id] = session
            restored += 1
        return restored
