"""File-backed repository of users, groups and construction records.

Layout under one data directory:

    users.json                  all users keyed by id
    groups.json                 all groups keyed by id
    records/<id>.wgl            canonical construction text
    records/<id>.meta.json      everything else about the record
    events.log                  one JSON object per line, append-only

Every write goes to a temp file in the same directory and is renamed into
place, so a crash never leaves a half-written file. All mutations are
serialized through one lock; reads work off the in-memory state.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import logging
import os
import secrets
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path

from ..lang import ParseError, parse, serialize
from .perms import OWNER_ONLY, Perm, Role, perm_for_legacy_level

logger = logging.getLogger(__name__)

MAX_TITLE = 128
# interactive-login scrypt cost; recorded next to every hash so it can be
# raised later without invalidating old hashes
SCRYPT_PARAMS = (16384, 8, 1)
_SCRYPT_MAXMEM = 64 * 1024 * 1024


class RepositoryError(Exception):
    code = "repository"


class Forbidden(RepositoryError):
    code = "forbidden"


class AuthFailure(RepositoryError):
    code = "auth_failed"


class DuplicateLogin(RepositoryError):
    code = "duplicate_login"


class UnknownRecord(RepositoryError):
    code = "unknown_record"


class UnknownGroup(RepositoryError):
    code = "unknown_group"


class UnknownUser(RepositoryError):
    code = "unknown_user"


class ParseRejected(RepositoryError):
    code = "parse_rejected"

    def __init__(self, cause: ParseError):
        super().__init__(str(cause))
        self.cause = cause


class InvalidRequest(RepositoryError):
    code = "invalid_request"


@dataclass(frozen=True)
class User:
    user_id: str
    login_name: str
    display_name: str
    role: Role
    pass_hash: str
    created_by: str


@dataclass(frozen=True)
class Group:
    group_id: str
    name: str
    owner: str
    members: frozenset[str]


@dataclass(frozen=True)
class ConstructionRecord:
    record_id: str
    owner: str
    group: str | None
    perm: Perm
    legacy_level: int | None
    title: str
    body: str
    is_scrapbook: bool
    created: str
    modified: str


@dataclass(frozen=True)
class RecordInfo:
    """Listing row: no body, just what the construction list shows."""

    record_id: str
    title: str
    owner: str
    flags: str
    is_scrapbook: bool
    legacy_level: int | None
    modified: str


@dataclass(frozen=True)
class AuthToken:
    token: str
    user_id: str
    role: Role
    expires_at: float


def _rfc3339(epoch: float) -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(int(epoch)))


def hash_password(password: str, params: tuple[int, int, int] = SCRYPT_PARAMS) -> str:
    n, r, p = params
    salt = secrets.token_bytes(16)
    digest = hashlib.scrypt(
        password.encode("utf-8"), salt=salt, n=n, r=r, p=p, dklen=32, maxmem=_SCRYPT_MAXMEM
    )
    return f"scrypt${n}${r}${p}${salt.hex()}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, n, r, p, salt_hex, digest_hex = stored.split("$")
        if scheme != "scrypt":
            return False
        digest = hashlib.scrypt(
            password.encode("utf-8"),
            salt=bytes.fromhex(salt_hex),
            n=int(n),
            r=int(r),
            p=int(p),
            dklen=32,
            maxmem=_SCRYPT_MAXMEM,
        )
        return hmac.compare_digest(digest.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


class RepositoryStore:
    """Single-writer persistent store; safe to share across request handlers."""

    def __init__(
        self,
        data_dir: str | Path,
        *,
        scrypt_params: tuple[int, int, int] = SCRYPT_PARAMS,
        token_ttl: float = 8 * 3600.0,
        now_fn=time.time,
    ):
        self.data_dir = Path(data_dir)
        self.records_dir = self.data_dir / "records"
        self._scrypt_params = scrypt_params
        self._token_ttl = token_ttl
        self._now = now_fn
        self._lock = threading.Lock()
        self.users: dict[str, User] = {}
        self.groups: dict[str, Group] = {}
        self.records: dict[str, ConstructionRecord] = {}
        self._tokens: dict[str, AuthToken] = {}
        # equalizes timing between unknown-login and wrong-password failures
        self._dummy_hash = hash_password("*", scrypt_params)
        self._init_layout()
        self._load()

    # ---- layout & persistence -------------------------------------------

    def _init_layout(self) -> None:
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.records_dir.mkdir(exist_ok=True)
        if not (self.data_dir / "users.json").exists():
            _atomic_write(self.data_dir / "users.json", _dump_json({"users": {}}))
        if not (self.data_dir / "groups.json").exists():
            _atomic_write(self.data_dir / "groups.json", _dump_json({"groups": {}}))
        (self.data_dir / "events.log").touch(exist_ok=True)

    def _load(self) -> None:
        raw = json.loads((self.data_dir / "users.json").read_text(encoding="utf-8"))
        for uid, u in raw.get("users", {}).items():
            self.users[uid] = User(
                user_id=uid,
                login_name=u["login_name"],
                display_name=u["display_name"],
                role=Role(u["role"]),
                pass_hash=u["pass_hash"],
                created_by=u["created_by"],
            )
        raw = json.loads((self.data_dir / "groups.json").read_text(encoding="utf-8"))
        for gid, g in raw.get("groups", {}).items():
            self.groups[gid] = Group(gid, g["name"], g["owner"], frozenset(g["members"]))
        for meta_path in sorted(self.records_dir.glob("*.meta.json")):
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            rid = meta["record_id"]
            body = (self.records_dir / f"{rid}.wgl").read_text(encoding="utf-8")
            self.records[rid] = ConstructionRecord(
                record_id=rid,
                owner=meta["owner"],
                group=meta["group"],
                perm=Perm.from_string(meta["perm"]),
                legacy_level=meta["legacy_level"],
                title=meta["title"],
                body=body,
                is_scrapbook=meta["is_scrapbook"],
                created=meta["created"],
                modified=meta["modified"],
            )

    def _save_users(self) -> None:
        data = {
            "users": {
                uid: {
                    "login_name": u.login_name,
                    "display_name": u.display_name,
                    "role": u.role.value,
                    "pass_hash": u.pass_hash,
                    "created_by": u.created_by,
                }
                for uid, u in self.users.items()
            }
        }
        _atomic_write(self.data_dir / "users.json", _dump_json(data))

    def _save_groups(self) -> None:
        data = {
            "groups": {
                gid: {"name": g.name, "owner": g.owner, "members": sorted(g.members)}
                for gid, g in self.groups.items()
            }
        }
        _atomic_write(self.data_dir / "groups.json", _dump_json(data))

    def _save_record(self, rec: ConstructionRecord) -> None:
        meta = {
            "record_id": rec.record_id,
            "owner": rec.owner,
            "group": rec.group,
            "perm": rec.perm.to_string(),
            "legacy_level": rec.legacy_level,
            "title": rec.title,
            "is_scrapbook": rec.is_scrapbook,
            "created": rec.created,
            "modified": rec.modified,
        }
        _atomic_write(self.records_dir / f"{rec.record_id}.wgl", rec.body)
        _atomic_write(self.records_dir / f"{rec.record_id}.meta.json", _dump_json(meta))

    # ---- event log -------------------------------------------------------

    def log_event(self, actor: str, action: str, subject: str) -> None:
        """Append-only audit line; a logging failure never fails the caller."""
        entry = {
            "ts": _rfc3339(self._now()),
            "actor": actor,
            "action": action,
            "subject": subject,
        }
        try:
            with open(self.data_dir / "events.log", "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")
        except OSError:
            logger.warning("event log write failed", exc_info=True)

    def read_events(self) -> list[dict]:
        out = []
        for line in (self.data_dir / "events.log").read_text(encoding="utf-8").splitlines():
            if line.strip():
                out.append(json.loads(line))
        return out

    # ---- users & auth ----------------------------------------------------

    def seed_admin(self, login_name: str, display_name: str, password: str) -> User:
        """Install-time creation of an administrator account."""
        return self._add_user(login_name, display_name, Role.ADMIN, password, created_by="install")

    def create_user(
        self, actor: User, login_name: str, display_name: str, role: Role, password: str
    ) -> User:
        if role is Role.ADMIN:
            raise Forbidden("administrators are seeded at install time")
        if role is Role.TEACHER and actor.role is not Role.ADMIN:
            raise Forbidden("only administrators create teachers")
        if role is Role.STUDENT and actor.role is not Role.TEACHER:
            raise Forbidden("only teachers create students")
        user = self._add_user(login_name, display_name, role, password, created_by=actor.user_id)
        self.log_event(actor.user_id, "user.create", user.user_id)
        return user

    def _add_user(
        self, login_name: str, display_name: str, role: Role, password: str, created_by: str
    ) -> User:
        if not (3 <= len(login_name) <= 32):
            raise InvalidRequest("login name must be 3-32 characters")
        with self._lock:
            if any(u.login_name == login_name for u in self.users.values()):
                raise DuplicateLogin(f"login {login_name!r} already exists")
            user = User(
                user_id=secrets.token_hex(8),
                login_name=login_name,
                display_name=display_name,
                role=role,
                pass_hash=hash_password(password, self._scrypt_params),
                created_by=created_by,
            )
            self.users[user.user_id] = user
            self._save_users()
        return user

    def find_login(self, login_name: str) -> User | None:
        for u in self.users.values():
            if u.login_name == login_name:
                return u
        return None

    def authenticate(self, login_name: str, password: str) -> AuthToken:
        """Constant-time-ish check; unknown logins burn the same hash work."""
        user = self.find_login(login_name)
        stored = user.pass_hash if user else self._dummy_hash
        ok = verify_password(password, stored)
        if user is None or not ok:
            raise AuthFailure("unknown login or wrong password")
        token = AuthToken(
            token=secrets.token_hex(16),
            user_id=user.user_id,
            role=user.role,
            expires_at=self._now() + self._token_ttl,
        )
        with self._lock:
            self._tokens[token.token] = token
        self.log_event(user.user_id, "auth.login", user.user_id)
        return token

    def introspect(self, token: str) -> User | None:
        info = self._tokens.get(token)
        if info is None or info.expires_at <= self._now():
            return None
        return self.users.get(info.user_id)

    def revoke_token(self, token: str) -> None:
        with self._lock:
            self._tokens.pop(token, None)

    def students_of(self, teacher: User) -> list[User]:
        return sorted(
            (u for u in self.users.values()
             if u.role is Role.STUDENT and u.created_by == teacher.user_id),
            key=lambda u: u.login_name,
        )

    # ---- groups ------------------------------------------------------------

    def create_group(self, actor: User, name: str, members: list[str]) -> Group:
        if actor.role is not Role.TEACHER:
            raise Forbidden("only teachers define groups")
        self._check_members(actor, members)
        with self._lock:
            group = Group(secrets.token_hex(8), name, actor.user_id, frozenset(members))
            self.groups[group.group_id] = group
            self._save_groups()
        self.log_event(actor.user_id, "group.create", group.group_id)
        return group

    def update_group(
        self, actor: User, group_id: str, name: str | None = None, members: list[str] | None = None
    ) -> Group:
        group = self.groups.get(group_id)
        if group is None:
            raise UnknownGroup(group_id)
        if actor.user_id != group.owner:
            raise Forbidden("only the owning teacher edits a group")
        if members is not None:
            self._check_members(actor, members)
        with self._lock:
            group = Group(
                group_id,
                name if name is not None else group.name,
                group.owner,
                frozenset(members) if members is not None else group.members,
            )
            self.groups[group_id] = group
            self._save_groups()
        self.log_event(actor.user_id, "group.update", group_id)
        return group

    def _check_members(self, teacher: User, members: list[str]) -> None:
        for uid in members:
            member = self.users.get(uid)
            if member is None:
                raise UnknownUser(uid)
            if member.role is not Role.STUDENT or member.created_by != teacher.user_id:
                raise InvalidRequest("group members must be the teacher's own students")

    # ---- records -----------------------------------------------------------

    def _access(self, actor: User, rec: ConstructionRecord) -> tuple[bool, bool, bool]:
        """(visible, readable, writable) of rec for actor."""
        if actor.user_id == rec.owner:
            return True, True, True
        perm = rec.perm
        in_group = False
        if rec.group is not None:
            g = self.groups.get(rec.group)
            in_group = g is not None and actor.user_id in g.members
        owner_user = self.users.get(rec.owner)
        teacher_scrapbook = (
            actor.role is Role.TEACHER
            and rec.is_scrapbook
            and owner_user is not None
            and owner_user.created_by == actor.user_id
        )
        visible = (in_group and perm.group.visible) or perm.other.visible or teacher_scrapbook
        readable = (in_group and perm.group.read) or perm.other.read or teacher_scrapbook
        writable = (in_group and perm.group.write) or perm.other.write
        return visible, readable, writable

    def put_construction(
        self,
        actor: User,
        record_id: str | None = None,
        *,
        title: str,
        body: str,
        perm: Perm | None = None,
        group: str | None = None,
    ) -> ConstructionRecord:
        if len(title) > MAX_TITLE:
            raise InvalidRequest("title exceeds 128 characters")
        try:
            canonical = serialize(parse(body))
        except ParseError as exc:
            raise ParseRejected(exc) from exc
        if group is not None and group not in self.groups:
            raise UnknownGroup(group)
        now = _rfc3339(self._now())
        with self._lock:
            if record_id is None:
                rec = ConstructionRecord(
                    record_id=secrets.token_hex(8),
                    owner=actor.user_id,
                    group=group,
                    perm=(perm or OWNER_ONLY).normalized(),
                    legacy_level=None,
                    title=title,
                    body=canonical,
                    is_scrapbook=actor.role is Role.STUDENT,
                    created=now,
                    modified=now,
                )
            else:
                old = self.records.get(record_id)
                if old is None:
                    raise UnknownRecord(record_id)
                _, _, writable = self._access(actor, old)
                if not writable:
                    raise Forbidden("no write permission on this record")
                if perm is not None and actor.user_id != old.owner:
                    raise Forbidden("only the owner changes permissions")
                rec = replace(
                    old,
                    title=title,
                    body=canonical,
                    perm=perm.normalized() if perm is not None else old.perm,
                    group=group if group is not None else old.group,
                    modified=now,
                )
            self.records[rec.record_id] = rec
            self._save_record(rec)
        self.log_event(actor.user_id, "record.put", rec.record_id)
        return rec

    def get_construction(self, actor: User, record_id: str) -> ConstructionRecord:
        """Load a record. Missing and invisible records fail identically."""
        rec = self.records.get(record_id)
        if rec is None:
            raise Forbidden("no such readable record")
        _, readable, _ = self._access(actor, rec)
        if not readable:
            raise Forbidden("no such readable record")
        return rec

    def list_visible(self, actor: User) -> list[RecordInfo]:
        rows = []
        for rec in self.records.values():
            visible, _, _ = self._access(actor, rec)
            if visible:
                rows.append(
                    RecordInfo(
                        record_id=rec.record_id,
                        title=rec.title,
                        owner=rec.owner,
                        flags=rec.perm.to_string(),
                        is_scrapbook=rec.is_scrapbook,
                        legacy_level=rec.legacy_level,
                        modified=rec.modified,
                    )
                )
        rows.sort(key=lambda r: (r.modified, r.record_id), reverse=True)
        return rows

    def scrapbook(self, actor: User, student_id: str | None = None) -> list[RecordInfo]:
        """Own scrapbook, or (for the student's teacher) a student's scrapbook."""
        if student_id is None:
            owner = actor
        else:
            owner = self.users.get(student_id)
            if owner is None:
                raise UnknownUser(student_id)
            if actor.role is not Role.TEACHER or owner.created_by != actor.user_id:
                raise Forbidden("only the student's teacher reads their scrapbook")
        return [
            row
            for row in self.list_visible(actor)
            if row.is_scrapbook and row.owner == owner.user_id
        ]

    def set_perm(
        self, actor: User, record_id: str, perm: Perm, group: str | None = None
    ) -> ConstructionRecord:
        rec = self.records.get(record_id)
        if rec is None:
            raise UnknownRecord(record_id)
        if actor.user_id != rec.owner:
            raise Forbidden("only the owner changes permissions")
        if group is not None and group not in self.groups:
            raise UnknownGroup(group)
        with self._lock:
            rec = replace(
                rec,
                perm=perm.normalized(),
                group=group if group is not None else rec.group,
                modified=_rfc3339(self._now()),
            )
            self.records[record_id] = rec
            self._save_record(rec)
        self.log_event(actor.user_id, "perm.set", record_id)
        return rec

    def import_legacy_level(self, record_id: str, level: int) -> Perm:
        """Translate the old scalar level attribute into permission bits."""
        rec = self.records.get(record_id)
        if rec is None:
            raise UnknownRecord(record_id)
        perm = perm_for_legacy_level(level).normalized()
        with self._lock:
            rec = replace(rec, perm=perm, legacy_level=level)
            self.records[record_id] = rec
            self._save_record(rec)
        self.log_event(rec.owner, "legacy.import", record_id)
        return perm

    def delete_construction(self, actor: User, record_id: str) -> None:
        rec = self.records.get(record_id)
        if rec is None:
            raise Forbidden("no such readable record")
        if actor.user_id != rec.owner:
            raise Forbidden("only the owner deletes a record")
        with self._lock:
            del self.records[record_id]
            for suffix in (".wgl", ".meta.json"):
                try:
                    (self.records_dir / f"{record_id}{suffix}").unlink()
                except FileNotFoundError:
                    pass
        self.log_event(actor.user_id, "record.delete", record_id)
