"""Persistent store: users, groups, permissioned construction records."""

from .perms import OWNER_ONLY, PUBLISHED, Perm, PermBits, Role, perm_for_legacy_level
from .store import (
    AuthFailure,
    AuthToken,
    ConstructionRecord,
    DuplicateLogin,
    Forbidden,
    Group,
    InvalidRequest,
    ParseRejected,
    RecordInfo,
    RepositoryError,
    RepositoryStore,
    UnknownGroup,
    UnknownRecord,
    UnknownUser,
    User,
    hash_password,
    verify_password,
)

__all__ = [
    "OWNER_ONLY",
    "PUBLISHED",
    "AuthFailure",
    "AuthToken",
    "ConstructionRecord",
    "DuplicateLogin",
    "Forbidden",
    "Group",
    "InvalidRequest",
    "ParseRejected",
    "Perm",
    "PermBits",
    "RecordInfo",
    "RepositoryError",
    "RepositoryStore",
    "Role",
    "UnknownGroup",
    "UnknownRecord",
    "UnknownUser",
    "User",
    "hash_password",
    "perm_for_legacy_level",
    "verify_password",
]
