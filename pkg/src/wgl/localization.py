"""Message catalogs with English fallback.

Lookup order: requested locale, then the default locale, then the key
itself, so localize never fails and never returns an empty string.
Locale files are flat JSON maps named `<tag>.json`.
"""

from __future__ import annotations

import json
from pathlib import Path

# compiled-in base catalog
ENGLISH = {
    "login.title": "Sign in to the geometry laboratory",
    "login.name": "Login name",
    "login.password": "Password",
    "error.auth": "authentication required",
    "error.auth_failed": "unknown login or wrong password",
    "error.forbidden": "you do not have access to this",
    "error.unknown_record": "record not found",
    "error.unknown_group": "group not found",
    "error.unknown_user": "user not found",
    "error.unknown_session": "session not found",
    "error.unknown_member": "no such session member",
    "error.duplicate_login": "that login name is taken",
    "error.parse_rejected": "the construction text does not parse",
    "error.invalid_request": "invalid request",
    "error.protocol": "protocol error",
    "list.title": "Constructions",
    "list.visibility": "Access privileges",
    "scrapbook.title": "Scrapbook",
    "session.broadcast": "Broadcast to class",
    "session.watching": "Watching",
}


class CatalogSet:
    def __init__(self, default_locale: str = "en"):
        self.default_locale = default_locale
        self.catalogs: dict[str, dict[str, str]] = {"en": dict(ENGLISH)}

    def load_dir(self, locale_dir: Path) -> None:
        for path in sorted(locale_dir.glob("*.json")):
            tag = path.stem.lower()
            try:
                entries = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, ValueError):
                continue
            if isinstance(entries, dict):
                catalog = self.catalogs.setdefault(tag, {})
                catalog.update({str(k): str(v) for k, v in entries.items()})

    def localize(self, locale: str | None, key: str) -> str:
        for tag in self._chain(locale):
            entry = self.catalogs.get(tag, {}).get(key)
            if entry:
                return entry
        return key

    def _chain(self, locale: str | None) -> list[str]:
        chain = []
        if locale:
            tag = locale.lower()
            chain.append(tag)
            if "-" in tag:
                chain.append(tag.split("-", 1)[0])
        chain.append(self.default_locale)
        chain.append("en")
        return chain


def pick_locale(accept_language: str | None) -> str | None:
    """First language tag of an Accept-Language header, quality ignored."""
    if not accept_language:
        return None
    first = accept_language.split(",", 1)[0].strip()
    tag = first.split(";", 1)[0].strip()
    return tag or None
