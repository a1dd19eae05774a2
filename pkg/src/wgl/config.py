"""Server configuration: defaults < config file < environment < CLI flags."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

ENV_DATA_DIR = "WGL_DATA_DIR"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ServerConfig:
    port: int = 8080
    data_dir: Path = Path("wgl-data")
    locale_dir: Path | None = None
    default_locale: str = "en"
    session_snapshot_interval: float = 30.0
    token_ttl: float = 8 * 3600.0
    static_dir: Path | None = None

    def validated(self) -> "ServerConfig":
        if not 1 <= self.port <= 65535:
            raise ConfigError(f"port {self.port} out of range")
        if self.session_snapshot_interval <= 0:
            raise ConfigError("session_snapshot_interval must be positive")
        if self.token_ttl <= 0:
            raise ConfigError("token_ttl must be positive")
        return self


def parse_config_file(path: Path) -> dict[str, str]:
    """`key = value` lines, '#' comments; quotes around values are optional."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        value = value.strip().strip("\"'")
        values[key.strip()] = value
    return values


_FIELD_PARSERS = {
    "port": int,
    "data_dir": Path,
    "locale_dir": Path,
    "default_locale": str,
    "session_snapshot_interval": float,
    "token_ttl": float,
    "static_dir": Path,
}


def load_config(
    config_file: Path | None = None,
    overrides: dict[str, object] | None = None,
    env: dict[str, str] | None = None,
) -> ServerConfig:
    env = os.environ if env is None else env
    cfg = ServerConfig()
    if env.get(ENV_DATA_DIR):
        cfg = replace(cfg, data_dir=Path(env[ENV_DATA_DIR]))
    if config_file is not None:
        for key, raw in parse_config_file(config_file).items():
            parser = _FIELD_PARSERS.get(key)
            if parser is None:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                cfg = replace(cfg, **{key: parser(raw)})
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    if overrides:
        cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg.validated()
