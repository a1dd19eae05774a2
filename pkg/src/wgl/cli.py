"""Operator command line: init, serve, validate, render."""

from __future__ import annotations

import argparse
import getpass
import json
import os
import socket
import sys
from pathlib import Path

from .config import ConfigError, ENV_DATA_DIR, load_config
from .geom import EvalError, evaluate
from .lang import ParseError, parse
from .render_svg import render_svg
from .repository import RepositoryStore
from .soundness import ProbeConfig, explain, probe, report_as_dict

USAGE_EXIT = 2
ERROR_EXIT = 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgl", description="collaborative geometry laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the laboratory server")
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--data-dir", type=Path, default=None)
    serve.add_argument("--locale-dir", type=Path, default=None)
    serve.add_argument("--static-dir", type=Path, default=None)
    serve.add_argument("--config", type=Path, default=None, help="key = value config file")
    serve.add_argument("--host", default="127.0.0.1")

    init = sub.add_parser("init", help="create the data directory and seed the administrator")
    init.add_argument("--data-dir", type=Path, required=False, default=None)
    init.add_argument("--admin-login", required=True)
    init.add_argument("--admin-password", default=None, help="prompted for when omitted")

    validate = sub.add_parser("validate", help="probe a construction for degeneracy")
    validate.add_argument("file", type=Path)
    validate.add_argument("--samples", type=int, default=1000)
    validate.add_argument("--seed", type=int, default=0)

    render = sub.add_parser("render", help="evaluate a construction to an SVG drawing")
    render.add_argument("file", type=Path)
    render.add_argument("-o", "--output", type=Path, required=True)
    return parser


def _read_construction(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"wgl: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(ERROR_EXIT) from None
    try:
        return parse(text)
    except ParseError as exc:
        print(f"wgl: {path}:{exc.line}:{exc.column}: {exc.kind.value}: {exc.message}",
              file=sys.stderr)
        raise SystemExit(ERROR_EXIT) from None


def _cmd_init(args) -> int:
    data_dir = args.data_dir or _env_data_dir()
    if data_dir is None:
        print("wgl: init needs --data-dir or WGL_DATA_DIR", file=sys.stderr)
        return USAGE_EXIT
    password = args.admin_password
    if password is None:
        password = getpass.getpass(f"password for administrator {args.admin_login!r}: ")
    store = RepositoryStore(data_dir)
    if store.find_login(args.admin_login) is not None:
        print(f"wgl: login {args.admin_login!r} already exists in {data_dir}", file=sys.stderr)
        return ERROR_EXIT
    admin = store.seed_admin(args.admin_login, args.admin_login, password)
    print(f"seeded administrator {admin.login_name!r} in {data_dir}")
    return 0


def _env_data_dir() -> Path | None:
    value = os.environ.get(ENV_DATA_DIR)
    return Path(value) if value else None


def _cmd_serve(args) -> int:
    try:
        config = load_config(
            config_file=args.config,
            overrides={
                "port": args.port,
                "data_dir": args.data_dir,
                "locale_dir": args.locale_dir,
                "static_dir": args.static_dir,
            },
        )
    except ConfigError as exc:
        print(f"wgl: bad configuration: {exc}", file=sys.stderr)
        return ERROR_EXIT
    config.data_dir.mkdir(parents=True, exist_ok=True)

    # fail fast with a readable diagnostic instead of a uvicorn traceback
    probe_sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe_sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe_sock.bind((args.host, config.port))
    except OSError as exc:
        print(f"wgl: cannot listen on {args.host}:{config.port}: {exc}", file=sys.stderr)
        return ERROR_EXIT
    finally:
        probe_sock.close()

    import uvicorn

    from .server import create_app

    app = create_app(config)
    print(f"wgl: serving on http://{args.host}:{config.port} (data: {config.data_dir})")
    uvicorn.run(app, host=args.host, port=config.port, log_level="info")
    return 0


def _cmd_validate(args) -> int:
    construction = _read_construction(args.file)
    try:
        cfg = ProbeConfig(samples=args.samples, seed=args.seed)
    except ValueError as exc:
        print(f"wgl: {exc}", file=sys.stderr)
        return USAGE_EXIT
    report = probe(construction, cfg)
    payload = report_as_dict(report)
    payload["explanation"] = explain(report, construction)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_render(args) -> int:
    construction = _read_construction(args.file)
    try:
        figure = evaluate(construction)
    except EvalError as exc:
        print(
            f"wgl: {args.file}: step '{exc.failing_step}' is degenerate: {exc.message}",
            file=sys.stderr,
        )
        return ERROR_EXIT
    args.output.write_text(render_svg(construction, figure), encoding="utf-8")
    print(f"wrote {args.output}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "init": _cmd_init,
        "serve": _cmd_serve,
        "validate": _cmd_validate,
        "render": _cmd_render,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
