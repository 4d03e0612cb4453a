"""Thin command-line client for the rydchain service.

Commands marshal requests to the HTTP API: against a remote server when
`--server` (or RYDCHAIN_SERVER) is given, otherwise against the bundled
FastAPI app over an in-process ASGI transport. File writing happens on the
client side; the manifest is written last, atomically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import httpx

from . import __version__
from .errors import ParseError, RydchainError
from .runner import _env_threads, parse_config


def _fail(message: str) -> int:
    print(json.dumps({"error": message}), file=sys.stderr)
    return 1


def _post(server: str | None, path: str, payload: dict) -> dict:
    """POST to a remote service, or to the bundled app over in-process ASGI."""
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            response = client.post(path, json=payload)
    else:
        import asyncio

        from .service.app import app

        async def _call():
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://rydchain.local", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        response = asyncio.run(_call())
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise RydchainError(f"server returned {response.status_code}: {detail}")
    return response.json()


def _write_bundle(files: list[dict], out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = None
    for item in files:
        if item["name"] == "manifest.json":
            manifest = item
            continue
        (out_dir / item["name"]).write_text(item["content"])
    if manifest is not None:
        tmp = out_dir / ".manifest.json.tmp"
        tmp.write_text(manifest["content"])
        os.replace(tmp, out_dir / "manifest.json")
    return out_dir / "manifest.json"


def _cmd_run(args) -> int:
    try:
        cfg = parse_config(args.config)
    except (ParseError, RydchainError) as exc:
        return _fail(str(exc))
    payload = {"config": cfg.raw, "seed": args.seed, "threads": args.threads or _env_threads()}
    if args.sweep_axis:
        payload["config"]["protocol"]["kind"] = "sweep"
        payload["config"]["protocol"]["sweep_axis"] = args.sweep_axis
        if args.sweep_values:
            payload["config"]["protocol"]["sweep_values"] = [
                float(v) for v in args.sweep_values.split(",")
            ]
    out_dir = Path(args.out or cfg["output"]["dir"])
    try:
        body = _post(args.server, "/api/v1/run", payload)
    except (RydchainError, httpx.HTTPError) as exc:
        return _fail(str(exc))
    manifest_path = _write_bundle(body["files"], out_dir)
    print(str(manifest_path))
    return 0


def _cmd_mitigate(args) -> int:
    try:
        payload = {
            "zz_csv": Path(args.zz).read_text(),
            "iz_csv": Path(args.iz).read_text(),
            "floor": args.floor,
        }
    except OSError as exc:
        return _fail(str(exc))
    try:
        body = _post(args.server, "/api/v1/mitigate", payload)
    except (RydchainError, httpx.HTTPError) as exc:
        return _fail(str(exc))
    out = Path(args.out) if args.out else Path("mitigated.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(body["csv"])
    print(str(out))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rydchain", description=__doc__)
    parser.add_argument("--version", action="version", version=f"rydchain {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--server", default=os.environ.get("RYDCHAIN_SERVER"),
                        help="base URL of a running service; default: in-process")

    p_run = sub.add_parser("run", parents=[common], help="execute a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="output directory (default: config output.dir)")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--threads", type=int, default=None,
                       help="Monte Carlo worker threads (default: RYDCHAIN_THREADS or 1)")
    p_run.set_defaults(func=_cmd_run, sweep_axis=None, sweep_values=None)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="run a parameter sweep around a config file")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--axis", dest="sweep_axis", required=True,
                         choices=("v_over_omega", "detuning_over_vnnn", "omega"))
    p_sweep.add_argument("--values", dest="sweep_values", default=None,
                         help="comma-separated axis values (default: from the config)")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--threads", type=int, default=None)
    p_sweep.set_defaults(func=_cmd_run)

    p_mit = sub.add_parser("mitigate", parents=[common],
                           help="divide a ZZ-OTOC grid by its IZ reference")
    p_mit.add_argument("--zz", required=True)
    p_mit.add_argument("--iz", required=True)
    p_mit.add_argument("--floor", type=float, default=0.05)
    p_mit.add_argument("--out", default=None)
    p_mit.set_defaults(func=_cmd_mitigate)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8321)
    p_serve.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
