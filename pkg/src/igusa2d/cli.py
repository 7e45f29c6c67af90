"""Command-line entry point.

Commands run in-process by default. With --server URL the same request is
posted to a running service instead, and the CLI only renders the reply.
"""

from __future__ import annotations

import argparse
import json
import sys

from .runner import COMMANDS, FORMATS, MODES, Outcome, RunConfig, load_input, render, run
from .errors import InputError


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="igusa2d", description="Igusa zeta functions of f(x, y) over Q_p.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--input", required=True, help="problem JSON file")
        sp.add_argument("--prime", type=int, help="overrides 'p' in the input")
        sp.add_argument("--mode", choices=MODES, default="simple")
        sp.add_argument("--max-level", type=int, default=4)
        sp.add_argument("--format", choices=FORMATS, default="plain")
        sp.add_argument("--server", help="base URL of a running igusa2d service")
    sv = sub.add_parser("serve", help="start the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    return ap


def _remote(cfg: RunConfig, base: str) -> Outcome:
    import httpx

    doc = load_input(cfg.input_path)
    if not isinstance(doc, dict):
        raise InputError("document must be a JSON object")
    body = {"polynomial": doc.get("polynomial"), "p": doc.get("p"), "prime": cfg.prime,
            "mode": cfg.mode, "max_level": cfg.max_level}
    resp = httpx.post(f"{base.rstrip('/')}/{cfg.command}", json=body, timeout=600)
    if resp.status_code == 422:
        raise InputError("request rejected by the service schema")
    resp.raise_for_status()
    data = resp.json()
    extras = {"csv": data["csv"]} if data.get("csv") else {}
    return Outcome(data["status"], data["document"], data.get("reason"), extras)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("igusa2d.service:app", host=args.host, port=args.port)
        return 0
    cfg = RunConfig(args.command, args.input, args.prime, args.mode, args.max_level, args.format)
    if args.server:
        try:
            out = _remote(cfg, args.server)
        except InputError as exc:
            print(json.dumps({"error": type(exc).__name__, "reason": str(exc)}), file=sys.stderr)
            return 1
    else:
        out = run(cfg)
    sys.stdout.write(render(out, cfg.format))
    if out.reason:
        print(json.dumps({"status": out.status, "reason": out.reason}), file=sys.stderr)
    return out.status


if __name__ == "__main__":
    raise SystemExit(main())
