"""msymp command line: a thin client of the service layer.

    msymp run <file> [--url URL]      execute a script
    msymp check <file> [--url URL]    parse and validate only
    msymp selftest [--url URL]        run the embedded identity suite
    msymp serve [--host H] [--port P] start the HTTP service

Without --url the commands call the service layer in-process; with --url they
POST to a running msymp server.

Exit codes for run: 0 clean, 1 a verdict failed, 2 internal error or invalid
input.  check exits 1 when diagnostics are present; selftest exits 1 on any
failed check.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .executor import EXIT_INTERNAL


def _read_script(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        print(f"error: cannot read {path}: {e}", file=sys.stderr)
        raise SystemExit(EXIT_INTERNAL)


def _post(url: str, endpoint: str, payload: dict) -> dict:
    import httpx

    resp = httpx.post(url.rstrip("/") + endpoint, json=payload, timeout=600.0)
    resp.raise_for_status()
    return resp.json()


def _cmd_run(args) -> int:
    text = _read_script(args.file)
    if args.url:
        data = _post(args.url, "/run", {"script": text})
    else:
        from .service import run_script

        data = run_script(text).model_dump()
    for d in data["diagnostics"]:
        print(f"{d['severity']}: {d['line']}:{d['col_start']}-{d['col_end']}: "
              f"{d['message']}", file=sys.stderr)
    if data["output"]:
        sys.stdout.write(data["output"])
    return data["exit_code"]


def _cmd_check(args) -> int:
    text = _read_script(args.file)
    if args.url:
        data = _post(args.url, "/check", {"script": text})
    else:
        from .service import check_script

        data = check_script(text).model_dump()
    for d in data["diagnostics"]:
        print(f"{d['severity']}: {d['line']}:{d['col_start']}-{d['col_end']}: "
              f"{d['message']}")
    if data["ok"]:
        print("ok")
        return 0
    return 1


def _cmd_selftest(args) -> int:
    if args.url:
        data = _post(args.url, "/selftest", {"bundles": None})
    else:
        from .service import selftest

        data = selftest().model_dump()
    sys.stdout.write(data["table"])
    return 0 if data["ok"] else 1


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("msymp.service:app", host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="msymp",
        description="exact exterior-calculus engine for multisymplectic "
                    "phase spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a script file")
    p_run.add_argument("file")
    p_run.add_argument("--url", help="POST to a running msymp server instead")
    p_run.set_defaults(fn=_cmd_run)

    p_check = sub.add_parser("check", help="parse and validate a script file")
    p_check.add_argument("file")
    p_check.add_argument("--url")
    p_check.set_defaults(fn=_cmd_check)

    p_self = sub.add_parser("selftest", help="run the embedded identity suite")
    p_self.add_argument("--url")
    p_self.set_defaults(fn=_cmd_selftest)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(fn=_cmd_serve)

    args = parser.parse_args(argv)
    code = args.fn(args)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
