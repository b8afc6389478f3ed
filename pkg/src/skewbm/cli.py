"""Thin command-line client for the skewbm service.

Subcommands ``density``, ``sample``, ``simulate`` and ``verify`` build a
request, send it to the FastAPI app (in-process by default, or to a
remote ``--server`` URL) and write the response verbatim, so output is
byte-for-byte reproducible given the same flags and seed.

Configuration precedence: command-line flags override the ``--config``
file (flat ``key = value`` lines, ``#`` comments), which overrides the
``SKEWBM_SEED`` environment fallback for the seed, which overrides the
built-in defaults.

Exit codes: 0 success (and verification pass), 1 verification failure,
2 usage/configuration error, 3 internal error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

import httpx

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _read_config(path):
    """Flat `key = value` file; keys use the long flag names (dashes ok)."""
    values = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


def _request(server, method, path, payload):
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.request(method, path, json=payload)

    from .service import app  # deferred: keeps --help fast

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://skewbm.local", timeout=None
        ) as client:
            return await client.request(method, path, json=payload)

    return asyncio.run(go())


def _emit(data: bytes, out_path):
    if out_path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(out_path, "wb") as f:
            f.write(data)


def _add_common(p):
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--v", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--stream", type=int, default=None)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--config", default=None, help="flat key = value config file")
    p.add_argument("--server", default=None, help="base URL of a running service "
                   "(default: run the service in-process)")


def build_parser():
    parser = argparse.ArgumentParser(prog="skewbm")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="joint density on a (y, ell) grid")
    _add_common(p)
    p.add_argument("--y-min", type=float, default=None)
    p.add_argument("--y-max", type=float, default=None)
    p.add_argument("--y-steps", type=int, default=None)
    p.add_argument("--ell-min", type=float, default=None)
    p.add_argument("--ell-max", type=float, default=None)
    p.add_argument("--ell-steps", type=int, default=None)
    p.add_argument("--side", choices=("above", "below", "avg"), default=None)

    p = sub.add_parser("sample", help="exact draws from the joint law")
    _add_common(p)
    p.add_argument("--n-samples", type=int, default=None)

    p = sub.add_parser("simulate", help="lattice walk paths")
    _add_common(p)
    p.add_argument("--n-per-unit", type=int, default=None,
                   help="lattice steps per unit time (>= 100)")
    p.add_argument("--n-paths", type=int, default=None)

    p = sub.add_parser("verify", help="run verification checks")
    _add_common(p)
    p.add_argument("--checks", default=None,
                   help="comma-separated subset of built-in check names")
    p.add_argument("--suite", default=None,
                   help="JSON file with a custom list of check specs")
    p.add_argument("--list-checks", action="store_true")

    return parser


_FIELDS = {
    "density": ["alpha", "x", "t", "y_min", "y_max", "y_steps",
                "ell_min", "ell_max", "ell_steps", "side", "format"],
    "sample": ["alpha", "x", "t", "n_samples", "seed", "stream", "format"],
    "simulate": ["alpha", "x", "t", "v", "n_per_unit", "n_paths", "seed",
                 "stream", "format"],
    "verify": ["seed"],
}

_CONVERT = {
    "alpha": float, "x": float, "t": float, "v": float,
    "y_min": float, "y_max": float, "ell_min": float, "ell_max": float,
    "y_steps": int, "ell_steps": int, "n_samples": int, "n_per_unit": int,
    "n_paths": int, "seed": int, "stream": int,
    "side": str, "format": str, "checks": str,
}


def _resolve(args, field):
    """flag > config file > SKEWBM_SEED (seed only) > service default."""
    val = getattr(args, field, None)
    if val is not None:
        return val
    cfg = getattr(args, "_config_values", {})
    if field in cfg:
        try:
            return _CONVERT.get(field, str)(cfg[field])
        except ValueError as e:
            raise ValueError(f"config value for {field}: {e}") from None
    if field == "seed":
        env = os.environ.get("SKEWBM_SEED")
        if env is not None:
            return int(env)
    return None


def _payload(args, command):
    payload = {}
    for field in _FIELDS[command]:
        val = _resolve(args, field)
        if val is not None:
            payload[field] = val
    if command == "simulate" and "n_per_unit" in payload:
        payload["n"] = payload.pop("n_per_unit")
    return payload


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        args._config_values = _read_config(args.config) if args.config else {}
    except (OSError, ValueError) as e:
        print(f"skewbm: config error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "verify":
            return _run_verify(args)
        payload = _payload(args, args.command)
        resp = _request(args.server, "POST", f"/{args.command}", payload)
    except ValueError as e:
        print(f"skewbm: {e}", file=sys.stderr)
        return EXIT_USAGE
    except httpx.HTTPError as e:
        print(f"skewbm: transport error: {e}", file=sys.stderr)
        return EXIT_INTERNAL

    if resp.status_code in (400, 422):
        print(f"skewbm: invalid request: {resp.text}", file=sys.stderr)
        return EXIT_USAGE
    if resp.status_code != 200:
        print(f"skewbm: server error {resp.status_code}: {resp.text}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(resp.content, args.out)
    return EXIT_OK


def _run_verify(args) -> int:
    if args.list_checks:
        resp = _request(args.server, "GET", "/checks", None)
        if resp.status_code != 200:
            print(f"skewbm: server error: {resp.text}", file=sys.stderr)
            return EXIT_INTERNAL
        for name in resp.json()["checks"]:
            print(name)
        return EXIT_OK

    payload = _payload(args, "verify")
    payload.setdefault("seed", 0)
    checks_arg = _resolve(args, "checks") if hasattr(args, "checks") else None
    if checks_arg:
        payload["names"] = [c.strip() for c in str(checks_arg).split(",") if c.strip()]
    if args.suite:
        try:
            with open(args.suite) as f:
                payload["checks"] = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            print(f"skewbm: cannot read suite: {e}", file=sys.stderr)
            return EXIT_USAGE

    resp = _request(args.server, "POST", "/verify", payload)
    if resp.status_code in (400, 422):
        print(f"skewbm: invalid verify configuration: {resp.text}", file=sys.stderr)
        return EXIT_USAGE
    if resp.status_code != 200:
        print(f"skewbm: server error {resp.status_code}: {resp.text}", file=sys.stderr)
        return EXIT_INTERNAL

    _emit(resp.content, args.out)
    report = resp.json()
    return EXIT_OK if report.get("overall_pass") else EXIT_VERIFY_FAIL


if __name__ == "__main__":
    sys.exit(main())
