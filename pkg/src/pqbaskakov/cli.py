"""Thin command-line client for the operator service.

Every subcommand builds a request, sends it to the HTTP service and renders
the JSON response as CSV or JSON.  By default the service runs in-process
(over an ASGI transport, no socket involved), so the CLI works standalone
and deterministically; --server points it at a remote instance instead.

Exit codes: 0 success, 2 usage/configuration error, 3 series did not
converge within the term cap (partial result still printed), 4 evaluation
error (non-finite function value).
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from typing import List, Optional, Sequence, Tuple

import httpx

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONVERGENCE = 3
EXIT_EVALUATION = 4

DEFAULT_SCHEDULE = "p=1-1/(n+1)^2,q=1-1/(n+1)"


def _parse_range(text: str) -> Tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must be numeric, got {text!r}")
    return start, stop, step


def _parse_int_list(text: str) -> List[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _parse_pq_list(text: str) -> List[Tuple[float, float]]:
    pairs = []
    for chunk in text.split(","):
        if not chunk.strip():
            continue
        bits = chunk.split(":")
        if len(bits) != 2:
            raise argparse.ArgumentTypeError(f"expected p:q pairs, got {chunk!r}")
        try:
            pairs.append((float(bits[0]), float(bits[1])))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected numeric p:q, got {chunk!r}")
    if not pairs:
        raise argparse.ArgumentTypeError("at least one p:q pair required")
    return pairs


def _add_output_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", default=None, help="output file (default standard output)")
    sub.add_argument("--server", default=None, help="base URL of a running service; default runs in-process")


def _add_policy_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--eps", type=float, default=1e-12, help="tail tolerance (default 1e-12)")
    sub.add_argument("--kmax", type=int, default=10000, help="series term cap (default 10000)")
    sub.add_argument("--growth", type=int, default=2, help="declared polynomial growth of f (default 2)")


def _add_pq_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--q", type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqbask",
        description="Baskakov-type operator evaluation, moment tables, bound audits, "
        "convergence tables and comparison curves.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_eval = subs.add_parser("eval", help="evaluate an operator series at one point")
    p_eval.add_argument("--f", required=True, help="expression in x, e.g. 'sin(x^2)'")
    p_eval.add_argument("--n", type=int, required=True)
    _add_pq_flags(p_eval)
    p_eval.add_argument("--x", type=float, required=True)
    p_eval.add_argument("--operator", choices=("plain", "king"), default="plain")
    _add_policy_flags(p_eval)
    _add_output_flags(p_eval)

    p_mom = subs.add_parser("moments", help="series vs closed-form moment table on a grid")
    p_mom.add_argument("--n", type=int, required=True)
    _add_pq_flags(p_mom)
    p_mom.add_argument("--operator", choices=("plain", "king"), default="plain")
    p_mom.add_argument("--range", type=_parse_range, default=(0.0, 5.0, 0.25), metavar="START:STOP:STEP")
    _add_policy_flags(p_mom)
    _add_output_flags(p_mom)

    p_bounds = subs.add_parser("bounds", help="audit of the claimed central-moment bounds")
    p_bounds.add_argument("--n-list", type=_parse_int_list, default=[2, 10], metavar="N1,N2,...")
    p_bounds.add_argument(
        "--pq-list", type=_parse_pq_list, default=[(0.9, 0.8), (0.99, 0.98)], metavar="P:Q,P:Q,..."
    )
    p_bounds.add_argument("--range", type=_parse_range, default=(0.0, 5.0, 0.25), metavar="START:STOP:STEP")
    _add_output_flags(p_bounds)

    p_conv = subs.add_parser("converge", help="weighted-norm convergence table along a schedule")
    p_conv.add_argument("--schedule", default=DEFAULT_SCHEDULE, help=f"default {DEFAULT_SCHEDULE!r}")
    p_conv.add_argument("--n-list", type=_parse_int_list, default=[4, 16, 64, 256], metavar="N1,N2,...")
    p_conv.add_argument("--range", type=_parse_range, default=(0.0, 50.0, 0.01), metavar="START:STOP:STEP")
    _add_output_flags(p_conv)

    p_fig = subs.add_parser("figure", help="comparison curve data for both operators")
    p_fig.add_argument("--f", required=True, help="expression in x, e.g. 'sin(x^2)'")
    p_fig.add_argument("--n", type=int, required=True)
    _add_pq_flags(p_fig)
    p_fig.add_argument("--range", type=_parse_range, default=(0.0, 2.0, 0.01), metavar="START:STOP:STEP")
    _add_policy_flags(p_fig)
    _add_output_flags(p_fig)

    p_serve = subs.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


async def _local_post(path: str, payload: dict) -> httpx.Response:
    from .service import create_app

    transport = httpx.ASGITransport(app=create_app())
    async with httpx.AsyncClient(
        transport=transport, base_url="http://pqbaskakov.local", timeout=None
    ) as client:
        return await client.post(path, json=payload)


def call_service(path: str, payload: dict, server: Optional[str]) -> Tuple[int, dict]:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            resp = client.post(path, json=payload)
    else:
        resp = asyncio.run(_local_post(path, payload))
    return resp.status_code, resp.json()


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_csv(columns: Sequence[str], rows: Sequence[dict], trailer: Optional[str] = None) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_cell(row[c]) for c in columns))
    if trailer:
        lines.append(trailer)
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _fail(status: int, body: dict) -> int:
    detail = body.get("detail", body)
    if isinstance(detail, dict) and "kind" in detail:
        kind = detail.get("kind")
        message = detail.get("message", "")
        print(f"error ({kind}): {message}", file=sys.stderr)
        return EXIT_EVALUATION if kind == "evaluation" else EXIT_USAGE
    if isinstance(detail, list):
        msgs = "; ".join(str(item.get("msg", item)) for item in detail)
        print(f"error (usage): {msgs}", file=sys.stderr)
        return EXIT_USAGE
    print(f"error (status {status}): {json.dumps(detail)}", file=sys.stderr)
    return EXIT_USAGE


def _render_table(body: dict, fmt: str, out: Optional[str], trailer: Optional[str] = None) -> None:
    if fmt == "json":
        _emit(json.dumps(body, indent=2) + "\n", out)
    else:
        _emit(_render_csv(body["meta"]["columns"], body["rows"], trailer), out)


def _finish(body: dict, converged: bool) -> int:
    if not converged:
        print(
            "warning: series did not converge within the term cap; partial result printed",
            file=sys.stderr,
        )
        return EXIT_CONVERGENCE
    return EXIT_OK


def _cmd_eval(args) -> int:
    payload = {
        "f": args.f,
        "n": args.n,
        "p": args.p,
        "q": args.q,
        "x": args.x,
        "operator": args.operator,
        "eps": args.eps,
        "kmax": args.kmax,
        "growth": args.growth,
    }
    status, body = call_service("/eval", payload, args.server)
    if status != 200:
        return _fail(status, body)
    if args.format == "json":
        _emit(json.dumps(body, indent=2) + "\n", args.out)
    else:
        columns = body["meta"]["columns"]
        _emit(_render_csv(columns, [body]), args.out)
    return _finish(body, body["converged"])


def _cmd_moments(args) -> int:
    start, stop, step = args.range
    payload = {
        "n": args.n,
        "p": args.p,
        "q": args.q,
        "operator": args.operator,
        "start": start,
        "stop": stop,
        "step": step,
        "eps": args.eps,
        "kmax": args.kmax,
        "growth": args.growth,
    }
    status, body = call_service("/moments", payload, args.server)
    if status != 200:
        return _fail(status, body)
    _render_table(body, args.format, args.out)
    return _finish(body, body["meta"]["converged"])


def _cmd_bounds(args) -> int:
    start, stop, step = args.range
    payload = {
        "n_list": args.n_list,
        "pq_list": [{"p": p, "q": q} for p, q in args.pq_list],
        "start": start,
        "stop": stop,
        "step": step,
    }
    status, body = call_service("/bounds", payload, args.server)
    if status != 200:
        return _fail(status, body)
    _render_table(body, args.format, args.out)
    return EXIT_OK


def _cmd_converge(args) -> int:
    start, stop, step = args.range
    payload = {
        "schedule": args.schedule,
        "n_list": args.n_list,
        "start": start,
        "stop": stop,
        "step": step,
    }
    status, body = call_service("/converge", payload, args.server)
    if status != 200:
        return _fail(status, body)
    _render_table(body, args.format, args.out)
    return EXIT_OK


def _cmd_figure(args) -> int:
    start, stop, step = args.range
    payload = {
        "f": args.f,
        "n": args.n,
        "p": args.p,
        "q": args.q,
        "start": start,
        "stop": stop,
        "step": step,
        "eps": args.eps,
        "kmax": args.kmax,
        "growth": args.growth,
    }
    status, body = call_service("/figure", payload, args.server)
    if status != 200:
        return _fail(status, body)
    summary = body["summary"]
    trailer = (
        f"# sup_err_plain={_cell(float(summary['sup_err_plain']))},"
        f"sup_err_king={_cell(float(summary['sup_err_king']))}"
    )
    _render_table(body, args.format, args.out, trailer=trailer)
    return _finish(body, body["meta"]["converged"])


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "eval": _cmd_eval,
    "moments": _cmd_moments,
    "bounds": _cmd_bounds,
    "converge": _cmd_converge,
    "figure": _cmd_figure,
    "serve": _cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except httpx.HTTPError as exc:
        print(f"error (transport): {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
