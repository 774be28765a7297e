"""Command-line entry point.

Subcommands: run, sweep, validate, selftest, serve.  Each of the first
four executes in-process by default and against a running service when
--server is given.  Exit codes: 0 success, 1 config error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .harness import (ConfigError, _fmt, emit_report, load_config, run_experiment,
                      sweep, validate_config)
from .selftest import run_selftest

SWEEP_COLUMNS = ("b", "sigma", "n_tasks", "eta", "repetitions",
                 "mean_final_regret", "std_final_regret", "mean_final_bound")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtomd",
        description="Multitask online mirror descent experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment, write trajectory CSV")
    run_p.add_argument("config", help="JSON run config")
    run_p.add_argument("--out", help="CSV output path (default <experiment>.csv)")
    run_p.add_argument("--server", help="delegate to a service at this base URL")

    sweep_p = sub.add_parser("sweep", help="grid sweep, write summary CSV")
    sweep_p.add_argument("config", help="JSON run config with grids")
    sweep_p.add_argument("--out", help="summary CSV path (default stdout)")
    sweep_p.add_argument("--server", help="delegate to a service at this base URL")

    val_p = sub.add_parser("validate", help="dry-run config checks")
    val_p.add_argument("config", help="JSON run config")
    val_p.add_argument("--server", help="delegate to a service at this base URL")

    st_p = sub.add_parser("selftest", help="run the invariant suites")
    st_p.add_argument("--server", help="delegate to a service at this base URL")

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    return parser


def _post(server: str, route: str, payload: dict | None):
    import httpx

    url = server.rstrip("/") + route
    reply = httpx.post(url, json=payload, timeout=None)
    if reply.status_code == 400 or reply.status_code == 422:
        raise ConfigError(reply.json().get("detail", reply.text))
    if reply.status_code != 200:
        raise RuntimeError(f"{url} -> HTTP {reply.status_code}: {reply.text}")
    return reply.json()


def _write_remote_csv(body: dict, path: str) -> None:
    traj = body["trajectory"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,cumulative_loss,regret,bound\n")
        bound = traj["bound"]
        for k, t in enumerate(traj["t"]):
            b = _fmt(bound[k]) if bound is not None else ""
            fh.write(f"{t},{_fmt(traj['cumulative_loss'][k])},"
                     f"{_fmt(traj['regret'][k])},{b}\n")


def _cmd_run(args) -> int:
    if args.server:
        with open(args.config, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        payload["include_trajectory"] = True
        body = _post(args.server, "/run", payload)
        out = args.out or f"{payload.get('experiment', 'run')}.csv"
        _write_remote_csv(body, out)
        meta = dict(body)
        meta.pop("trajectory", None)
        meta_path = (out[:-4] if out.endswith(".csv") else out) + ".meta.json"
        with open(meta_path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        final_regret, final_bound = body["final_regret"], body["final_bound"]
    else:
        cfg = load_config(args.config)
        report = run_experiment(cfg)
        out = args.out or f"{cfg.experiment}.csv"
        emit_report(report, out)
        final_regret = report.final_regret
        final_bound = None if report.bound is None else float(report.bound[-1])
    print(f"wrote {out}")
    print(f"final regret {final_regret:.6g}"
          + (f", bound {final_bound:.6g}" if final_bound is not None else ""))
    return 0


def _sweep_csv(rows: list[dict], fh) -> None:
    fh.write(",".join(SWEEP_COLUMNS) + "\n")
    for row in rows:
        cells = []
        for col in SWEEP_COLUMNS:
            v = row[col]
            if v is None:
                cells.append("")
            elif isinstance(v, float):
                cells.append(_fmt(v))
            else:
                cells.append(str(v))
        fh.write(",".join(cells) + "\n")


def _cmd_sweep(args) -> int:
    if args.server:
        with open(args.config, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        rows = _post(args.server, "/sweep", payload)["cells"]
    else:
        rows = sweep(load_config(args.config))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            _sweep_csv(rows, fh)
        print(f"wrote {args.out} ({len(rows)} cells)")
    else:
        _sweep_csv(rows, sys.stdout)
    return 0


def _cmd_validate(args) -> int:
    if args.server:
        with open(args.config, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        info = _post(args.server, "/validate", payload)
        info.pop("ok", None)
    else:
        info = validate_config(load_config(args.config))
    summary = " ".join(f"{k}={v}" for k, v in info.items())
    print(f"ok: {summary}")
    return 0


def _cmd_selftest(args) -> int:
    if args.server:
        body = _post(args.server, "/selftest", None)
        for line in body["lines"]:
            print(line)
        return 0 if body["ok"] else 2
    return 0 if run_selftest(print) else 2


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "validate": _cmd_validate,
               "selftest": _cmd_selftest, "serve": _cmd_serve}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
