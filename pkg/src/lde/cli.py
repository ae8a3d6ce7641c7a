"""Command line: ``lde run | validate | list-scenarios``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (or, with
``--strict``, a perturbative-validity verdict other than ``ok``).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

from . import __version__
from .config import SCENARIOS, load_config
from .errors import ConfigError, InvalidSpec, LdeError
from .scenarios import Table, format_value, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("lde")


def render_csv(table: Table, scenario: str) -> str:
    buf = io.StringIO()
    buf.write(f"# lde {__version__} scenario={scenario}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, float) and v != v:
        return None
    if hasattr(v, "item"):
        return _jsonable(v.item())
    return v


def render_json(table: Table, cfg) -> str:
    doc = {
        "lde_version": __version__,
        "config": cfg.to_dict(),
        "columns": list(table.columns),
        "records": [{c: _jsonable(v) for c, v in zip(table.columns, row)} for row in table.rows],
        "summary": {k: _jsonable(v) if not isinstance(v, list) else v
                    for k, v in table.summary.items()},
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _setup_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("lde level=%(levelname)s %(message)s"))
    root = logging.getLogger("lde")
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    root.propagate = False


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, InvalidSpec) as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = run(cfg, threads=args.threads)
    except (LdeError, ArithmeticError, ValueError) as exc:
        log.error("event=numerical_failure scenario=%s error=%s: %s", cfg.scenario,
                  type(exc).__name__, exc)
        return EXIT_NUMERICAL
    out_dir = args.output or os.path.dirname(os.path.abspath(args.config))
    path = os.path.join(out_dir, cfg.output.path)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    text = render_csv(table, cfg.scenario) if cfg.output.format == "csv" else render_json(table, cfg)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    for key, value in table.summary.items():
        if not isinstance(value, list):
            log.info("event=summary %s=%s", key, value)
    log.info("event=written path=%s", path)
    verdict = table.summary.get("verdict")
    if args.strict and verdict not in (None, "ok"):
        log.error("event=validity_failure verdict=%s", verdict)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, InvalidSpec, OSError) as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"ok: scenario={cfg.scenario}")
    return EXIT_OK


def cmd_list(args) -> int:
    for name, desc in SCENARIOS.items():
        print(f"{name:<25} {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lde", description="Probe-probe effective couplings and "
                                "long-distance entanglement mediated by gapped spin chains.")
    p.add_argument("--version", action="version", version=f"lde {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the scenario described by a JSON config")
    r.add_argument("config")
    r.add_argument("--output", metavar="DIR", help="output directory (default: next to the config)")
    r.add_argument("--threads", type=int, default=1, metavar="N")
    r.add_argument("--strict", action="store_true",
                   help="exit 3 when the perturbative-validity verdict is not 'ok'")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("validate", help="check a config against the schema without computing")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)
    ls = sub.add_parser("list-scenarios", help="print the available scenarios")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
