"""Command-line experiment runner.

    opspread --config run.cfg --scenario theorem1 --seed 3 --out results.csv

Writes one CSV (or JSON) file of records plus ``<out>.meta.json`` echoing the
effective configuration. Exit status: 0 all assertions pass, 2 an inequality
assertion failed (records flag which), 1 configuration or runtime error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .config import SCENARIOS, ConfigError, RunConfig, parse_config
from .scenarios import COLUMNS, RunRecord, run_scenario

log = logging.getLogger("opspread")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def to_csv(records: list[RunRecord]) -> str:
    if not records:
        raise ValueError("no records to emit")
    columns = list(records[0].values)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in records:
        w.writerow([_cell(r.values[c]) for c in columns])
    return buf.getvalue()


def to_json(records: list[RunRecord]) -> str:
    if not records:
        raise ValueError("no records to emit")
    return json.dumps([r.values for r in records], indent=1) + "\n"


def emit(records: list[RunRecord], fmt: str = "csv", path: str | Path | None = None) -> str:
    """Serialize records; write to ``path`` when given. Returns the text."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    text = to_csv(records) if fmt == "csv" else to_json(records)
    if path:
        Path(path).write_text(text)
    return text


def _parse_cell(s: str):
    if s in ("true", "false"):
        return s == "true"
    if s == "":
        return None
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def load_records(text: str, fmt: str = "csv") -> list[dict]:
    """Inverse of :func:`emit`: the flat value dicts in emission order."""
    if fmt == "json":
        return json.loads(text)
    rows = list(csv.reader(io.StringIO(text)))
    header = rows[0]
    return [dict(zip(header, (_parse_cell(c) for c in row))) for row in rows[1:]]


def write_meta(cfg: RunConfig, records: list[RunRecord], code: int, path: str | Path) -> None:
    meta = {
        "toolkit_version": __version__,
        "config": cfg.echo(),
        "columns": COLUMNS[cfg.scenario],
        "n_records": len(records),
        "n_failed": sum(not r.passed for r in records),
        "exit_code": code,
    }
    Path(path).write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opspread", description="Run an information-propagation experiment.")
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--scenario", choices=SCENARIOS, help="overrides the config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        text = args.config.read_text() if args.config else ""
        cfg = parse_config(text, scenario=args.scenario, seed=args.seed, output=args.out, format=args.format)
    except (OSError, ConfigError) as exc:
        log.error("%s", exc)
        return 1
    try:
        t0 = time.perf_counter()
        records, code = run_scenario(cfg)
        log.info("%s: %d records in %.2f s", cfg.scenario, len(records), time.perf_counter() - t0)
        out = emit(records, cfg.format, cfg.output or None)
        if cfg.output:
            write_meta(cfg, records, code, f"{cfg.output}.meta.json")
        else:
            sys.stdout.write(out)
    except Exception as exc:  # noqa: BLE001 - reported as exit status 1
        log.exception("run failed: %s", exc)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
