"""Command-line scenario runner.

    pathghz --config run.yaml --scenario ghz --out results/

Exit status is 0 on success, 1 for a configuration or validation problem and
2 when a numerical check fails. Every CSV starts with a
``# config_digest=<sha256>`` line followed by the header row.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .config import load_config
from .errors import DimensionGuardError, NumericalCheckError, PathGhzError, ValidationError
from .scenarios import RUNNERS, SCENARIOS, Table

log = logging.getLogger("pathghz")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _cell(value) -> str:
    # repr keeps every float bit so reruns are byte-identical
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(out_dir: Path, table: Table, digest: str) -> Path:
    path = out_dir / f"{table.name}.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# config_digest={digest}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.header)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])
    return path


def write_tables(out_dir: Path, tables: Iterable[Table], digest: str) -> list:
    out_dir.mkdir(parents=True, exist_ok=True)
    return [write_table(out_dir, t, digest) for t in tables]


def run_scenario(config_path, scenario: str, out_dir, seed: Optional[int] = None, workers: int = 1) -> int:
    """Run one scenario and write its CSVs; returns the exit status."""
    try:
        cfg = load_config(config_path)
        if scenario not in RUNNERS:
            raise ValidationError(f"unknown scenario {scenario!r}")
        kw = {"workers": workers} if scenario == "sweep" else {}
        tables = RUNNERS[scenario](cfg, seed, **kw)
    except NumericalCheckError as e:
        log.error("numerical check failed: %s", e)
        tables = getattr(e, "tables", None)
        if tables:
            write_tables(Path(out_dir), tables, cfg.digest())
        return EXIT_NUMERICAL
    except (PathGhzError, DimensionGuardError) as e:
        log.error("invalid input: %s", e)
        return EXIT_VALIDATION
    for path in write_tables(Path(out_dir), tables, cfg.digest()):
        log.info("wrote %s", path)
    return EXIT_OK


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pathghz", description="Simulate a four-ring GHZ source and write CSV reports.")
    p.add_argument("--config", required=True, help="YAML run configuration")
    p.add_argument("--scenario", required=True, choices=SCENARIOS)
    p.add_argument("--out", default=".", help="output directory for CSV files (default: .)")
    p.add_argument("--seed", type=_seed, default=None, help="seed for random sweeps and oracle configs")
    p.add_argument("--workers", type=int, default=1, help="processes for sweep points (default: 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    workers = max(1, min(args.workers, os.cpu_count() or 1))
    return run_scenario(args.config, args.scenario, args.out, args.seed, workers)


if __name__ == "__main__":
    sys.exit(main())
