"""Command line entry point: ``haudim <kind> --config FILE [--assert] [--seed N] [--out DIR]``.

Exit codes: 0 run completed, 1 a tolerance failed under ``--assert``,
2 usage or configuration error, 3 output could not be written.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import KINDS, ConfigError, default_config, load_config
from .experiments import resolve_workers, run_experiment

log = logging.getLogger("haudim")

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="haudim", description="Hausdorff dimension experiments for random time sets.")
    p.add_argument("kind", choices=KINDS, help="experiment kind")
    p.add_argument("--config", metavar="FILE", help="INI config; omitted values take their defaults")
    p.add_argument("--assert", dest="check", action="store_true", help="exit 1 if a tolerance check fails")
    p.add_argument("--seed", type=int, metavar="N", help="override master_seed")
    p.add_argument("--out", metavar="DIR", help="output directory (default: config 'out', else runs/<name>)")
    p.add_argument("--workers", type=int, metavar="N", help="worker threads (capped by HAUDIM_THREADS)")
    p.add_argument("-q", "--quiet", action="store_true", help="do not print the report")
    return p


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="haudim: %(message)s")
    try:
        cfg = load_config(args.config, args.kind) if args.config else default_config(args.kind)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        out = Path(args.out or cfg.out or Path("runs") / cfg.name)
        cfg = dataclasses.replace(cfg, out=str(out))
        workers = resolve_workers(args.workers)
        result = run_experiment(cfg, workers)
    except ConfigError as e:
        log.error("%s", e)
        return EXIT_USAGE

    try:
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "result.csv", result.csv)
        _write(out / "report.txt", result.report)
        _write(out / "config.echo", cfg.echo())
        for name, text in result.extra.items():
            _write(out / name, text)
    except OSError as e:
        log.error("cannot write to %s: %s", out, e)
        return EXIT_IO

    if not args.quiet:
        sys.stdout.write(result.report)
    if args.check and result.passed is False:
        return EXIT_ASSERT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
