"""Command-line entry point: ``hinet <command> [options]``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error. Errors
are also written to stderr as a single JSON record.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import pipeline
from .config import PipelineConfig, load_config
from .errors import ConfigViolation, HinError

log = logging.getLogger("hinet")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="TOML config file")
    p.add_argument("--workdir", type=Path, help="artifact directory (falls back to $HIN_WORKDIR)")
    p.add_argument("--f", type=int, choices=(32, 64, 128), help="fingerprint width in bits")
    p.add_argument("--n-top", type=int, dest="n_top", help="candidates kept by screening")
    p.add_argument("--theta", type=float, help="pruning threshold for inferred topic edges")
    p.add_argument("--strategy", choices=("replace", "window", "fullsort"))
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-q", "--quiet", action="store_true", help="no effective-config dump")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hinet", description="Build a Doc/Item/Topic network from standards text.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    helps = {
        "ingest": "validate inputs and copy docs, topics and labels into the workdir",
        "segment": "split documents into numbered items",
        "fingerprint": "SimHash fingerprints of docs, items and topics",
        "screen": "Top-N Hamming candidates per unit",
        "similarity": "exact WMD on screened candidates of one kind",
        "propagate": "infer Item-Topic and Doc-Topic edges",
        "assemble": "validate and write the network",
        "metrics": "topic precision against held-out labels",
        "bench": "time/recall sweep over N and, optionally, strategy timings",
        "synth": "write a seeded synthetic corpus and a config for it",
        "run": "ingest through assemble in one go",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        _common(p)
        if name == "similarity":
            p.add_argument("--kind", required=True, choices=pipeline.KINDS)
        elif name == "bench":
            p.add_argument("--etime", action="store_true", help="also time the selection strategies")
            p.add_argument("--grid", type=lambda s: tuple(int(x) for x in s.split(",")),
                           help="comma-separated N values")
            p.add_argument("--queries", type=int)
        elif name == "synth":
            p.add_argument("--out", type=Path, required=True)
            p.add_argument("--docs", type=int, default=40)
            p.add_argument("--noise", choices=("none", "clean", "adversarial"), default="clean")
            p.add_argument("--as-directory", action="store_true",
                           help="one .txt file per document instead of corpus.jsonl")
    return parser


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config)
    workdir = args.workdir or cfg.workdir or os.environ.get("HIN_WORKDIR")
    cfg = cfg.with_overrides(workdir=workdir, f=args.f, n_top=args.n_top, theta=args.theta,
                             strategy=args.strategy, threads=args.threads, seed=args.seed)
    if getattr(args, "grid", None) or getattr(args, "queries", None):
        from dataclasses import replace

        bench = replace(cfg.bench, **{k: v for k, v in
                                      (("grid", args.grid), ("queries", args.queries)) if v})
        cfg = replace(cfg, bench=bench)
    return cfg


def _dispatch(args, cfg: PipelineConfig) -> None:
    if args.command == "synth":
        path = pipeline.synth_stage(args.out, cfg, args.docs, args.noise, args.as_directory)
        print(path)
        return
    ws = pipeline.Workspace(cfg)
    stages = {
        "ingest": pipeline.ingest,
        "segment": pipeline.segment_stage,
        "fingerprint": pipeline.fingerprint_stage,
        "screen": pipeline.screen_stage,
        "propagate": pipeline.propagate_stage,
        "assemble": pipeline.assemble_stage,
        "metrics": pipeline.metrics_stage,
    }
    if args.command in stages:
        stages[args.command](ws)
    elif args.command == "similarity":
        pipeline.similarity_stage(ws, args.kind)
    elif args.command == "bench":
        if cfg.threads != 1:
            raise ConfigViolation("timed benchmarks run with --threads 1")
        pipeline.bench_stage(ws, etime=args.etime)
    elif args.command == "run":
        pipeline.run_all(cfg)


def _error(kind: str, message: str, command: str | None) -> None:
    rec = {"error": kind, "message": message, "command": command}
    print(json.dumps(rec), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    command = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        cfg = _config(args)
        if not args.quiet:
            print(json.dumps(cfg.effective(), sort_keys=True), file=sys.stderr)
        _dispatch(args, cfg)
    except UsageError as e:
        _error("UsageError", str(e), command)
        return EXIT_USAGE
    except ConfigViolation as e:
        _error("ConfigViolation", str(e), command)
        return EXIT_USAGE
    except HinError as e:
        _error(type(e).__name__, str(e), command)
        return EXIT_DATA
    except (OSError, ValueError) as e:
        _error(type(e).__name__, str(e), command)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
